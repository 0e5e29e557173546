#include <doctest.h>

#include <fstream>
#include <iterator>

#include "tmsat/ensemble_io.hpp"
#include "tmsat/error.hpp"

using namespace tmsat;

namespace {

TurbulenceEnsemble synthetic(std::uint64_t seed, std::size_t count) {
  TurbulenceEnsemble e;
  e.seed = seed;
  e.aperture_radius = 4.0;
  e.parameters.n_xy = 128;
  const std::vector<int> labels{-1, 0, 1};
  for (std::size_t i = 0; i < count; ++i) {
    Eigen::MatrixXcd m(3, 3);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) m(r, c) = Complex(0.1 * r + 0.01 * i, -0.2 * c + 1.0 / (i + 3.0));
    e.realizations.push_back({AmplitudeMatrix(labels, m), 0.3 + 1e-3 * i});
  }
  return e;
}

std::filesystem::path temp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("tmsat_test_" + name);
}

ErrorKind kind_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidParameter;
}

void corrupt(const std::filesystem::path& path, std::size_t offset) {
  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekg(static_cast<std::streamoff>(offset));
  char c;
  f.read(&c, 1);
  c = static_cast<char>(c ^ 0x5a);
  f.seekp(static_cast<std::streamoff>(offset));
  f.write(&c, 1);
}

}  // namespace

TEST_CASE("round trip is exact") {
  const auto e = synthetic(17, 5);
  const auto path = temp("ens.bin");
  save_ensemble(e, path);
  const auto back = load_ensemble(path, e.parameters, 4.0, 5, 17);
  CHECK(back.seed == 17u);
  CHECK(back.aperture_radius == 4.0);
  REQUIRE(back.realizations.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(back.realizations[i].smm == e.realizations[i].smm);
    CHECK(back.realizations[i].oam.entries() == e.realizations[i].oam.entries());
    CHECK(back.realizations[i].oam.labels() == e.realizations[i].oam.labels());
  }
  CHECK(read_ensemble(path).realizations.size() == 5);
}

TEST_CASE("mismatches are rejected") {
  const auto e = synthetic(17, 4);
  const auto path = temp("ens_mismatch.bin");
  save_ensemble(e, path);
  auto other = e.parameters;
  other.ground_strength *= 2;
  CHECK(kind_of([&] { load_ensemble(path, other, 4.0, 4, 17); }) == ErrorKind::ParameterMismatch);
  CHECK(kind_of([&] { load_ensemble(path, e.parameters, 1.0, 4, 17); }) == ErrorKind::ParameterMismatch);
  CHECK(kind_of([&] { load_ensemble(path, e.parameters, 4.0, 8, 17); }) == ErrorKind::ParameterMismatch);
  CHECK(kind_of([&] { load_ensemble(path, e.parameters, 4.0, 4, 18); }) == ErrorKind::ParameterMismatch);
  CHECK(kind_of([&] { load_ensemble(temp("missing.bin"), e.parameters, 4.0, 4, 17); }) == ErrorKind::Io);
}

TEST_CASE("corruption is detected") {
  const auto e = synthetic(3, 3);
  const auto path = temp("ens_corrupt.bin");
  save_ensemble(e, path);
  const auto size = std::filesystem::file_size(path);
  corrupt(path, size - 20);
  CHECK(kind_of([&] { read_ensemble(path); }) == ErrorKind::Checksum);

  save_ensemble(e, path);
  corrupt(path, 8);  // version field
  const auto kind = kind_of([&] { read_ensemble(path); });
  CHECK((kind == ErrorKind::VersionMismatch || kind == ErrorKind::Checksum));

  save_ensemble(e, path);
  std::filesystem::resize_file(path, size / 2);
  const auto truncated = kind_of([&] { read_ensemble(path); });
  CHECK((truncated == ErrorKind::Checksum || truncated == ErrorKind::Io));
}

TEST_CASE("cache paths") {
  const auto e = synthetic(3, 3);
  const auto a = ensemble_cache_path("/c", e.parameters, 4.0, 3, 3);
  CHECK(a == ensemble_cache_path("/c", e.parameters, 4.0, 3, 3));
  CHECK(a != ensemble_cache_path("/c", e.parameters, 4.0, 3, 4));
  CHECK(a != ensemble_cache_path("/c", e.parameters, 1.0, 3, 3));
  auto p = e.parameters;
  p.wind_rms = 20;
  CHECK(a != ensemble_cache_path("/c", p, 4.0, 3, 3));
  CHECK(a.parent_path() == "/c");
  CHECK(ensemble_snapshot(e.parameters, 4.0, 3) == ensemble_snapshot(e.parameters, 4.0, 3));
}
