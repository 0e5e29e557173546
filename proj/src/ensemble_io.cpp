#include "tmsat/ensemble_io.hpp"

#include <boost/crc.hpp>
#include <json.hpp>

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "tmsat/error.hpp"

namespace tmsat {

static_assert(std::endian::native == std::endian::little, "cache format assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'T', 'M', 'S', 'A', 'T', 'E', 'N', 'S'};

class Writer {
 public:
  template <typename T>
  void put(const T& v) {
    const auto* p = reinterpret_cast<const char*>(&v);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_bytes(const char* p, std::size_t n) { bytes_.insert(bytes_.end(), p, p + n); }
  std::vector<char>& bytes() { return bytes_; }

 private:
  std::vector<char> bytes_;
};

class Reader {
 public:
  Reader(const std::vector<char>& bytes, std::size_t end, const std::string& path)
      : bytes_(bytes), end_(end), path_(path) {}
  template <typename T>
  T get() {
    T v;
    std::memcpy(&v, take(sizeof(T)), sizeof(T));
    return v;
  }
  const char* take(std::size_t n) {
    if (n > end_ - pos_) throw Error(ErrorKind::Io, path_ + ": truncated ensemble cache");
    const char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  const std::vector<char>& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::string path_;
};

std::uint32_t crc32(const char* data, std::size_t n) {
  boost::crc_32_type crc;
  crc.process_bytes(data, n);
  return crc.checksum();
}

}  // namespace

std::string ensemble_snapshot(const TurbulenceParameters& p, double aperture_radius, std::size_t count) {
  // nlohmann::json objects keep keys sorted, so dump() is canonical.
  nlohmann::json j;
  j["wavelength"] = p.wavelength;
  j["beam_waist"] = p.beam_waist;
  j["ground_altitude"] = p.ground_altitude;
  j["satellite_altitude"] = p.satellite_altitude;
  j["zenith_angle"] = p.zenith_angle;
  j["ground_strength"] = p.ground_strength;
  j["wind_rms"] = p.wind_rms;
  j["outer_scale"] = p.scales.outer_scale;
  j["inner_scale"] = p.scales.inner_scale;
  j["turbulence_top"] = p.turbulence_top;
  j["screen_count"] = p.screen_count;
  j["subharmonic_levels"] = p.subharmonic_levels;
  j["n_xy"] = p.n_xy;
  j["source_extent"] = p.source_extent;
  j["receiver_extent"] = p.receiver_extent;
  j["max_step"] = p.max_step;
  j["l_values"] = p.l_values;
  j["aperture_radius"] = aperture_radius;
  j["count"] = count;
  return j.dump();
}

void save_ensemble(const TurbulenceEnsemble& ensemble, const std::filesystem::path& path) {
  require(!ensemble.realizations.empty(), "cannot cache an empty ensemble");
  const std::string snapshot =
      ensemble_snapshot(ensemble.parameters, ensemble.aperture_radius, ensemble.realizations.size());
  const auto& labels = ensemble.realizations.front().oam.labels();
  Writer w;
  w.put_bytes(kMagic, sizeof kMagic);
  w.put(kEnsembleFormatVersion);
  w.put(static_cast<std::uint64_t>(snapshot.size()));
  w.put_bytes(snapshot.data(), snapshot.size());
  w.put(ensemble.seed);
  w.put(static_cast<std::uint64_t>(ensemble.realizations.size()));
  w.put(static_cast<std::uint64_t>(labels.size()));
  for (int l : labels) w.put(static_cast<std::int32_t>(l));
  for (const auto& r : ensemble.realizations) {
    require(r.oam.labels() == labels, "realizations disagree on mode labels");
    w.put(r.smm);
    const auto& m = r.oam.entries();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      for (Eigen::Index row = 0; row < m.rows(); ++row) {
        w.put(m(row, c).real());
        w.put(m(row, c).imag());
      }
    }
  }
  auto& bytes = w.bytes();
  w.put(crc32(bytes.data(), bytes.size()));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, tmp + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, tmp + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, path.string() + ": " + ec.message());
}

namespace {

struct Loaded {
  std::string snapshot;
  TurbulenceEnsemble ensemble;
};

Loaded read_file(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, name + ": cannot open ensemble cache");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof kMagic + 4 + 4 || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::Io, name + ": not an ensemble cache file");
  }
  const std::size_t body = bytes.size() - 4;
  std::uint32_t stored;
  std::memcpy(&stored, bytes.data() + body, 4);
  if (crc32(bytes.data(), body) != stored) throw Error(ErrorKind::Checksum, name + ": checksum mismatch");

  Reader r(bytes, body, name);
  r.take(sizeof kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kEnsembleFormatVersion) {
    throw Error(ErrorKind::VersionMismatch, name + ": format version " + std::to_string(version) +
                                                ", expected " + std::to_string(kEnsembleFormatVersion));
  }
  Loaded out;
  const auto snap_len = r.get<std::uint64_t>();
  const char* snap = r.take(snap_len);
  out.snapshot.assign(snap, snap_len);
  out.ensemble.seed = r.get<std::uint64_t>();
  const auto count = r.get<std::uint64_t>();
  const auto n_labels = r.get<std::uint64_t>();
  std::vector<int> labels;
  for (std::uint64_t i = 0; i < n_labels; ++i) labels.push_back(r.get<std::int32_t>());
  const auto d = static_cast<Eigen::Index>(n_labels);
  for (std::uint64_t k = 0; k < count; ++k) {
    const double smm = r.get<double>();
    Eigen::MatrixXcd m(d, d);
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index row = 0; row < d; ++row) {
        const double re = r.get<double>();
        const double im = r.get<double>();
        m(row, c) = {re, im};
      }
    }
    out.ensemble.realizations.push_back({AmplitudeMatrix(labels, std::move(m)), smm});
  }

  const auto j = nlohmann::json::parse(out.snapshot);
  auto& p = out.ensemble.parameters;
  p.wavelength = j.at("wavelength");
  p.beam_waist = j.at("beam_waist");
  p.ground_altitude = j.at("ground_altitude");
  p.satellite_altitude = j.at("satellite_altitude");
  p.zenith_angle = j.at("zenith_angle");
  p.ground_strength = j.at("ground_strength");
  p.wind_rms = j.at("wind_rms");
  p.scales = {j.at("outer_scale"), j.at("inner_scale")};
  p.turbulence_top = j.at("turbulence_top");
  p.screen_count = j.at("screen_count");
  p.subharmonic_levels = j.at("subharmonic_levels");
  p.n_xy = j.at("n_xy");
  p.source_extent = j.at("source_extent");
  p.receiver_extent = j.at("receiver_extent");
  p.max_step = j.at("max_step");
  p.l_values = j.at("l_values").get<std::vector<int>>();
  out.ensemble.aperture_radius = j.at("aperture_radius");
  return out;
}

}  // namespace

TurbulenceEnsemble read_ensemble(const std::filesystem::path& path) { return read_file(path).ensemble; }

TurbulenceEnsemble load_ensemble(const std::filesystem::path& path, const TurbulenceParameters& expected,
                                 double aperture_radius, std::size_t count, std::uint64_t seed) {
  auto loaded = read_file(path);
  if (loaded.snapshot != ensemble_snapshot(expected, aperture_radius, count)) {
    throw Error(ErrorKind::ParameterMismatch, path.string() + ": cached ensemble was built with different parameters");
  }
  if (loaded.ensemble.seed != seed) {
    throw Error(ErrorKind::ParameterMismatch, path.string() + ": cached ensemble has seed " +
                                                  std::to_string(loaded.ensemble.seed) + ", expected " +
                                                  std::to_string(seed));
  }
  return std::move(loaded.ensemble);
}

std::filesystem::path ensemble_cache_path(const std::filesystem::path& directory, const TurbulenceParameters& parameters,
                                          double aperture_radius, std::size_t count, std::uint64_t seed) {
  const std::string snapshot = ensemble_snapshot(parameters, aperture_radius, count);
  char name[64];
  std::snprintf(name, sizeof name, "ensemble-%08x-%llu.bin", crc32(snapshot.data(), snapshot.size()),
                static_cast<unsigned long long>(seed));
  return directory / name;
}

}  // namespace tmsat
