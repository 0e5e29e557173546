#include <doctest.h>

#include <cmath>
#include <complex>
#include <numeric>

#include "tmsat/error.hpp"
#include "tmsat/mub.hpp"
#include "tmsat/detection.hpp"
#include "tmsat/qkd.hpp"
#include "tmsat/sweep.hpp"

using namespace tmsat;
using Complex = std::complex<double>;

namespace {
// Direct transcription of the key-rate expression, for cross-checking.
double k1_oracle(double q, double d) {
  const double a = (d + 1) / d * q;
  return std::log2(d) + a * std::log2(q / (d * (d - 1))) + (1 - a) * std::log2(1 - a);
}

const std::vector<int> kOrders{0, 1, 2, 3, 4, 5, 6, 7, 8};
}  // namespace

TEST_CASE("MUB sets are complete, unitary and unbiased") {
  for (int d : {2, 3, 4, 5, 7, 8, 9}) {
    const auto m = build_mubs(d);
    REQUIRE(m.bases.size() == static_cast<std::size_t>(d + 1));
    CHECK(m.bases[0].isIdentity(0.0));
    for (std::size_t a = 0; a < m.bases.size(); ++a) {
      const Eigen::MatrixXcd g = m.bases[a].adjoint() * m.bases[a];
      CHECK((g - Eigen::MatrixXcd::Identity(d, d)).cwiseAbs().maxCoeff() < 1e-10);
      for (std::size_t b = a + 1; b < m.bases.size(); ++b) {
        const Eigen::MatrixXd o = (m.bases[a].adjoint() * m.bases[b]).cwiseAbs2();
        CHECK((o.array() - 1.0 / d).abs().maxCoeff() < 1e-9);
      }
    }
  }
}

TEST_CASE("unsupported dimensions") {
  try {
    build_mubs(6);
    FAIL("expected unsupported-dimension");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnsupportedDimension);
  }
  for (int d : {1, 10, 0}) {
    try {
      build_mubs(d);
      FAIL("expected out-of-range");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::OutOfRange);
    }
  }
}

TEST_CASE("per-basis channel probabilities") {
  const auto m = build_mubs(2);
  const auto id = AmplitudeMatrix::identity({0, 1});
  for (int b = 0; b < 3; ++b) CHECK(mub_channel_probabilities(id, m, b).isIdentity(1e-12));

  const double theta = 0.7;
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Identity(2, 2);
  c(1, 1) = std::polar(1.0, theta);
  const AmplitudeMatrix phase({0, 1}, c);
  const auto p0 = mub_channel_probabilities(phase, m, 0);
  CHECK(p0(1, 0) == 0.0);
  CHECK(p0(0, 1) == 0.0);
  for (int b = 1; b < 3; ++b) {
    const auto p = mub_channel_probabilities(phase, m, b);
    const double e = std::pow(std::sin(theta / 2), 2);
    CHECK(p(1, 0) == doctest::Approx(e).epsilon(1e-12));
    CHECK(p(0, 1) == doctest::Approx(e).epsilon(1e-12));
  }
  // Standard basis reproduces the plain crosstalk probabilities.
  Eigen::MatrixXcd r(3, 3);
  r << Complex(0.9, 0.1), Complex(0.1, 0), Complex(0, 0.2), Complex(0.05, -0.1), Complex(0.8, 0.3),
      Complex(0.1, 0.1), Complex(0, 0), Complex(-0.2, 0.1), Complex(0.7, -0.4);
  const AmplitudeMatrix rand({0, 1, 2}, r);
  CHECK((mub_channel_probabilities(rand, build_mubs(3), 0) - rand.probabilities()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(mub_channel_probabilities(rand, m, 0), Error);
}

TEST_CASE("average error") {
  const std::vector<double> zero{0, 0, 0};
  CHECK(average_error(zero) == 0.0);
  const std::vector<double> a{0.0, 0.1, 0.2};
  const std::vector<double> b{0.2, 0.0, 0.1};
  CHECK(average_error(a) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(average_error(a) == average_error(b));
}

TEST_CASE("key rate per photon") {
  for (int d : {2, 3, 4, 5, 7, 8, 9}) {
    const auto r = key_rate_per_photon(0.0, d);
    CHECK(std::abs(r.k1 - std::log2(d)) < 1e-12);
    CHECK_FALSE(r.clamped);
  }
  CHECK(key_rate_per_photon(0.0, 2).k1 == 1.0);
  CHECK(key_rate_per_photon(0.0, 8).k1 == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(key_rate_per_photon(0.05, 2).k1 == doctest::Approx(k1_oracle(0.05, 2)).epsilon(1e-13));
  CHECK(key_rate_per_photon(0.05, 2).k1 == doctest::Approx(0.4968).epsilon(1e-3));
  for (int d : {2, 5, 9}) {
    double prev = 1e9;
    bool clamped = false;
    for (int i = 0; i <= 1000; ++i) {
      const auto r = key_rate_per_photon(i * 1e-3, d);
      if (r.clamped) {
        clamped = true;
        CHECK(r.k1 == 0.0);
        continue;
      }
      CHECK_FALSE(clamped);  // once clamped, stays clamped over [0, 1]
      CHECK(r.k1 < prev);
      prev = r.k1;
    }
    CHECK(clamped);
  }
  const auto sat = key_rate_per_photon(0.9, 2);
  CHECK(sat.saturated);
  CHECK(sat.clamped);
  CHECK(sat.k1 == 0.0);
  CHECK_THROWS_AS(key_rate_per_photon(-0.1, 2), Error);
}

TEST_CASE("secret key rate") {
  CHECK(secret_key_rate(0.5, 0.8, 2.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(secret_key_rate(0.0, 0.8, 2.0) == 0.0);
  CHECK(secret_key_rate(0.5, 0.0, 2.0) == 0.0);
  CHECK(secret_key_rate(0.5, 0.8, 0.0) == 0.0);
}

TEST_CASE("TM protocol through a vacuum channel") {
  const auto id = AmplitudeMatrix::identity(kOrders);
  for (int d : {2, 3, 4, 5, 7, 8, 9}) {
    const std::vector<int> sub(kOrders.begin(), kOrders.begin() + d);
    ProtocolConfig cfg;
    cfg.encoding = Encoding::TemporalModes;
    cfg.subspace = sub;
    cfg.crosstalk = &id;
    cfg.eta1 = 0.0;
    cfg.c_mismatch = 0.42;
    const auto out = evaluate_protocol(cfg);
    // Zero up to the squared rounding of the MUB products.
    CHECK(out.q < 1e-28);
    for (double pe : out.p_e) CHECK(pe < 1e-28);
    CHECK(out.k == doctest::Approx(0.42 * 0.9 * std::log2(d)).epsilon(1e-14));
    CHECK(out.k == out.c_mismatch * out.t_avg * out.k1);
  }
}

TEST_CASE("OAM protocol with an identity ensemble") {
  const std::vector<int> labels{-4, -3, -2, -1, 0, 1, 2, 3, 4};
  std::vector<AmplitudeMatrix> ens(5, AmplitudeMatrix::identity(labels));
  for (int d : {2, 4, 8}) {
    const std::vector<int> sub(labels.begin(), labels.begin() + d);
    const auto out = evaluate_oam(ens, sub, build_mubs(d), 0.3);
    CHECK(out.q < 1e-28);
    CHECK(out.t_avg == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(out.k == doctest::Approx(0.3 * std::log2(d)).epsilon(1e-14));
  }
}

TEST_CASE("MUB relabeling invariance for a unitary channel") {
  // A random-looking unitary from the QR of a fixed matrix.
  Eigen::MatrixXcd a(3, 3);
  a << Complex(1, 0.2), Complex(0.3, -0.1), Complex(0.0, 0.5), Complex(-0.4, 0.1), Complex(0.9, 0.3),
      Complex(0.2, 0.2), Complex(0.1, -0.6), Complex(0.0, 0.1), Complex(0.7, 0.0);
  const Eigen::MatrixXcd q = Eigen::HouseholderQR<Eigen::MatrixXcd>(a).householderQ();
  const AmplitudeMatrix u({0, 1, 2}, q);
  const auto mubs = build_mubs(3);
  auto sum = [&](const MubSet& m) {
    const auto o = evaluate_tm(u, std::vector<int>{0, 1, 2}, m, 0.9, 0.05, 1.0);
    return std::accumulate(o.p_e.begin(), o.p_e.end(), 0.0);
  };
  MubSet shuffled = mubs;
  std::swap(shuffled.bases[1], shuffled.bases[3]);
  CHECK(sum(shuffled) == doctest::Approx(sum(mubs)).epsilon(1e-13));
}

TEST_CASE("TM key rate on the default channel") {
  const RunConfig cfg = default_config();
  const auto tm = compute_tm_channel(cfg, 3000.0);
  for (int d : {2, 4, 8}) {
    const auto mubs = build_mubs(d);
    double prev = 1e9;
    double at_03 = -1;
    for (int i = 0; i <= 30; ++i) {
      const double eta1 = 0.01 * i;
      const auto best = optimize_subspace(kOrders, d, Objective::MaximizeKeyRate, [&](std::span<const int> s) {
        return evaluate_tm(tm.compensated, s, mubs, 0.9, eta1, 0.5).k;
      });
      CHECK(best.score <= prev + 1e-15);
      prev = best.score;
      at_03 = best.score;
    }
    CHECK(at_03 == 0.0);
  }
  // Compensation helps the OAM rate through the temporal mismatch coefficient.
  CHECK(tm.c_tmm_compensated >= tm.c_tmm);
}
