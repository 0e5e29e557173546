#include <doctest.h>

#include <cmath>
#include <numeric>

#include "tmsat/atmosphere.hpp"
#include "tmsat/constants.hpp"
#include "tmsat/dispersion_channel.hpp"
#include "tmsat/error.hpp"
#include "tmsat/temporal_modes.hpp"

using namespace tmsat;

namespace {
const double kOmega0 = angular_frequency(1.064e-6);
const double kSigma = pulse_sigma(200e-15);
const std::vector<int> kOrders{0, 1, 2, 3, 4, 5, 6, 7, 8};

double max_dev_from_identity(const AmplitudeMatrix& m) {
  return (m.entries() - Eigen::MatrixXcd::Identity(m.size(), m.size())).cwiseAbs().maxCoeff();
}

double gdd_oracle(double gdd) {
  const double a = gdd * kSigma * kSigma / 2;
  return 1.0 / std::sqrt(1.0 + a * a);
}
}  // namespace

TEST_CASE("propagation is a pure phase") {
  const auto g = build_grid(kOmega0, kSigma);
  const auto stack = build_layers(0.0, 500e3, 0.0, kOmega0);
  for (int n : {0, 3, 8}) {
    const auto f = hg_amplitude(n, g);
    const auto out = propagate(f, stack);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(std::abs(out[i]) - std::abs(f[i])) < 1e-15);
    CHECK(std::abs(inner_product(out, out) - 1.0) < 1e-12);
  }
  const auto f0 = hg_amplitude(0, g);
  CHECK(std::norm(inner_product(f0, propagate(f0, stack))) < 1.0);
  const auto same = propagate(f0, stack, PropagationMode::Vacuum);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(same[i] == f0[i]);
}

TEST_CASE("group delay is removed") {
  // After removal the phase has zero slope at omega0 (central difference).
  const auto stack = build_layers(0.0, 500e3, 0.0, kOmega0);
  const auto ch = DispersionChannel::atmospheric(stack);
  const double dw = 1e-3 * kSigma;
  const double slope = (ch.phase(kOmega0 + dw) - ch.phase(kOmega0 - dw)) / (2 * dw);
  const double curvature = (ch.phase(kOmega0 + dw) - 2 * ch.phase(kOmega0) + ch.phase(kOmega0 - dw)) / (dw * dw);
  CHECK(std::abs(slope) < 1e-6 * 500e3 / kSpeedOfLight);
  CHECK(curvature == doctest::Approx(stack.total_gdd()).epsilon(1e-4));
}

TEST_CASE("vacuum channel is the identity") {
  const auto g = build_grid(kOmega0, kSigma);
  const auto c = crosstalk_matrix(g, kOrders, DispersionChannel::vacuum(kOmega0), false);
  CHECK(max_dev_from_identity(c) < 1e-10);
  CHECK(tmm_coefficient(g, DispersionChannel::vacuum(kOmega0), false) == doctest::Approx(1.0).epsilon(1e-10));
  // Ground 1 m below the dispersive top leaves a single 1 m layer.
  const auto high = build_layers(99999.0, 500e3, 0.0, kOmega0);
  CHECK(tmm_coefficient(g, high, false) > 1.0 - 1e-6);
}

TEST_CASE("synthetic GDD matches the Gaussian overlap oracle") {
  const auto g = build_grid(kOmega0, kSigma);
  for (double alpha : {1e-2, 1e-1, 1.0, 10.0, 100.0}) {
    const double gdd = 2 * alpha / (kSigma * kSigma);
    const auto ch = DispersionChannel::synthetic(kOmega0, gdd);
    CHECK(std::abs(tmm_coefficient(g, ch, false) - gdd_oracle(gdd)) < 1e-6);
    CHECK(max_dev_from_identity(crosstalk_matrix(g, kOrders, ch, true)) < 1e-10);
    // Restoring the input sample by sample.
    const auto f = hg_amplitude(5, g);
    const auto back = compensate_gdd(propagate(f, ch), gdd);
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) worst = std::max(worst, std::abs(back[i] - f[i]));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("opposite parity does not couple under an even phase") {
  const auto g = build_grid(kOmega0, kSigma);
  const auto c = crosstalk_matrix(g, kOrders, DispersionChannel::synthetic(kOmega0, 1e-25), false);
  for (int n = 0; n <= 8; ++n)
    for (int m = 0; m <= 8; ++m)
      if ((n + m) % 2) CHECK(std::abs(c.at(n, m)) < 1e-9);
}

TEST_CASE("default channel") {
  const auto g = build_grid(kOmega0, kSigma);
  for (double h0 : {0.0, 3000.0}) {
    const auto stack = build_layers(h0, 500e3, 0.0, kOmega0);
    const double u = tmm_coefficient(g, stack, false);
    const double c = tmm_coefficient(g, stack, true);
    CHECK(u < 1.0);
    CHECK(c > u);
    // GDD dominates: the uncompensated overlap is close to the pure-GDD oracle.
    CHECK(u == doctest::Approx(gdd_oracle(stack.total_gdd())).epsilon(0.01));

    const auto p = crosstalk_matrix(g, kOrders, stack, false).probabilities();
    CHECK((p - p.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    for (int j = 0; j <= 8; ++j) CHECK(p.col(j).sum() <= 1.0 + 1e-9);
  }
}

TEST_CASE("completeness of the compensated channel") {
  const auto g = build_grid(kOmega0, kSigma);
  std::vector<int> all(kMaxInternalOrder + 1);
  std::iota(all.begin(), all.end(), 0);
  for (double h0 : {0.0, 3000.0}) {
    const auto stack = build_layers(h0, 500e3, 0.0, kOmega0);
    const auto pc = crosstalk_matrix(g, all, stack, true).probabilities();
    for (int j = 0; j <= 8; ++j) CHECK(pc.col(j).sum() >= 0.99);
    // Without compensation the pulse leaves the span of low orders; more orders capture more.
    const auto pu = crosstalk_matrix(g, all, stack, false).probabilities();
    for (int j = 0; j <= 8; ++j) {
      CHECK(pu.col(j).sum() <= 1.0 + 1e-9);
      CHECK(pu.col(j).head(49).sum() > pu.col(j).head(9).sum());
    }
  }
}

TEST_CASE("errors") {
  const auto g = build_grid(kOmega0, kSigma);
  const std::vector<int> dup{1, 1};
  CHECK_THROWS_AS(crosstalk_matrix(g, dup, DispersionChannel::vacuum(kOmega0), false), Error);
  const auto other = build_grid(kOmega0 * 1.01, kSigma);
  try {
    (void)propagate(hg_amplitude(0, other), build_layers(0.0, 500e3, 0.0, kOmega0));
    FAIL("expected incompatible-grid");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompatibleGrid);
  }
}
