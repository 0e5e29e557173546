#include "tmsat/temporal_modes.hpp"

#include <cmath>
#include <string>

#include "tmsat/constants.hpp"
#include "tmsat/error.hpp"

namespace tmsat {

double pulse_sigma(double duration_s) {
  require(duration_s > 0.0 && std::isfinite(duration_s), "pulse duration must be positive");
  return 2.0 * std::sqrt(std::log(2.0)) / duration_s;
}

double pulse_duration(double sigma) {
  require(sigma > 0.0 && std::isfinite(sigma), "spectral sigma must be positive");
  return 2.0 * std::sqrt(std::log(2.0)) / sigma;
}

SpectralGrid::SpectralGrid(double omega0, double sigma, double span_sigmas, std::size_t n_points)
    : omega0_(omega0), sigma_(sigma), span_sigmas_(span_sigmas) {
  require(n_points >= 2, "spectral grid needs at least two samples");
  require(span_sigmas > 0.0, "span_sigmas must be positive");
  require(sigma > 0.0, "sigma must be positive");
  const double half = span_sigmas * sigma;
  spacing_ = 2.0 * half / static_cast<double>(n_points - 1);
  samples_.resize(n_points);
  for (std::size_t i = 0; i < n_points; ++i) samples_[i] = omega0 + detuning(i);
}

double SpectralGrid::detuning(std::size_t i) const noexcept {
  // Symmetric about the centre index so that detuning(i) == -detuning(n-1-i).
  const double centre = 0.5 * static_cast<double>(samples_.size() - 1);
  return (static_cast<double>(i) - centre) * spacing_;
}

double SpectralGrid::weight(std::size_t i) const noexcept {
  const double w = (i == 0 || i + 1 == samples_.size()) ? 0.5 * spacing_ : spacing_;
  return w / kTwoPi;
}

bool SpectralGrid::operator==(const SpectralGrid& other) const noexcept {
  return omega0_ == other.omega0_ && sigma_ == other.sigma_ &&
         span_sigmas_ == other.span_sigmas_ && samples_.size() == other.samples_.size();
}

GridPtr build_grid(double omega0, double sigma, double span_sigmas, std::size_t n_points) {
  require(span_sigmas > 0.0, "span_sigmas must be positive");
  require(sigma > 0.0, "sigma must be positive");
  require(n_points >= 64, "spectral grid needs at least 64 samples");
  require(omega0 > span_sigmas * sigma, "spectral grid would reach non-positive frequencies");
  return std::make_shared<const SpectralGrid>(omega0, sigma, span_sigmas, n_points);
}

SpectralAmplitude::SpectralAmplitude(GridPtr grid, std::vector<Complex> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(grid_ != nullptr, "spectral amplitude needs a grid");
  require(values_.size() == grid_->size(), "sample count does not match grid",
          ErrorKind::IncompatibleGrid);
}

SpectralAmplitude SpectralAmplitude::scaled(Complex factor) const {
  std::vector<Complex> out(values_);
  for (auto& v : out) v *= factor;
  return {grid_, std::move(out)};
}

double hermite_tail_fraction(int n, double span) {
  // Orthonormal Hermite functions psi_n(x) by the stable recurrence; integrate
  // psi_n^2 over [span, span + 20] and double it (parity).
  constexpr double kStep = 1e-3;
  const double upper = span + 20.0;
  const auto steps = static_cast<std::size_t>((upper - span) / kStep);
  const double norm0 = std::pow(kPi, -0.25);
  double tail = 0.0;
  for (std::size_t s = 0; s <= steps; ++s) {
    const double x = span + static_cast<double>(s) * kStep;
    double prev = 0.0;
    double cur = norm0 * std::exp(-0.5 * x * x);
    for (int k = 0; k < n; ++k) {
      const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
      prev = cur;
      cur = next;
    }
    const double w = (s == 0 || s == steps) ? 0.5 * kStep : kStep;
    tail += w * cur * cur;
  }
  return 2.0 * tail;
}

SpectralAmplitude hg_amplitude(int n, const GridPtr& grid) {
  require(n >= 0, "mode order must be non-negative");
  require(grid != nullptr, "null spectral grid");
  const double tail = hermite_tail_fraction(n, grid->span_sigmas());
  if (tail > 1e-6) {
    throw Error(ErrorKind::Truncation, "grid truncates " + std::to_string(tail) +
                                           " of the norm of mode " + std::to_string(n));
  }

  const double sigma = grid->sigma();
  std::vector<Complex> values(grid->size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = grid->detuning(i) / sigma;
    // Physicists' Hermite polynomial by three-term recurrence.
    double h_prev = 1.0;
    double h = (n == 0) ? 1.0 : 2.0 * x;
    for (int k = 1; k < n; ++k) {
      const double h_next = 2.0 * x * h - 2.0 * k * h_prev;
      h_prev = h;
      h = h_next;
    }
    values[i] = h * std::exp(-0.5 * x * x);
  }

  double norm2 = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) norm2 += grid->weight(i) * std::norm(values[i]);
  const double scale = 1.0 / std::sqrt(norm2);
  for (auto& v : values) v *= scale;
  return {grid, std::move(values)};
}

Complex inner_product(const SpectralAmplitude& f, const SpectralAmplitude& g) {
  if (f.grid_ptr() != g.grid_ptr() && !(f.grid() == g.grid())) {
    throw Error(ErrorKind::IncompatibleGrid, "inner product of amplitudes on different grids");
  }
  const auto& grid = f.grid();
  Complex acc{0.0, 0.0};
  for (std::size_t i = 0; i < grid.size(); ++i) acc += grid.weight(i) * std::conj(f[i]) * g[i];
  return acc;
}

}  // namespace tmsat
