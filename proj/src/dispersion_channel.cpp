#include "tmsat/dispersion_channel.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tmsat/constants.hpp"
#include "tmsat/error.hpp"

namespace tmsat {

DispersionChannel::DispersionChannel(Kind kind, double omega0, double gdd, double tod,
                                     std::vector<Layer> layers)
    : kind_(kind), omega0_(omega0), gdd_(gdd), tod_(tod), layers_(std::move(layers)) {}

DispersionChannel DispersionChannel::atmospheric(const LayerStack& stack) {
  std::vector<Layer> layers;
  for (const auto& layer : stack.layers()) {
    // Layers at and above the dispersive top have n == 1 and contribute nothing.
    if (layer.h_lo >= kDispersiveTop) continue;
    layers.push_back({layer.h_lo, layer.slant_length, layer.coefficients.k1_excess});
  }
  return {Kind::Atmospheric, stack.omega0(), stack.total_gdd(), stack.total_tod(), std::move(layers)};
}

DispersionChannel DispersionChannel::vacuum(double omega0) {
  return {Kind::Synthetic, omega0, 0.0, 0.0, {}};
}

DispersionChannel DispersionChannel::synthetic(double omega0, double gdd, double tod) {
  require(omega0 > 0.0, "central frequency must be positive");
  return {Kind::Synthetic, omega0, gdd, tod, {}};
}

double DispersionChannel::phase(double omega) const {
  if (kind_ == Kind::Synthetic) {
    const double d = omega - omega0_;
    return 0.5 * gdd_ * d * d + tod_ * d * d * d / 6.0;
  }
  const double lambda_um = wavelength_from_omega(omega) * 1e6;
  double acc = 0.0;
  for (const auto& layer : layers_) {
    acc += layer.length * omega * (refractivity(lambda_um, layer.h_lo) / kSpeedOfLight - layer.k1_excess);
  }
  return acc;
}

std::vector<double> DispersionChannel::phase_samples(const SpectralGrid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (kind_ == Kind::Synthetic) {
      const double d = grid.detuning(i);
      out[i] = 0.5 * gdd_ * d * d + tod_ * d * d * d / 6.0;
    } else {
      out[i] = phase(grid.omega(i));
    }
  }
  return out;
}

namespace {

SpectralAmplitude apply_phase(const SpectralAmplitude& f, std::span<const double> phase, double sign) {
  std::vector<Complex> out(f.values().begin(), f.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::polar(1.0, sign * phase[i]);
  return {f.grid_ptr(), std::move(out)};
}

void check_channel_grid(const SpectralGrid& grid, double omega0) {
  if (std::abs(grid.omega0() - omega0) > 1e-12 * omega0) {
    throw Error(ErrorKind::IncompatibleGrid, "spectral grid is not centred on the channel frequency");
  }
}

}  // namespace

SpectralAmplitude propagate(const SpectralAmplitude& f, const DispersionChannel& channel) {
  check_channel_grid(f.grid(), channel.omega0());
  const auto phase = channel.phase_samples(f.grid());
  return apply_phase(f, phase, -1.0);
}

SpectralAmplitude propagate(const SpectralAmplitude& f, const LayerStack& stack, PropagationMode mode) {
  check_channel_grid(f.grid(), stack.omega0());
  if (mode == PropagationMode::Vacuum) return f;
  return propagate(f, DispersionChannel::atmospheric(stack));
}

SpectralAmplitude compensate_gdd(const SpectralAmplitude& received, double total_gdd) {
  const auto& grid = received.grid();
  std::vector<double> phase(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = grid.detuning(i);
    phase[i] = 0.5 * total_gdd * d * d;
  }
  return apply_phase(received, phase, +1.0);
}

SpectralAmplitude compensate_gdd(const SpectralAmplitude& received, const LayerStack& stack) {
  return compensate_gdd(received, stack.total_gdd());
}

AmplitudeMatrix crosstalk_matrix(const GridPtr& grid, std::span<const int> orders,
                                 const DispersionChannel& channel, bool compensated) {
  require(grid != nullptr, "null spectral grid");
  require(!orders.empty(), "crosstalk matrix needs at least one order");
  require(std::set<int>(orders.begin(), orders.end()).size() == orders.size(), "mode orders must be distinct");
  check_channel_grid(*grid, channel.omega0());

  auto phase = channel.phase_samples(*grid);
  if (compensated) {
    for (std::size_t i = 0; i < phase.size(); ++i) {
      const double d = grid->detuning(i);
      phase[i] -= 0.5 * channel.total_gdd() * d * d;
    }
  }

  std::vector<SpectralAmplitude> modes;
  modes.reserve(orders.size());
  for (int n : orders) modes.push_back(hg_amplitude(n, grid));

  const auto d = static_cast<Eigen::Index>(orders.size());
  Eigen::MatrixXcd c(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const SpectralAmplitude received = apply_phase(modes[col], phase, -1.0);
    for (Eigen::Index row = 0; row < d; ++row) c(row, col) = inner_product(modes[row], received);
  }
  return {std::vector<int>(orders.begin(), orders.end()), std::move(c)};
}

AmplitudeMatrix crosstalk_matrix(const GridPtr& grid, std::span<const int> orders,
                                 const LayerStack& stack, bool compensated) {
  return crosstalk_matrix(grid, orders, DispersionChannel::atmospheric(stack), compensated);
}

double tmm_coefficient(const GridPtr& grid, const DispersionChannel& channel, bool compensated) {
  const int zero[] = {0};
  return std::norm(crosstalk_matrix(grid, zero, channel, compensated).entries()(0, 0));
}

double tmm_coefficient(const GridPtr& grid, const LayerStack& stack, bool compensated) {
  return tmm_coefficient(grid, DispersionChannel::atmospheric(stack), compensated);
}

}  // namespace tmsat
