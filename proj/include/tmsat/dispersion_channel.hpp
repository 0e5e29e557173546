#pragma once

#include <span>
#include <vector>

#include "tmsat/amplitude_matrix.hpp"
#include "tmsat/atmosphere.hpp"
#include "tmsat/temporal_modes.hpp"

namespace tmsat {

enum class PropagationMode { FullPhase, Vacuum };

/// Spectral phase phi(omega) of a pure-phase dispersive channel; a received
/// amplitude is f(omega) * exp(-i phi(omega)). For the layered atmosphere the
/// group delay sum_q L_q k1_q is already removed, so phi is
///   sum_q L_q omega (N_q(omega)/c - (k1_q - 1/c))
/// with N_q the exact refractivity at the layer's lower boundary.
class DispersionChannel {
 public:
  static DispersionChannel atmospheric(const LayerStack& stack);
  static DispersionChannel vacuum(double omega0);
  // Synthetic quadratic (plus optional cubic) phase about omega0.
  static DispersionChannel synthetic(double omega0, double gdd, double tod = 0.0);

  double omega0() const noexcept { return omega0_; }
  // Sum_q k2_q L_q, the GDD removed by compensation.
  double total_gdd() const noexcept { return gdd_; }

  double phase(double omega) const;
  std::vector<double> phase_samples(const SpectralGrid& grid) const;

 private:
  struct Layer {
    double h_lo;
    double length;
    double k1_excess;
  };

  enum class Kind { Atmospheric, Synthetic };

  DispersionChannel(Kind kind, double omega0, double gdd, double tod, std::vector<Layer> layers);

  Kind kind_;
  double omega0_;
  double gdd_;
  double tod_;
  std::vector<Layer> layers_;
};

/// Propagates through the layered atmosphere with exact per-sample phase and
/// group-delay removal. Vacuum mode returns the input unchanged.
SpectralAmplitude propagate(const SpectralAmplitude& f, const LayerStack& stack,
                            PropagationMode mode = PropagationMode::FullPhase);
SpectralAmplitude propagate(const SpectralAmplitude& f, const DispersionChannel& channel);

/// Multiplies by exp(+i (omega-omega0)^2 Phi2 / 2); only the GDD is undone.
SpectralAmplitude compensate_gdd(const SpectralAmplitude& received, double total_gdd);
SpectralAmplitude compensate_gdd(const SpectralAmplitude& received, const LayerStack& stack);

/// c_{n, n_t} = <A_n | channel (and compensation) | A_{n_t}> over `orders`.
AmplitudeMatrix crosstalk_matrix(const GridPtr& grid, std::span<const int> orders,
                                 const DispersionChannel& channel, bool compensated);
AmplitudeMatrix crosstalk_matrix(const GridPtr& grid, std::span<const int> orders,
                                 const LayerStack& stack, bool compensated);

/// |<A_0 | received A_0>|^2, with or without GDD compensation.
double tmm_coefficient(const GridPtr& grid, const DispersionChannel& channel, bool compensated);
double tmm_coefficient(const GridPtr& grid, const LayerStack& stack, bool compensated);

}  // namespace tmsat
