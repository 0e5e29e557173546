#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace tmsat {

using Complex = std::complex<double>;

/// Spectral standard deviation (rad/s) of the 0th-order Hermite-Gaussian
/// pulse whose intensity FWHM duration is `duration_s`.
double pulse_sigma(double duration_s);

/// Inverse of pulse_sigma.
double pulse_duration(double sigma);

/// Uniform angular-frequency grid centred on omega0, spanning
/// omega0 +/- span_sigmas*sigma with n_points samples (endpoints included).
class SpectralGrid {
 public:
  SpectralGrid(double omega0, double sigma, double span_sigmas, std::size_t n_points);

  double omega0() const noexcept { return omega0_; }
  double sigma() const noexcept { return sigma_; }
  double span_sigmas() const noexcept { return span_sigmas_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double spacing() const noexcept { return spacing_; }

  // Detuning omega - omega0, computed without cancellation.
  double detuning(std::size_t i) const noexcept;
  double omega(std::size_t i) const noexcept { return samples_[i]; }
  std::span<const double> samples() const noexcept { return samples_; }

  // Trapezoid weight of sample i including the 1/(2 pi) measure.
  double weight(std::size_t i) const noexcept;

  bool operator==(const SpectralGrid& other) const noexcept;

 private:
  double omega0_;
  double sigma_;
  double span_sigmas_;
  double spacing_;
  std::vector<double> samples_;
};

using GridPtr = std::shared_ptr<const SpectralGrid>;

inline constexpr double kDefaultSpanSigmas = 12.0;
inline constexpr std::size_t kDefaultSpectralPoints = 4096;
inline constexpr int kMaxInternalOrder = 48;

/// Validated grid construction; requires the grid to stay at positive
/// frequencies and at least 64 samples.
GridPtr build_grid(double omega0, double sigma, double span_sigmas = kDefaultSpanSigmas,
                   std::size_t n_points = kDefaultSpectralPoints);

class SpectralAmplitude {
 public:
  SpectralAmplitude(GridPtr grid, std::vector<Complex> values);

  const SpectralGrid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  std::span<Complex> values() noexcept { return values_; }
  Complex operator[](std::size_t i) const noexcept { return values_[i]; }

  SpectralAmplitude scaled(Complex factor) const;

 private:
  GridPtr grid_;
  std::vector<Complex> values_;
};

/// Fraction of the norm of the normalized Hermite function of order n that
/// lies outside |x| <= span (x in units of sigma), evaluated on a dense tail
/// quadrature independent of the spectral grid.
double hermite_tail_fraction(int n, double span);

/// Hermite-Gaussian spectral amplitude of order n, normalized to unit norm
/// under inner_product. Throws Truncation if the grid cuts off more than
/// 1e-6 of the mode's norm.
SpectralAmplitude hg_amplitude(int n, const GridPtr& grid);

/// (1/2pi) * integral conj(f) g d omega by the uniform trapezoid rule.
Complex inner_product(const SpectralAmplitude& f, const SpectralAmplitude& g);

}  // namespace tmsat
