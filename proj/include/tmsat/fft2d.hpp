#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tmsat {

/// Square 2-D complex FFT (FFTW, unnormalized in both directions) on
/// row-major n x n data. Plans are created under a global lock; execution is
/// thread-safe for distinct data arrays.
class Fft2d {
 public:
  explicit Fft2d(std::size_t n);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  std::size_t size() const noexcept { return n_; }
  void forward(std::span<std::complex<double>> data) const;
  void inverse(std::span<std::complex<double>> data) const;

  // Per-thread plan cache.
  static const Fft2d& for_size(std::size_t n);

 private:
  std::size_t n_;
  void* forward_plan_;
  void* inverse_plan_;
};

}  // namespace tmsat
