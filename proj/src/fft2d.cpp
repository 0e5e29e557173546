#include "tmsat/fft2d.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "tmsat/error.hpp"

namespace tmsat {

namespace {
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

Fft2d::Fft2d(std::size_t n) : n_(n) {
  require(n >= 2, "FFT size must be at least 2");
  std::vector<std::complex<double>> scratch(n * n);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const int ni = static_cast<int>(n);
  std::lock_guard lock(planner_mutex());
  forward_plan_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  inverse_plan_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Fft2d::~Fft2d() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void Fft2d::forward(std::span<std::complex<double>> data) const {
  require(data.size() == n_ * n_, "FFT buffer has wrong size");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
}

void Fft2d::inverse(std::span<std::complex<double>> data) const {
  require(data.size() == n_ * n_, "FFT buffer has wrong size");
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), buf, buf);
}

const Fft2d& Fft2d::for_size(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<Fft2d>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Fft2d>(n);
  return *slot;
}

}  // namespace tmsat
