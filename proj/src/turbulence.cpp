#include "tmsat/turbulence.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include "tmsat/constants.hpp"
#include "tmsat/error.hpp"
#include "tmsat/fft2d.hpp"

namespace tmsat {

double TransverseGrid::wavenumber() const noexcept { return kTwoPi / wavelength; }

void TransverseGrid::validate() const {
  require(n_xy >= 8 && (n_xy & (n_xy - 1)) == 0, "transverse grid size must be a power of two");
  require(extent > 0.0, "transverse grid extent must be positive");
  require(wavelength > 0.0, "wavelength must be positive");
}

TransverseField::TransverseField(TransverseGrid grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.n_xy * grid_.n_xy, "field sample count does not match grid");
}

TransverseField::TransverseField(TransverseGrid grid)
    : grid_(grid), values_(grid.n_xy * grid.n_xy, Complex{0.0, 0.0}) {}

double TransverseField::power() const noexcept {
  CompensatedSum acc;
  for (const auto& v : values_) acc.add(std::norm(v));
  const double dx = grid_.spacing();
  return acc.value() * dx * dx;
}

double TransverseField::boundary_power_fraction(double band) const noexcept {
  const std::size_t n = grid_.n_xy;
  const auto margin = static_cast<std::size_t>(std::ceil(band * static_cast<double>(n)));
  double edge = 0.0;
  double total = 0.0;
  for (std::size_t iy = 0; iy < n; ++iy) {
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double p = std::norm(at(ix, iy));
      total += p;
      if (ix < margin || iy < margin || ix >= n - margin || iy >= n - margin) edge += p;
    }
  }
  return total > 0.0 ? edge / total : 0.0;
}

double TransverseField::second_moment_radius() const noexcept {
  const std::size_t n = grid_.n_xy;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double y = grid_.coordinate(iy);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = grid_.coordinate(ix);
      const double p = std::norm(at(ix, iy));
      num += (x * x + y * y) * p;
      den += p;
    }
  }
  return std::sqrt(2.0 * num / den);
}

TransverseField lg_mode(int l, double waist, const TransverseGrid& grid) {
  grid.validate();
  require(std::abs(l) <= 4, "OAM number must satisfy |l| <= 4");
  require(waist > 0.0, "beam waist must be positive");
  const double dx = grid.spacing();
  if (waist < 3.0 * dx) {
    throw Error(ErrorKind::Resolution, "beam waist " + std::to_string(waist) +
                                           " m is not resolved by spacing " + std::to_string(dx) + " m");
  }
  const std::size_t n = grid.n_xy;
  const int al = std::abs(l);
  TransverseField field(grid);
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double y = grid.coordinate(iy);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = grid.coordinate(ix);
      const double r2 = x * x + y * y;
      const double rho = std::sqrt(2.0 * r2) / waist;
      const double phi = std::atan2(y, x);
      field.at(ix, iy) = std::pow(rho, al) * std::exp(-r2 / (waist * waist)) * std::polar(1.0, l * phi);
    }
  }
  const double scale = 1.0 / std::sqrt(field.power());
  for (auto& v : field.values()) v *= scale;
  if (field.boundary_power_fraction() >= 1e-4) {
    throw Error(ErrorKind::Resolution, "LG mode l=" + std::to_string(l) + " does not fit in a " +
                                           std::to_string(grid.extent) + " m grid");
  }
  return field;
}

Complex aperture_overlap(const TransverseField& a, const TransverseField& b, double aperture_radius) {
  const auto& g = a.grid();
  require(g.n_xy == b.grid().n_xy && g.extent == b.grid().extent,
          "overlap of fields on different grids", ErrorKind::IncompatibleGrid);
  const std::size_t n = g.n_xy;
  const double r2max = aperture_radius * aperture_radius;
  Complex acc{0.0, 0.0};
  for (std::size_t iy = 0; iy < n; ++iy) {
    const double y = g.coordinate(iy);
    for (std::size_t ix = 0; ix < n; ++ix) {
      const double x = g.coordinate(ix);
      if (aperture_radius > 0.0 && x * x + y * y > r2max) continue;
      acc += std::conj(a.at(ix, iy)) * b.at(ix, iy);
    }
  }
  const double dx = g.spacing();
  return acc * (dx * dx);
}

double von_karman_phase_psd(double f, const VonKarmanScales& scales) {
  const double fm = 5.92 / (kTwoPi * scales.inner_scale);
  const double f0 = 1.0 / scales.outer_scale;
  return 0.023 * std::exp(-(f / fm) * (f / fm)) / std::pow(f * f + f0 * f0, 11.0 / 6.0);
}

double fried_parameter(double cn2_path_integral, double wavelength) {
  require(cn2_path_integral >= 0.0, "Cn^2 integral must be non-negative");
  if (cn2_path_integral == 0.0) return std::numeric_limits<double>::infinity();
  const double k = kTwoPi / wavelength;
  return std::pow(0.423 * k * k * cn2_path_integral, -3.0 / 5.0);
}

std::vector<ScreenSlab> place_screens(const HufnagelValley& profile, double ground_altitude,
                                      double turbulence_top, int count, double zenith_angle) {
  require(count >= 1, "screen count must be positive");
  require(turbulence_top > ground_altitude, "turbulence top must lie above the ground");
  const double total = profile.integral(ground_altitude, turbulence_top);
  const double sec = 1.0 / std::cos(zenith_angle);

  // Altitude at which the cumulative integral from the ground reaches `target`.
  auto invert = [&](double target) {
    double lo = ground_altitude;
    double hi = turbulence_top;
    for (int it = 0; it < 200 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (profile.integral(ground_altitude, mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  std::vector<ScreenSlab> slabs;
  double lo = ground_altitude;
  for (int k = 0; k < count; ++k) {
    const double hi = (k + 1 == count) ? turbulence_top : invert(total * (k + 1) / count);
    const double at = invert(total * (k + 0.5) / count);
    slabs.push_back({lo, hi, at, profile.integral(lo, hi) * sec});
    lo = hi;
  }
  std::reverse(slabs.begin(), slabs.end());
  return slabs;
}

PhaseScreen generate_screen(const ScreenSlab& slab, const TransverseGrid& grid,
                            const VonKarmanScales& scales, std::uint64_t seed,
                            int subharmonic_levels) {
  grid.validate();
  require(slab.cn2_path_integral >= 0.0, "Cn^2 integral must be non-negative");
  require(subharmonic_levels >= 0, "subharmonic levels must be non-negative");
  const std::size_t n = grid.n_xy;
  PhaseScreen screen{grid, std::vector<double>(n * n, 0.0), slab,
                     fried_parameter(slab.cn2_path_integral, grid.wavelength)};
  if (slab.cn2_path_integral == 0.0) return screen;

  const double r0_53 = std::pow(screen.r0, -5.0 / 3.0);
  const double dx = grid.spacing();
  const double side = static_cast<double>(n) * dx;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  // High-frequency part on the FFT lattice.
  const double df = 1.0 / side;
  std::vector<Complex> spectrum(n * n);
  for (std::size_t ky = 0; ky < n; ++ky) {
    const double fy = (ky < n / 2 ? static_cast<double>(ky) : static_cast<double>(ky) - n) * df;
    for (std::size_t kx = 0; kx < n; ++kx) {
      const double fx = (kx < n / 2 ? static_cast<double>(kx) : static_cast<double>(kx) - n) * df;
      const double re = normal(rng);
      const double im = normal(rng);
      const double f = std::hypot(fx, fy);
      const double amp = (kx == 0 && ky == 0) ? 0.0 : std::sqrt(r0_53 * von_karman_phase_psd(f, scales)) * df;
      spectrum[ky * n + kx] = Complex{re, im} * amp;
    }
  }
  Fft2d::for_size(n).inverse(spectrum);
  for (std::size_t i = 0; i < n * n; ++i) screen.phase[i] = spectrum[i].real();

  // Low-frequency subharmonics on successively finer 3x3 lattices.
  std::vector<double> low(n * n, 0.0);
  std::vector<Complex> px(n), py(n);
  for (int p = 1; p <= subharmonic_levels; ++p) {
    const double dfp = 1.0 / (std::pow(3.0, p) * side);
    for (int jy = -1; jy <= 1; ++jy) {
      for (int jx = -1; jx <= 1; ++jx) {
        const double re = normal(rng);
        const double im = normal(rng);
        if (jx == 0 && jy == 0) continue;
        const double fx = jx * dfp;
        const double fy = jy * dfp;
        const Complex cn =
            Complex{re, im} * (std::sqrt(r0_53 * von_karman_phase_psd(std::hypot(fx, fy), scales)) * dfp);
        for (std::size_t i = 0; i < n; ++i) {
          px[i] = std::polar(1.0, kTwoPi * fx * grid.coordinate(i));
          py[i] = std::polar(1.0, kTwoPi * fy * grid.coordinate(i));
        }
        for (std::size_t iy = 0; iy < n; ++iy)
          for (std::size_t ix = 0; ix < n; ++ix) low[iy * n + ix] += (cn * px[ix] * py[iy]).real();
      }
    }
  }
  CompensatedSum mean_low;
  for (double v : low) mean_low.add(v);
  const double offset = mean_low.value() / static_cast<double>(n * n);

  CompensatedSum mean_all;
  for (std::size_t i = 0; i < n * n; ++i) {
    screen.phase[i] += low[i] - offset;
    mean_all.add(screen.phase[i]);
  }
  const double residual = mean_all.value() / static_cast<double>(n * n);
  for (double& v : screen.phase) v -= residual;
  return screen;
}

PropagationPlan::PropagationPlan(const PropagationGeometry& geometry, std::span<const double> screen_distances)
    : geometry_(geometry) {
  require(geometry.path_length >= 0.0, "path length must be non-negative");
  require(geometry.source_extent > 0.0 && geometry.receiver_extent > 0.0, "grid extents must be positive");
  TransverseGrid{geometry.n_xy, geometry.source_extent, geometry.wavelength}.validate();
  const double n = static_cast<double>(geometry.n_xy);
  const double d1 = geometry.source_extent / n;
  const double dn = geometry.receiver_extent / n;
  const double max_step = geometry.max_step > 0.0
                              ? geometry.max_step
                              : std::min(d1, dn) * std::min(d1, dn) * n / geometry.wavelength;
  const double length = geometry.path_length;
  auto spacing_at = [&](double z) { return length > 0.0 ? d1 + (dn - d1) * (z / length) : d1; };
  if (length == 0.0) {
    require(screen_distances.empty(), "screens need a positive path length", ErrorKind::InvalidGeometry);
    planes_.push_back({0.0, d1, -1});
    return;
  }

  std::vector<std::pair<double, int>> marks;
  marks.emplace_back(0.0, -1);
  for (std::size_t s = 0; s < screen_distances.size(); ++s) {
    const double z = screen_distances[s];
    require(z > 0.0 && z < length, "screen must lie strictly between source and receiver",
            ErrorKind::InvalidGeometry);
    if (s > 0) require(z > screen_distances[s - 1], "screens must be ordered from the source",
                       ErrorKind::InvalidGeometry);
    marks.emplace_back(z, static_cast<int>(s));
  }
  marks.emplace_back(length, -1);
  screen_count_ = screen_distances.size();

  // Subdivide any gap longer than the maximum step with vacuum planes.
  planes_.push_back({0.0, spacing_at(0.0), -1});
  for (std::size_t i = 1; i < marks.size(); ++i) {
    const double z0 = marks[i - 1].first;
    const double z1 = marks[i].first;
    const auto pieces = static_cast<int>(std::ceil((z1 - z0) / max_step));
    for (int p = 1; p < pieces; ++p) {
      const double z = z0 + (z1 - z0) * p / pieces;
      planes_.push_back({z, spacing_at(z), -1});
    }
    planes_.push_back({z1, spacing_at(z1), marks[i].second});
  }
}

TransverseGrid PropagationPlan::grid_at(std::size_t plane) const noexcept {
  return {geometry_.n_xy, planes_[plane].spacing * static_cast<double>(geometry_.n_xy), geometry_.wavelength};
}

std::size_t PropagationPlan::screen_plane(std::size_t s) const {
  for (std::size_t i = 0; i < planes_.size(); ++i)
    if (planes_[i].screen == static_cast<int>(s)) return i;
  throw Error(ErrorKind::OutOfRange, "screen index " + std::to_string(s) + " not in plan");
}

TransverseField split_step_propagate(const TransverseField& source, const PropagationPlan& plan,
                                     std::span<const PhaseScreen> screens) {
  const auto& geo = plan.geometry();
  const std::size_t n = geo.n_xy;
  const TransverseGrid g0 = plan.source_grid();
  require(source.grid().n_xy == n && std::abs(source.grid().extent - g0.extent) <= 1e-12 * g0.extent,
          "source field is not on the plan's source grid", ErrorKind::IncompatibleGrid);
  require(screens.empty() || screens.size() == plan.screen_count(), "screen list does not match plan");
  for (std::size_t s = 0; s < screens.size(); ++s) {
    require(screens[s].grid.n_xy == n, "screen has wrong sampling", ErrorKind::IncompatibleGrid);
  }

  const auto planes = plan.planes();
  const double k = g0.wavenumber();
  const double input_power = source.power();
  std::vector<Complex> u(source.values().begin(), source.values().end());
  if (planes.size() < 2 || planes.back().z == 0.0) return source;

  const Fft2d& fft = Fft2d::for_size(n);
  const double nn = static_cast<double>(n);

  auto quadratic = [&](double spacing, double coeff) {
    for (std::size_t iy = 0; iy < n; ++iy) {
      const double y = (static_cast<double>(iy) - 0.5 * nn) * spacing;
      for (std::size_t ix = 0; ix < n; ++ix) {
        const double x = (static_cast<double>(ix) - 0.5 * nn) * spacing;
        u[iy * n + ix] *= std::polar(1.0, coeff * (x * x + y * y));
      }
    }
  };

  const double dz_first = planes[1].z - planes[0].z;
  const double m_first = planes[1].spacing / planes[0].spacing;
  quadratic(planes[0].spacing, 0.5 * k * (1.0 - m_first) / dz_first);

  double m_last = 1.0;
  double dz_last = dz_first;
  for (std::size_t i = 0; i + 1 < planes.size(); ++i) {
    const double dz = planes[i + 1].z - planes[i].z;
    const double m = planes[i + 1].spacing / planes[i].spacing;
    const double df = 1.0 / (nn * planes[i].spacing);
    fft.forward(u);
    const double coeff = -2.0 * kPi * kPi * dz / (m * k);
    const double scale = 1.0 / (m * nn * nn);
    for (std::size_t ky = 0; ky < n; ++ky) {
      const double fy = (ky < n / 2 ? static_cast<double>(ky) : static_cast<double>(ky) - nn) * df;
      for (std::size_t kx = 0; kx < n; ++kx) {
        const double fx = (kx < n / 2 ? static_cast<double>(kx) : static_cast<double>(kx) - nn) * df;
        u[ky * n + kx] *= std::polar(scale, coeff * (fx * fx + fy * fy));
      }
    }
    fft.inverse(u);
    const int s = planes[i + 1].screen;
    if (s >= 0 && !screens.empty()) {
      const auto& phase = screens[static_cast<std::size_t>(s)].phase;
      for (std::size_t p = 0; p < n * n; ++p) u[p] *= std::polar(1.0, phase[p]);
    }
    m_last = m;
    dz_last = dz;
  }
  quadratic(planes.back().spacing, 0.5 * k * (m_last - 1.0) / (m_last * dz_last));

  TransverseField out(plan.receiver_grid(), std::move(u));
  const double drift = std::abs(out.power() - input_power) / input_power;
  if (drift > 1e-6) {
    throw Error(ErrorKind::GridExtent, "split-step power drift " + std::to_string(drift));
  }
  const double edge = out.boundary_power_fraction();
  if (edge > 1e-3) {
    throw Error(ErrorKind::GridExtent, "received field has " + std::to_string(edge) +
                                           " of its power at the grid boundary");
  }
  return out;
}

AmplitudeMatrix conjugation_correct(const AmplitudeMatrix& matrix) {
  const auto& c = matrix.entries();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) < 1e-14) {
    throw Error(ErrorKind::DegenerateChannel, "channel matrix is numerically zero");
  }
  // C = W S V^H, unitary factor U = W V^H; U^H C = V S V^H.
  const Eigen::MatrixXcd& v = svd.matrixV();
  Eigen::MatrixXcd p = v * sv.cast<Complex>().asDiagonal() * v.adjoint();
  return {matrix.labels(), std::move(p)};
}

double TurbulenceParameters::path_length() const {
  return (satellite_altitude - ground_altitude) / std::cos(zenith_angle);
}

namespace {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t sub) {
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(sub)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<double> screen_distances(const TurbulenceParameters& p, std::span<const ScreenSlab> slabs) {
  std::vector<double> z;
  for (const auto& slab : slabs) z.push_back((p.satellite_altitude - slab.altitude) / std::cos(p.zenith_angle));
  return z;
}

}  // namespace

TurbulenceSimulator::TurbulenceSimulator(TurbulenceParameters parameters)
    : parameters_(std::move(parameters)),
      slabs_(place_screens(HufnagelValley{parameters_.ground_strength, parameters_.wind_rms},
                           parameters_.ground_altitude, parameters_.turbulence_top, parameters_.screen_count,
                           parameters_.zenith_angle)),
      plan_(PropagationGeometry{parameters_.n_xy, parameters_.wavelength, parameters_.source_extent,
                                parameters_.receiver_extent, parameters_.path_length(), parameters_.max_step},
            screen_distances(parameters_, slabs_)) {
  require(std::find(parameters_.l_values.begin(), parameters_.l_values.end(), 0) != parameters_.l_values.end(),
          "OAM mode set must contain l = 0");
  for (int l : parameters_.l_values) {
    source_modes_.push_back(lg_mode(l, parameters_.beam_waist, plan_.source_grid()));
    vacuum_modes_.push_back(split_step_propagate(source_modes_.back(), plan_, {}));
  }
}

std::vector<PhaseScreen> TurbulenceSimulator::screens(std::uint64_t seed, std::uint64_t index) const {
  std::vector<PhaseScreen> out;
  out.reserve(slabs_.size());
  for (std::size_t s = 0; s < slabs_.size(); ++s) {
    out.push_back(generate_screen(slabs_[s], plan_.grid_at(plan_.screen_plane(s)), parameters_.scales,
                                  derive_seed(seed, index, s), parameters_.subharmonic_levels));
  }
  return out;
}

std::vector<TransverseField> TurbulenceSimulator::received_fields(std::span<const PhaseScreen> screens) const {
  std::vector<TransverseField> out;
  out.reserve(source_modes_.size());
  for (const auto& mode : source_modes_) out.push_back(split_step_propagate(mode, plan_, screens));
  return out;
}

RealizationRecord TurbulenceSimulator::project(std::span<const TransverseField> received,
                                               double aperture_radius) const {
  require(aperture_radius > 0.0, "aperture radius must be positive");
  const auto d = static_cast<Eigen::Index>(vacuum_modes_.size());
  require(static_cast<Eigen::Index>(received.size()) == d, "received field count does not match modes");
  Eigen::MatrixXcd c(d, d);
  for (Eigen::Index col = 0; col < d; ++col)
    for (Eigen::Index row = 0; row < d; ++row)
      c(row, col) = aperture_overlap(vacuum_modes_[row], received[col], aperture_radius);
  AmplitudeMatrix oam(parameters_.l_values, std::move(c));
  const double smm = std::norm(oam.at(0, 0));
  return {std::move(oam), smm};
}

RealizationRecord TurbulenceSimulator::realization(std::span<const PhaseScreen> screens,
                                                   double aperture_radius) const {
  const auto fields = received_fields(screens);
  return project(fields, aperture_radius);
}

std::vector<TurbulenceEnsemble> TurbulenceSimulator::simulate(std::uint64_t seed, std::size_t count,
                                                              std::span<const double> aperture_radii,
                                                              unsigned threads) const {
  require(count >= 1, "ensemble needs at least one realization");
  require(!aperture_radii.empty(), "at least one aperture radius required");
  std::vector<std::vector<RealizationRecord>> records(aperture_radii.size(),
                                                      std::vector<RealizationRecord>(count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        const auto scr = screens(seed, i);
        const auto fields = received_fields(scr);
        for (std::size_t a = 0; a < aperture_radii.size(); ++a) records[a][i] = project(fields, aperture_radii[a]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  unsigned n_threads = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, count));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<TurbulenceEnsemble> out;
  for (std::size_t a = 0; a < aperture_radii.size(); ++a) {
    out.push_back({seed, parameters_, aperture_radii[a], std::move(records[a])});
  }
  return out;
}

AmplitudeMatrix oam_crosstalk_realization(const TurbulenceSimulator& simulator,
                                          std::span<const PhaseScreen> screens, double aperture_radius) {
  return simulator.realization(screens, aperture_radius).oam;
}

double smm_coefficient(const TurbulenceEnsemble& ensemble) {
  require(!ensemble.realizations.empty(), "empty turbulence ensemble");
  CompensatedSum acc;
  for (const auto& r : ensemble.realizations) acc.add(r.smm);
  return acc.value() / static_cast<double>(ensemble.realizations.size());
}

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    correction_ += (sum_ - t) + x;
  } else {
    correction_ += (x - t) + sum_;
  }
  sum_ = t;
}

}  // namespace tmsat
