#include "tmsat/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "tmsat/atmosphere.hpp"
#include "tmsat/constants.hpp"
#include "tmsat/detection.hpp"
#include "tmsat/dispersion_channel.hpp"
#include "tmsat/ensemble_io.hpp"
#include "tmsat/error.hpp"
#include "tmsat/mub.hpp"
#include "tmsat/qkd.hpp"
#include "tmsat/temporal_modes.hpp"

namespace tmsat {

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return std::tie(a.table, a.h0, a.r_a, a.encoding, a.d, a.eta1, a.compensation) <
           std::tie(b.table, b.h0, b.r_a, b.encoding, b.d, b.eta1, b.compensation);
  });
}

namespace {

const std::vector<int> kTmOrders{0, 1, 2, 3, 4, 5, 6, 7, 8};

std::string describe(const std::exception& e) {
  if (const auto* err = dynamic_cast<const Error*>(&e)) return "error: " + std::string(err->what());
  return std::string("error: ") + e.what();
}

}  // namespace

TmChannel compute_tm_channel(const RunConfig& config, double h0) {
  const auto& p = config.physical;
  const double omega0 = angular_frequency(p.wavelength);
  const auto grid = build_grid(omega0, pulse_sigma(p.pulse_duration), config.numerical.span_sigmas,
                               config.numerical.spectral_points);
  const auto stack = build_layers(h0, p.satellite_altitude, p.zenith_angle, omega0);
  const auto channel = DispersionChannel::atmospheric(stack);
  TmChannel out;
  out.h0 = h0;
  out.total_gdd = stack.total_gdd();
  out.uncompensated = crosstalk_matrix(grid, kTmOrders, channel, false);
  out.compensated = crosstalk_matrix(grid, kTmOrders, channel, true);
  out.c_tmm = std::norm(out.uncompensated.at(0, 0));
  out.c_tmm_compensated = std::norm(out.compensated.at(0, 0));
  return out;
}

OamChannel make_oam_channel(TurbulenceEnsemble ensemble, double h0) {
  OamChannel out;
  out.h0 = h0;
  out.r_a = ensemble.aperture_radius;
  out.c_smm = smm_coefficient(ensemble);
  const auto d = static_cast<Eigen::Index>(ensemble.realizations.front().oam.size());
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd carry = Eigen::MatrixXd::Zero(d, d);
  for (const auto& r : ensemble.realizations) {
    const Eigen::MatrixXd y = r.oam.probabilities() - carry;
    const Eigen::MatrixXd t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  out.mean_probabilities = sum / static_cast<double>(ensemble.realizations.size());
  out.ensemble = std::move(ensemble);
  return out;
}

std::vector<OamChannel> obtain_oam_channels(const RunConfig& config, double h0, std::uint64_t seed,
                                            const Progress& progress) {
  const auto params = config.turbulence(h0);
  const auto& radii = config.physical.aperture_radii;
  const std::size_t count = config.numerical.ensemble_size;
  const auto& cache_dir = config.output.cache_directory;

  std::vector<OamChannel> out;
  if (!cache_dir.empty()) {
    for (double r_a : radii) {
      const auto path = ensemble_cache_path(cache_dir, params, r_a, count, seed);
      if (!std::filesystem::exists(path)) break;
      if (progress) progress("loading ensemble " + path.string());
      out.push_back(make_oam_channel(load_ensemble(path, params, r_a, count, seed), h0));
      out.back().from_cache = true;
    }
    if (out.size() == radii.size()) return out;
    out.clear();
  }

  if (progress) progress("simulating " + std::to_string(count) + " turbulence realizations at h0 = " +
                         std::to_string(h0) + " m");
  const TurbulenceSimulator simulator(params);
  auto ensembles = simulator.simulate(seed, count, radii, config.numerical.threads);
  for (auto& e : ensembles) {
    if (!cache_dir.empty()) save_ensemble(e, ensemble_cache_path(cache_dir, params, e.aperture_radius, count, seed));
    out.push_back(make_oam_channel(std::move(e), h0));
  }
  return out;
}

namespace {

struct Panel {
  double h0;
  double r_a;
  const TmChannel* tm;
  const OamChannel* oam;  // may be null when C_SMM is fixed and OAM is off
};

ResultRow base_row(const std::string& table, const Panel& panel, const std::string& encoding, int d,
                   double eta1, const std::string& compensation) {
  ResultRow row;
  row.table = table;
  row.h0 = panel.h0;
  row.r_a = panel.r_a;
  row.encoding = encoding;
  row.d = d;
  row.eta1 = eta1;
  row.compensation = compensation;
  return row;
}

void tag_ensemble(ResultRow& row, const Panel& panel) {
  if (!panel.oam) return;
  row.seed = panel.oam->ensemble.seed;
  row.ensemble_size = panel.oam->ensemble.realizations.size();
}

std::vector<std::pair<std::string, bool>> compensations(const SweepConfig& s) {
  std::vector<std::pair<std::string, bool>> out;
  if (s.uncompensated) out.emplace_back("u-gdd", false);
  if (s.compensated) out.emplace_back("c-gdd", true);
  return out;
}

void detection_rows(const RunConfig& config, const Panel& panel, std::vector<ResultRow>& rows) {
  const auto& s = config.sweep;
  if (s.eta1_detection.empty()) return;
  if (s.tm) {
    for (int d = s.d_min; d <= s.d_max; ++d) {
      for (const auto& [label, comp] : compensations(s)) {
        const auto& channel = panel.tm->crosstalk(comp);
        for (double eta1 : s.eta1_detection) {
          auto row = base_row("detection", panel, "tm", d, eta1, label);
          try {
            const SorterModel sorter{d, s.eta0, eta1};
            const auto best = optimize_subspace(kTmOrders, d, Objective::MinimizeErrorProbability,
                                                [&](std::span<const int> sub) { return detect(channel, sub, sorter).p_e; });
            const auto report = detect(channel, best.subspace, sorter);
            row.subspace = best.subspace;
            row.p_e = report.p_e;
            row.t_avg = report.t_avg;
          } catch (const std::exception& e) {
            row.status = describe(e);
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  if (s.oam && panel.oam) {
    const auto& labels = panel.oam->ensemble.parameters.l_values;
    const auto& mean = panel.oam->mean_probabilities;
    for (int d = s.d_min; d <= s.d_max; ++d) {
      auto row = base_row("detection", panel, "oam", d, 0.0, "none");
      tag_ensemble(row, panel);
      try {
        const auto sorter = perfect_sorter(d);
        const auto best = optimize_subspace(labels, d, Objective::MinimizeErrorProbability,
                                            [&](std::span<const int> sub) { return detect(labels, mean, sub, sorter).p_e; });
        const auto report = detect(labels, mean, best.subspace, sorter);
        row.subspace = best.subspace;
        row.p_e = report.p_e;
        row.t_avg = report.t_avg;
      } catch (const std::exception& e) {
        row.status = describe(e);
      }
      for (double eta1 : s.eta1_detection) {
        row.eta1 = eta1;
        rows.push_back(row);
      }
    }
  }
}

void fill_qkd(ResultRow& row, const QkdOutcome& outcome) {
  row.subspace = outcome.subspace;
  row.p_e = outcome.p_e.front();
  row.q = outcome.q;
  row.t_avg = outcome.t_avg;
  row.c_mismatch = outcome.c_mismatch;
  row.k1 = outcome.k1;
  row.k = outcome.k;
  row.saturated = outcome.clamped;
}

void qkd_rows(const RunConfig& config, const Panel& panel, std::vector<ResultRow>& rows) {
  const auto& s = config.sweep;
  if (s.eta1_qkd.empty()) return;
  if (s.tm) {
    const double c_smm = s.c_smm ? *s.c_smm : panel.oam->c_smm;
    for (int d = s.d_min; d <= s.d_max; ++d) {
      std::optional<MubSet> mubs;
      std::string failure;
      try {
        mubs = build_mubs(d);
      } catch (const std::exception& e) {
        failure = describe(e);
      }
      for (const auto& [label, comp] : compensations(s)) {
        const auto& channel = panel.tm->crosstalk(comp);
        for (double eta1 : s.eta1_qkd) {
          auto row = base_row("qkd", panel, "tm", d, eta1, label);
          if (!s.c_smm) tag_ensemble(row, panel);
          if (!mubs) {
            row.status = failure;
            rows.push_back(std::move(row));
            continue;
          }
          try {
            auto evaluate = [&](std::span<const int> sub) {
              return evaluate_tm(channel, sub, *mubs, s.eta0, eta1, c_smm);
            };
            const auto best = optimize_subspace(kTmOrders, d, Objective::MaximizeKeyRate,
                                                [&](std::span<const int> sub) { return evaluate(sub).k; });
            fill_qkd(row, evaluate(best.subspace));
          } catch (const std::exception& e) {
            row.status = describe(e);
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  if (s.oam && panel.oam) {
    const auto& labels = panel.oam->ensemble.parameters.l_values;
    std::vector<AmplitudeMatrix> realizations;
    for (const auto& r : panel.oam->ensemble.realizations) realizations.push_back(r.oam);
    for (int d = s.d_min; d <= s.d_max; ++d) {
      // K is proportional to the mismatch coefficient, so one search serves both compensation flags.
      std::optional<QkdOutcome> best_outcome;
      std::string failure;
      try {
        const auto mubs = build_mubs(d);
        const auto best = optimize_subspace(labels, d, Objective::MaximizeKeyRate, [&](std::span<const int> sub) {
          return evaluate_oam(realizations, sub, mubs, 1.0).k;
        });
        best_outcome = evaluate_oam(realizations, best.subspace, mubs, 1.0);
      } catch (const std::exception& e) {
        failure = describe(e);
      }
      for (const auto& [label, comp] : compensations(s)) {
        auto row = base_row("qkd", panel, "oam", d, 0.0, label);
        tag_ensemble(row, panel);
        if (best_outcome) {
          auto outcome = *best_outcome;
          outcome.c_mismatch = comp ? panel.tm->c_tmm_compensated : panel.tm->c_tmm;
          outcome.k = secret_key_rate(outcome.c_mismatch, std::min(1.0, outcome.t_avg), outcome.k1);
          fill_qkd(row, outcome);
        } else {
          row.status = failure;
        }
        for (double eta1 : s.eta1_qkd) {
          row.eta1 = eta1;
          rows.push_back(row);
        }
      }
    }
  }
}

}  // namespace

std::vector<ResultRow> run_sweep(const RunConfig& config, const Progress& progress) {
  config.validate();
  const auto& s = config.sweep;
  const bool want_detection = s.detection_table && !s.eta1_detection.empty();
  const bool want_qkd = s.qkd_table && !s.eta1_qkd.empty();
  std::vector<ResultRow> rows;
  if (!want_detection && !want_qkd) return rows;

  const bool need_ensemble = s.oam || (want_qkd && s.tm && !s.c_smm);
  if (need_ensemble && !config.numerical.seed) {
    throw Error(ErrorKind::InvalidParameter, "a master seed is required for turbulence ensembles");
  }

  for (double h0 : config.physical.ground_altitudes) {
    if (progress) progress("dispersion channel at h0 = " + std::to_string(h0) + " m");
    const TmChannel tm = compute_tm_channel(config, h0);
    std::vector<OamChannel> oam;
    if (need_ensemble) oam = obtain_oam_channels(config, h0, *config.numerical.seed, progress);
    for (std::size_t a = 0; a < config.physical.aperture_radii.size(); ++a) {
      const Panel panel{h0, config.physical.aperture_radii[a], &tm, oam.empty() ? nullptr : &oam[a]};
      if (want_detection) detection_rows(config, panel, rows);
      if (want_qkd) qkd_rows(config, panel, rows);
    }
  }
  sort_rows(rows);
  return rows;
}

}  // namespace tmsat
