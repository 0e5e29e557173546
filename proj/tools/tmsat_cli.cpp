#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tmsat/config.hpp"
#include "tmsat/detection.hpp"
#include "tmsat/ensemble_io.hpp"
#include "tmsat/error.hpp"
#include "tmsat/mub.hpp"
#include "tmsat/qkd.hpp"
#include "tmsat/report.hpp"
#include "tmsat/sweep.hpp"

namespace {

using namespace tmsat;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string cache_dir;
  std::optional<unsigned> threads;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "Override a key, e.g. --set sweep.eta0=0.8");
  cmd->add_option("--seed", c.seed, "Master RNG seed for turbulence ensembles");
  cmd->add_option("--cache-dir", c.cache_dir, "Ensemble cache directory (default: $TMSAT_CACHE_DIR)");
  cmd->add_option("--threads", c.threads, "Worker threads for ensembles (0 = all cores)");
  cmd->add_flag("-q,--quiet", c.quiet, "No progress messages");
}

RunConfig resolve(const Common& c) {
  RunConfig config = c.config_path.empty() ? default_config() : load_config(c.config_path);
  for (const auto& o : c.overrides) apply_override(config, o);
  if (c.seed) config.numerical.seed = *c.seed;
  if (!c.cache_dir.empty()) config.output.cache_directory = c.cache_dir;
  if (c.threads) config.numerical.threads = *c.threads;
  config.validate();
  return config;
}

Progress progress_for(const Common& c) {
  if (c.quiet) return {};
  return [](const std::string& msg) { std::cerr << "tmsat: " << msg << "\n"; };
}

void write_outputs(const RunConfig& config, const std::vector<ResultRow>& rows, const std::string& to_stdout) {
  if (!to_stdout.empty()) {
    const auto format = parse_report_format(to_stdout);
    std::cout << (format == ReportFormat::Csv    ? csv_text(rows)
                  : format == ReportFormat::Json ? json_text(rows)
                                                 : plot_data_text(rows));
    return;
  }
  const auto base = config.output.directory / config.output.basename;
  auto emit = [&](ReportFormat f, const std::string& suffix) {
    const std::filesystem::path path = base.string() + suffix;
    write_report(rows, f, path, true);
    std::cerr << "tmsat: wrote " << path.string() << "\n";
  };
  if (config.output.csv) emit(ReportFormat::Csv, ".csv");
  if (config.output.json) emit(ReportFormat::Json, ".json");
  if (config.output.plot_data) emit(ReportFormat::PlotData, ".plot.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite-to-ground single-photon channel simulator: temporal modes vs OAM"};
  app.require_subcommand(1);

  Common common;
  std::string print_format;

  auto* sweep = app.add_subcommand("sweep", "Run the full eta1 x d sweep and write reports");
  add_common(sweep, common);
  sweep->add_option("--print", print_format, "Print one format to stdout instead of writing files")
      ->check(CLI::IsMember({"csv", "json", "plot-data"}));

  auto* sim_tm = app.add_subcommand("simulate-tm", "TM rows only (dispersion channel + QPG sorter)");
  add_common(sim_tm, common);
  std::optional<double> c_smm;
  sim_tm->add_option("--c-smm", c_smm, "Fixed C_SMM for key rates instead of a turbulence ensemble");
  sim_tm->add_option("--print", print_format, "Print one format to stdout")->check(CLI::IsMember({"csv", "json", "plot-data"}));

  auto* sim_oam = app.add_subcommand("simulate-oam", "OAM rows only (turbulence ensemble + perfect sorter)");
  add_common(sim_oam, common);
  sim_oam->add_option("--print", print_format, "Print one format to stdout")->check(CLI::IsMember({"csv", "json", "plot-data"}));

  auto* optimize = app.add_subcommand("optimize-subspace", "Best encoding subspace for one configuration");
  add_common(optimize, common);
  std::string encoding = "tm", objective = "pe", compensation = "c-gdd";
  int dim = 2;
  double eta1 = 0.0;
  optimize->add_option("--encoding", encoding)->check(CLI::IsMember({"tm", "oam"}));
  optimize->add_option("--objective", objective, "pe (minimize P_e) or k (maximize K)")->check(CLI::IsMember({"pe", "k"}));
  optimize->add_option("-d,--dimension", dim)->required();
  optimize->add_option("--eta1", eta1);
  optimize->add_option("--compensation", compensation)->check(CLI::IsMember({"u-gdd", "c-gdd"}));
  optimize->add_option("--c-smm", c_smm);

  auto* ensemble = app.add_subcommand("ensemble", "Generate and cache turbulence ensembles");
  add_common(ensemble, common);

  auto* report = app.add_subcommand("report", "Convert a CSV result table to another format");
  std::string input, output, format = "json";
  bool allow_empty = false;
  report->add_option("input", input, "CSV produced by sweep")->required()->check(CLI::ExistingFile);
  report->add_option("-f,--format", format)->check(CLI::IsMember({"csv", "json", "plot-data"}));
  report->add_option("-o,--output", output, "Output path")->required();
  report->add_flag("--allow-empty", allow_empty);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*report) {
      write_report(read_csv(input), parse_report_format(format), output, allow_empty);
      return 0;
    }

    RunConfig config = resolve(common);
    const auto progress = progress_for(common);

    if (*sweep) {
      write_outputs(config, run_sweep(config, progress), print_format);
    } else if (*sim_tm) {
      config.sweep.oam = false;
      if (c_smm) config.sweep.c_smm = *c_smm;
      if (config.sweep.qkd_table && !config.sweep.c_smm && !config.numerical.seed) {
        throw Error(ErrorKind::InvalidParameter, "simulate-tm key rates need --seed (for C_SMM) or --c-smm");
      }
      write_outputs(config, run_sweep(config, progress), print_format);
    } else if (*sim_oam) {
      if (!common.seed) throw Error(ErrorKind::InvalidParameter, "simulate-oam requires --seed");
      config.sweep.tm = false;
      write_outputs(config, run_sweep(config, progress), print_format);
    } else if (*ensemble) {
      if (!common.seed) throw Error(ErrorKind::InvalidParameter, "ensemble requires --seed");
      if (config.output.cache_directory.empty()) {
        throw Error(ErrorKind::InvalidParameter, "ensemble needs --cache-dir or TMSAT_CACHE_DIR");
      }
      for (double h0 : config.physical.ground_altitudes) {
        for (const auto& ch : obtain_oam_channels(config, h0, *config.numerical.seed, progress)) {
          std::printf("h0=%.17g r_a=%.17g realizations=%zu c_smm=%.17g %s\n", ch.h0, ch.r_a,
                      ch.ensemble.realizations.size(), ch.c_smm, ch.from_cache ? "cached" : "simulated");
        }
      }
    } else if (*optimize) {
      if (encoding == "oam" && !common.seed) throw Error(ErrorKind::InvalidParameter, "OAM requires --seed");
      const double h0 = config.physical.ground_altitudes.front();
      const double r_a = config.physical.aperture_radii.front();
      config.physical.aperture_radii = {r_a};
      const TmChannel tm = compute_tm_channel(config, h0);
      const bool comp = compensation == "c-gdd";
      const bool need_oam = encoding == "oam" || (objective == "k" && !c_smm);
      if (need_oam && !config.numerical.seed) throw Error(ErrorKind::InvalidParameter, "this objective needs --seed");
      std::optional<OamChannel> oam;
      if (need_oam) oam = obtain_oam_channels(config, h0, *config.numerical.seed, progress).front();

      const std::vector<int> tm_labels{0, 1, 2, 3, 4, 5, 6, 7, 8};
      const auto& labels = encoding == "tm" ? tm_labels : oam->ensemble.parameters.l_values;
      const auto obj = objective == "pe" ? Objective::MinimizeErrorProbability : Objective::MaximizeKeyRate;
      std::function<double(std::span<const int>)> score;
      std::optional<MubSet> mubs;
      std::vector<AmplitudeMatrix> realizations;
      if (objective == "k") mubs = build_mubs(dim);
      if (oam) for (const auto& r : oam->ensemble.realizations) realizations.push_back(r.oam);
      const double eta0 = config.sweep.eta0;
      if (encoding == "tm" && objective == "pe") {
        score = [&](std::span<const int> s) { return detect(tm.crosstalk(comp), s, SorterModel{dim, eta0, eta1}).p_e; };
      } else if (encoding == "tm") {
        const double smm = c_smm ? *c_smm : oam->c_smm;
        score = [&, smm](std::span<const int> s) { return evaluate_tm(tm.crosstalk(comp), s, *mubs, eta0, eta1, smm).k; };
      } else if (objective == "pe") {
        score = [&](std::span<const int> s) { return detect(labels, oam->mean_probabilities, s, perfect_sorter(dim)).p_e; };
      } else {
        const double tmm = comp ? tm.c_tmm_compensated : tm.c_tmm;
        score = [&, tmm](std::span<const int> s) { return evaluate_oam(realizations, s, *mubs, tmm).k; };
      }
      const auto best = optimize_subspace(labels, dim, obj, score);
      std::printf("encoding=%s d=%d eta1=%.17g objective=%s subspace=", encoding.c_str(), dim, eta1, objective.c_str());
      for (std::size_t i = 0; i < best.subspace.size(); ++i) std::printf("%s%d", i ? ";" : "", best.subspace[i]);
      std::printf(" score=%.17g evaluations=%zu\n", best.score, best.evaluations);
    }
  } catch (const Error& e) {
    std::cerr << "tmsat: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "tmsat: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
