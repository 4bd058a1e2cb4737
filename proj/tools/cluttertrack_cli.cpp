#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "clutter/experiment.hpp"

namespace {

using clutter::ExperimentConfig;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int replicates = 0;
  int iters = 0;
};

void add_common(CLI::App* sub, CommonOpts* opts) {
  sub->add_option("--config", opts->config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", opts->out_dir, "output directory override");
  sub->add_option("--seed", opts->seed, "seed root override");
  sub->add_option("--replicates", opts->replicates,
                  "replicate count override");
  sub->add_option("--iters", opts->iters, "sweep iteration count override");
  sub->add_flag("--update-alpha", "re-estimate the AR coefficient each sweep");
}

// Overrides are applied before validation so the resolved config echoed
// into the output directory reflects what actually ran.
ExperimentConfig load_config(const CLI::App* sub, const CommonOpts& opts) {
  ExperimentConfig cfg = clutter::parse_config_file(opts.config_path);
  if (sub->count("--seed")) cfg.seeds.root = opts.seed;
  if (sub->count("--replicates")) cfg.seeds.replicates = opts.replicates;
  if (sub->count("--iters")) cfg.inference.iterations = opts.iters;
  if (sub->count("--update-alpha")) cfg.inference.update_alpha = true;
  if (sub->count("--out")) cfg.outputs.directory = opts.out_dir;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational tracker for a basis-expanded radar clutter field"};
  app.require_subcommand(1);

  CommonOpts opts;
  CLI::App* simulate =
      app.add_subcommand("simulate", "write replicate-0 truth and frames");
  add_common(simulate, &opts);
  CLI::App* infer =
      app.add_subcommand("infer", "run the tracker on the replicate-0 frames");
  add_common(infer, &opts);
  CLI::App* scen_a = app.add_subcommand(
      "scenario-a", "model-matched replicate study with drawn ground truth");
  add_common(scen_a, &opts);
  CLI::App* scen_b = app.add_subcommand(
      "scenario-b", "scatterer-map study: per-SNR maps plus the count sweep");
  add_common(scen_b, &opts);
  CLI::App* sweep = app.add_subcommand(
      "sweep", "coefficient-count sweep over the configured grid");
  add_common(sweep, &opts);
  scen_b->add_flag("--timing", "record wall-clock runtimes in sweep.csv");
  sweep->add_flag("--timing", "record wall-clock runtimes in sweep.csv");

  std::string probe_out = "out";
  int probe_iters = 20;
  CLI::App* probe = app.add_subcommand(
      "probe-scaling", "time the tracker across scaled problem sizes");
  probe->add_option("--out", probe_out, "output directory");
  probe->add_option("--timed-iterations", probe_iters,
                    "sweeps timed per case (at least 5)");

  CLI11_PARSE(app, argc, argv);
  const CLI::App* sub = app.get_subcommands().front();

  try {
    if (sub == probe) {
      const auto points = clutter::run_probe(probe_out, probe_iters);
      for (const auto& pt : points)
        std::cout << "frames=" << pt.n_frames
                  << " components=" << pt.n_components
                  << " init_s=" << pt.init_seconds
                  << " iter_s=" << pt.iter_seconds_median << "\n";
      std::cout << "wrote scaling.csv to " << probe_out << "\n";
      return 0;
    }

    const ExperimentConfig cfg = load_config(sub, opts);
    const std::filesystem::path out = cfg.outputs.directory;
    clutter::SweepOptions sweep_opt;
    if (sub == scen_b || sub == sweep)
      sweep_opt.record_timing = sub->count("--timing") > 0;

    if (sub == simulate) {
      clutter::run_simulate(cfg, out);
      std::cout << "wrote truth.json, chain.bin, frames.bin to " << out
                << "\n";
    } else if (sub == infer) {
      clutter::run_infer(cfg, out);
      std::cout << "wrote posterior.json, gamma_means.bin, diagnostics.csv, "
                   "error_report.json to "
                << out << "\n";
    } else if (sub == scen_a) {
      const auto summary = clutter::run_scenario_a(cfg, out);
      std::cout << "replicates=" << summary.reports.size()
                << " mean_coverage=" << summary.mean_coverage << "\n";
      for (std::size_t r = 0; r < summary.reports.size(); ++r)
        std::cout << "replicate " << r << ": coeff_mse="
                  << summary.reports[r].coeff_mse
                  << " coverage=" << summary.reports[r].coverage_3sigma
                  << " alpha_hat=" << summary.reports[r].alpha_hat
                  << " lambda_ratio=" << summary.lambda_ratio_median[r]
                  << "\n";
      std::cout << "wrote results to " << out << "\n";
    } else if (sub == scen_b) {
      const auto summary = clutter::run_scenario_b(cfg, out, sweep_opt);
      for (const auto& res : summary.per_snr)
        std::cout << "snr=" << res.snr_db << "dB"
                  << " coeff_mse=" << res.report.coeff_mse
                  << " field_mse=" << res.report.field_mse
                  << " coverage=" << res.report.coverage_3sigma << "\n";
      std::cout << "wrote maps, summary.json and sweep.csv to " << out
                << "\n";
    } else if (sub == sweep) {
      const auto rows = clutter::run_sweep(cfg, out, sweep_opt);
      std::cout << "wrote " << rows.size() << " sweep rows to "
                << (out / "sweep.csv") << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
