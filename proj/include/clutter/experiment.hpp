#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "clutter/config.hpp"
#include "clutter/metrics.hpp"
#include "clutter/types.hpp"

namespace clutter {

// Worker count for replicate fan-out: CLUTTERTRACK_WORKERS when set,
// otherwise the hardware concurrency capped at 8.
int worker_count();

struct ScenarioASummary {
  std::vector<ErrorReport> reports;          // one per replicate
  std::vector<double> lambda_ratio_median;   // median_j E[lambda_j]/lambda_j
  double mean_coverage = 0.0;
};

// Model-matched tracking study: per replicate draws ground truth, runs the
// tracker, and writes truth.json, posterior.json, diagnostics.csv and
// error_report.json (plus the resolved config) into out_dir.
ScenarioASummary run_scenario_a(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir);

struct ScenarioBSnrResult {
  double snr_db = 0.0;
  double lambda_w = 0.0;
  ErrorReport report;
};

struct ScenarioBSummary {
  std::vector<ScenarioBSnrResult> per_snr;
};

struct SweepRow {
  int n_coeffs = 0;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
  int replicate = 0;
  ErrorReport report;
  double runtime_s = 0.0;
};

struct SweepOptions {
  int replicates_override = 0;  // 0 keeps the configured count
  bool record_timing = false;   // off by default so reruns stay byte-identical
};

// Coefficient-count sweep over the configured (count, SNR, replicate) grid;
// writes sweep.csv into out_dir and returns the rows in file order.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir,
                                const SweepOptions& opt = {});

// Scatterer-map study: renders truth/truncated/posterior maps per SNR and
// then runs the sweep; everything lands in out_dir.
ScenarioBSummary run_scenario_b(const ExperimentConfig& cfg,
                                const std::filesystem::path& out_dir,
                                const SweepOptions& sweep_opt = {});

// Ground truth plus synthetic frames for replicate 0 of the configured
// scenario: truth.json, chain.bin, frames.bin.
void run_simulate(const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir);

// Regenerates the replicate-0 simulation deterministically, runs the
// tracker, and writes posterior.json, gamma_means.bin, diagnostics.csv and
// error_report.json.
void run_infer(const ExperimentConfig& cfg,
               const std::filesystem::path& out_dir);

// Timing table over doubled frame counts and basis sizes; writes
// scaling.csv. Timing output is inherently not replay-stable.
std::vector<ScalingPoint> run_probe(const std::filesystem::path& out_dir,
                                    int timed_iterations = 20);

}  // namespace clutter
