#include "clutter/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "clutter/basis.hpp"
#include "clutter/inference.hpp"
#include "clutter/io.hpp"
#include "clutter/rng.hpp"
#include "clutter/scene.hpp"

namespace clutter {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Work through the items with a shared counter so results only ever depend
// on the item index, never on the schedule.
void parallel_for(int n_items, const std::function<void(int)>& work) {
  const int workers = std::min(worker_count(), n_items);
  if (workers <= 1) {
    for (int i = 0; i < n_items; ++i) work(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = next.fetch_add(1); i < n_items; i = next.fetch_add(1))
          work(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of empty set");
  const auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  double hi = *mid;
  if (v.size() % 2 == 0) {
    const double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
  }
  return hi;
}

std::string snr_label(double snr_db) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", snr_db);
  return std::string("snr") + buf + "db";
}

json cvec_json(const CVector& v) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    re.push_back(v[i].real());
    im.push_back(v[i].imag());
  }
  return json{{"re", re}, {"im", im}};
}

json rvec_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::vector<Scatterer> effective_scatterers(const ScenarioBConfig& b) {
  return b.scatterers.empty() ? default_scene_layout() : b.scatterers;
}

// Process-mean magnitude decays with the combined wave number so higher
// modes carry less energy, mirroring a spatially smooth mean field.
RVector truth_mu_sigma(const BasisConfig& basis, double mu_scale) {
  RVector s(basis.flat_size());
  for (int k = 0; k < basis.n_angle; ++k)
    for (int l = 0; l < basis.n_range; ++l)
      s[basis.flat_index(k, l)] =
          mu_scale /
          (1.0 + std::abs(wave_number(k)) + std::abs(wave_number(l)));
  return s;
}

struct ScenarioATruth {
  CVector mu;
  RVector lambda;
};

ScenarioATruth draw_scenario_a_truth(const ExperimentConfig& cfg,
                                     const BasisConfig& basis,
                                     int replicate) {
  Rng rng(seed_stream(cfg.seeds.root, replicate, "scenario-a/truth"));
  const RVector sigma = truth_mu_sigma(basis, cfg.a.mu_scale);
  ScenarioATruth t;
  t.mu.resize(basis.flat_size());
  for (Eigen::Index j = 0; j < t.mu.size(); ++j)
    t.mu[j] = draw_complex_gaussian(rng, Complex(0.0, 0.0),
                                    1.0 / (sigma[j] * sigma[j]));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double lo = std::log(cfg.a.lambda_log_min);
  const double hi = std::log(cfg.a.lambda_log_max);
  t.lambda.resize(basis.flat_size());
  for (Eigen::Index j = 0; j < t.lambda.size(); ++j)
    t.lambda[j] = std::exp(lo + uni(rng) * (hi - lo));
  return t;
}

RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions opt;
  opt.iterations = cfg.inference.iterations;
  opt.update_alpha = cfg.inference.update_alpha;
  return opt;
}

json report_json(const ErrorReport& r) {
  return json{{"coeff_mse", r.coeff_mse},
              {"field_mse", r.field_mse},
              {"coverage_3sigma", r.coverage_3sigma},
              {"alpha_hat", r.alpha_hat}};
}

// Replicate-0 data shared by the simulate and infer commands; regenerating
// it from the seed streams keeps the two byte-consistent without a handoff
// file.
struct ReplicaSim {
  CMatrix frames;      // observations, one column per frame
  CMatrix chain;       // coefficient chain in the generating family
  CVector coeff_truth; // truth expressed in the tracked family
  CMatrix field_truth; // reference map on the error grid
  RVector theta_pts;
  RVector range_pts;
  double lambda_w = 0.0;
  json truth;
};

ReplicaSim simulate_replicate0(const ExperimentConfig& cfg) {
  const BasisConfig basis = cfg.basis_config();
  const ArrayGeometry geom = cfg.geometry();
  const ChirpTiming timing = cfg.timing();
  ReplicaSim out;
  if (cfg.kind == ScenarioKind::A) {
    const auto truth = draw_scenario_a_truth(cfg, basis, 0);
    const CMatrix m = assemble_forward_matrix(basis, geom, timing);
    ARParams p;
    p.alpha = cfg.a.alpha;
    p.mu = truth.mu;
    p.lambda_diag = truth.lambda;
    out.chain = draw_ar_chain(p, cfg.inference.n_frames,
                              seed_stream(cfg.seeds.root, 0, "scenario-a/chain"));
    out.lambda_w = cfg.noise.use_snr
                       ? snr_to_noise_precision(cfg.noise.snr_db, m, truth.mu)
                       : cfg.noise.noise_precision;
    out.frames =
        add_measurement_noise(m * out.chain, out.lambda_w,
                              seed_stream(cfg.seeds.root, 0, "scenario-a/noise"));
    out.coeff_truth = truth.mu;
    out.theta_pts = RVector::LinSpaced(64, basis.theta_lo, basis.theta_hi);
    out.range_pts = RVector::LinSpaced(64, basis.range_lo, basis.range_hi);
    out.field_truth = render_map(basis, truth.mu, out.theta_pts, out.range_pts);
    out.truth = json{{"replicate", 0},
                     {"alpha", cfg.a.alpha},
                     {"mu", cvec_json(truth.mu)},
                     {"lambda", rvec_json(truth.lambda)},
                     {"lambda_w", out.lambda_w}};
  } else {
    const BasisConfig ref = cfg.reference_basis_config();
    const auto scatterers = effective_scatterers(cfg.b);
    const CVector mu_ref = project_scatterers(ref, scatterers);
    const CMatrix m_ref = assemble_forward_matrix(ref, geom, timing);
    ARParams p;
    p.alpha = cfg.b.alpha;
    p.mu = mu_ref;
    p.lambda_diag = RVector::Constant(ref.flat_size(), cfg.b.lambda);
    out.chain = draw_ar_chain(p, cfg.inference.n_frames,
                              seed_stream(cfg.seeds.root, 0, "scenario-b/chain"));
    const double snr_db = cfg.b.snr_list_db.front();
    out.lambda_w = snr_to_noise_precision(snr_db, m_ref, mu_ref);
    out.frames = add_measurement_noise(
        m_ref * out.chain, out.lambda_w,
        seed_stream(cfg.seeds.root, 0, "scenario-b/noise/" + snr_label(snr_db)));
    out.coeff_truth = restrict_coefficients(ref, basis, mu_ref);
    out.theta_pts =
        RVector::LinSpaced(cfg.b.map_n_theta, ref.theta_lo, ref.theta_hi);
    out.range_pts =
        RVector::LinSpaced(cfg.b.map_n_range, ref.range_lo, ref.range_hi);
    out.field_truth = render_map(ref, mu_ref, out.theta_pts, out.range_pts);
    out.truth = json{{"alpha", cfg.b.alpha},
                     {"lambda", cfg.b.lambda},
                     {"mu_ref", cvec_json(mu_ref)},
                     {"n_scatterers", scatterers.size()},
                     {"snr_db", snr_db},
                     {"lambda_w", out.lambda_w}};
  }
  return out;
}

json posterior_json(const PosteriorState& state) {
  return json{{"alpha_hat", state.alpha},
              {"alpha_degenerate", state.alpha_degenerate},
              {"zeta", state.lambda.shape},
              {"xi", rvec_json(state.lambda.rate)},
              {"lambda_mean", rvec_json(state.lambda.mean())},
              {"mu_mean", cvec_json(state.mu.mean)},
              {"mu_precision", rvec_json(state.mu.precision_diag)},
              {"lambda_floor_hits", state.lambda_floor_hits}};
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("CLUTTERTRACK_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
}

ScenarioASummary run_scenario_a(const ExperimentConfig& cfg,
                                const fs::path& out_dir) {
  if (cfg.kind != ScenarioKind::A)
    throw std::invalid_argument("run_scenario_a needs a scenario A config");
  cfg.validate();
  fs::create_directories(out_dir);
  write_resolved_config(cfg, out_dir / "resolved_config.json");
  const std::uint64_t hash = config_hash(cfg);

  const BasisConfig basis = cfg.basis_config();
  const ForwardModel fm_unit =
      assemble_forward_model(basis, cfg.geometry(), cfg.timing(), 1.0,
                             cfg.inference.pinv_tolerance);
  const RVector theta_pts =
      RVector::LinSpaced(64, basis.theta_lo, basis.theta_hi);
  const RVector range_pts =
      RVector::LinSpaced(64, basis.range_lo, basis.range_hi);
  const RunOptions opt = run_options(cfg);

  struct RepOutcome {
    ScenarioATruth truth;
    double lambda_w = 0.0;
    PosteriorState state;
    ErrorReport report;
    double ratio_median = 0.0;
  };
  const int n_reps = cfg.seeds.replicates;
  std::vector<RepOutcome> reps(n_reps);

  parallel_for(n_reps, [&](int r) {
    RepOutcome& out = reps[r];
    out.truth = draw_scenario_a_truth(cfg, basis, r);
    ARParams p;
    p.alpha = cfg.a.alpha;
    p.mu = out.truth.mu;
    p.lambda_diag = out.truth.lambda;
    const CMatrix chain =
        draw_ar_chain(p, cfg.inference.n_frames,
                      seed_stream(cfg.seeds.root, r, "scenario-a/chain"));
    out.lambda_w =
        cfg.noise.use_snr
            ? snr_to_noise_precision(cfg.noise.snr_db, fm_unit.m, out.truth.mu)
            : cfg.noise.noise_precision;
    const ForwardModel fm = fm_unit.with_noise_precision(out.lambda_w);
    const CMatrix y = synthesize_frames(
        fm, chain, seed_stream(cfg.seeds.root, r, "scenario-a/noise"));
    out.state = run(fm, y, opt);

    out.report.coeff_mse = coefficient_error(out.state.mu.mean, out.truth.mu);
    out.report.field_mse =
        field_error(basis, out.state.mu.mean,
                    render_map(basis, out.truth.mu, theta_pts, range_pts),
                    theta_pts, range_pts);
    out.report.coverage_3sigma = coverage_3sigma(out.state.mu, out.truth.mu);
    out.report.alpha_hat = out.state.alpha;
    const RVector lambda_mean = out.state.lambda.mean();
    std::vector<double> ratios(lambda_mean.size());
    for (Eigen::Index j = 0; j < lambda_mean.size(); ++j)
      ratios[j] = lambda_mean[j] / out.truth.lambda[j];
    out.ratio_median = median(std::move(ratios));
  });

  json truth_list = json::array();
  json posterior_list = json::array();
  json report_list = json::array();
  ScenarioASummary summary;
  for (int r = 0; r < n_reps; ++r) {
    const RepOutcome& out = reps[r];
    truth_list.push_back(json{{"replicate", r},
                              {"alpha", cfg.a.alpha},
                              {"mu", cvec_json(out.truth.mu)},
                              {"lambda", rvec_json(out.truth.lambda)},
                              {"lambda_w", out.lambda_w}});
    json post = posterior_json(out.state);
    post["replicate"] = r;
    posterior_list.push_back(std::move(post));
    json rep = report_json(out.report);
    rep["replicate"] = r;
    rep["lambda_ratio_median"] = out.ratio_median;
    report_list.push_back(std::move(rep));
    summary.reports.push_back(out.report);
    summary.lambda_ratio_median.push_back(out.ratio_median);
    summary.mean_coverage += out.report.coverage_3sigma / n_reps;
  }

  const std::string hash_str = hash_hex(hash);
  write_json(out_dir / "truth.json",
             json{{"config_hash", hash_str}, {"replicates", truth_list}});
  write_json(out_dir / "posterior.json",
             json{{"config_hash", hash_str}, {"replicates", posterior_list}});
  write_json(out_dir / "error_report.json",
             json{{"config_hash", hash_str},
                  {"replicates", report_list},
                  {"mean_coverage", summary.mean_coverage}});
  if (cfg.outputs.csv) {
    CsvWriter csv(out_dir / "diagnostics.csv", hash,
                  {"replicate", "iteration", "delta_mu", "delta_lambda",
                   "alpha"});
    for (int r = 0; r < n_reps; ++r)
      for (const auto& it : reps[r].state.trace)
        csv.row({std::to_string(r), std::to_string(it.iteration),
                 format_double(it.delta_mu), format_double(it.delta_lambda),
                 format_double(it.alpha)});
  }
  return summary;
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const fs::path& out_dir,
                                const SweepOptions& opt) {
  if (cfg.kind != ScenarioKind::B)
    throw std::invalid_argument("run_sweep needs a scenario B config");
  cfg.validate();
  fs::create_directories(out_dir);
  const std::uint64_t hash = config_hash(cfg);

  const ArrayGeometry geom = cfg.geometry();
  const ChirpTiming timing = cfg.sweep_timing();
  const BasisConfig ref = cfg.reference_basis_config();
  const CVector mu_ref = project_scatterers(ref, effective_scatterers(cfg.b));
  const CMatrix m_ref = assemble_forward_matrix(ref, geom, timing);
  const RVector theta_pts =
      RVector::LinSpaced(cfg.b.map_n_theta, ref.theta_lo, ref.theta_hi);
  const RVector range_pts =
      RVector::LinSpaced(cfg.b.map_n_range, ref.range_lo, ref.range_hi);
  const CMatrix true_map = render_map(ref, mu_ref, theta_pts, range_pts);

  const auto& counts = cfg.b.sweep.counts;
  const auto& snrs = cfg.b.sweep.snr_db;
  std::vector<ForwardModel> fm_by_count;
  std::vector<BasisConfig> basis_by_count;
  std::vector<CVector> truth_by_count;
  for (int c : counts) {
    const BasisConfig bc = cfg.count_basis_config(c);
    fm_by_count.push_back(assemble_forward_model(
        bc, geom, timing, 1.0, cfg.inference.pinv_tolerance));
    truth_by_count.push_back(restrict_coefficients(ref, bc, mu_ref));
    basis_by_count.push_back(bc);
  }
  std::vector<double> lambda_w(snrs.size());
  for (std::size_t s = 0; s < snrs.size(); ++s)
    lambda_w[s] = snr_to_noise_precision(snrs[s], m_ref, mu_ref);

  ARParams p;
  p.alpha = cfg.b.alpha;
  p.mu = mu_ref;
  p.lambda_diag = RVector::Constant(ref.flat_size(), cfg.b.lambda);
  RunOptions ropt = run_options(cfg);

  const int n_reps = opt.replicates_override > 0 ? opt.replicates_override
                                                 : cfg.seeds.replicates;
  const int n_counts = static_cast<int>(counts.size());
  const int n_snrs = static_cast<int>(snrs.size());
  std::vector<SweepRow> rows(
      static_cast<std::size_t>(n_counts) * n_snrs * n_reps);
  const auto slot = [&](int ci, int si, int r) {
    return (static_cast<std::size_t>(ci) * n_snrs + si) * n_reps + r;
  };

  parallel_for(n_reps, [&](int r) {
    const std::uint64_t chain_seed =
        seed_stream(cfg.seeds.root, r, "sweep/chain");
    const CMatrix chain = draw_ar_chain(p, cfg.b.sweep.n_frames, chain_seed);
    const CMatrix clean = m_ref * chain;
    for (int si = 0; si < n_snrs; ++si) {
      const CMatrix y = add_measurement_noise(
          clean, lambda_w[si],
          seed_stream(cfg.seeds.root, r, "sweep/noise/" + snr_label(snrs[si])));
      for (int ci = 0; ci < n_counts; ++ci) {
        const auto start = std::chrono::steady_clock::now();
        const ForwardModel fm =
            fm_by_count[ci].with_noise_precision(lambda_w[si]);
        const PosteriorState state = run(fm, y, ropt);
        SweepRow& row = rows[slot(ci, si, r)];
        if (opt.record_timing)
          row.runtime_s = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - start)
                              .count();
        row.n_coeffs = counts[ci] * counts[ci];
        row.snr_db = snrs[si];
        row.seed = chain_seed;
        row.replicate = r;
        row.report.coeff_mse =
            coefficient_error(state.mu.mean, truth_by_count[ci]);
        row.report.field_mse = field_error(basis_by_count[ci], state.mu.mean,
                                           true_map, theta_pts, range_pts);
        row.report.coverage_3sigma =
            coverage_3sigma(state.mu, truth_by_count[ci]);
        row.report.alpha_hat = state.alpha;
      }
    }
  });

  if (cfg.outputs.csv) {
    CsvWriter csv(out_dir / "sweep.csv", hash,
                  {"n_coeffs", "snr_db", "seed", "coeff_mse", "field_mse",
                   "coverage", "alpha_hat", "runtime_s"});
    for (const auto& row : rows)
      csv.row({std::to_string(row.n_coeffs), format_double(row.snr_db),
               std::to_string(row.seed), format_double(row.report.coeff_mse),
               format_double(row.report.field_mse),
               format_double(row.report.coverage_3sigma),
               format_double(row.report.alpha_hat),
               format_double(row.runtime_s)});
  }
  return rows;
}

ScenarioBSummary run_scenario_b(const ExperimentConfig& cfg,
                                const fs::path& out_dir,
                                const SweepOptions& sweep_opt) {
  if (cfg.kind != ScenarioKind::B)
    throw std::invalid_argument("run_scenario_b needs a scenario B config");
  cfg.validate();
  fs::create_directories(out_dir);
  write_resolved_config(cfg, out_dir / "resolved_config.json");
  const std::uint64_t hash = config_hash(cfg);

  const ArrayGeometry geom = cfg.geometry();
  const ChirpTiming timing = cfg.timing();
  const BasisConfig ref = cfg.reference_basis_config();
  const BasisConfig basis = cfg.basis_config();
  const CVector mu_ref = project_scatterers(ref, effective_scatterers(cfg.b));
  const CVector truth = restrict_coefficients(ref, basis, mu_ref);
  const RVector theta_pts =
      RVector::LinSpaced(cfg.b.map_n_theta, ref.theta_lo, ref.theta_hi);
  const RVector range_pts =
      RVector::LinSpaced(cfg.b.map_n_range, ref.range_lo, ref.range_hi);
  const CMatrix true_map = render_map(ref, mu_ref, theta_pts, range_pts);
  if (cfg.outputs.binary) {
    write_complex_matrix(out_dir / "true_map.bin", true_map);
    write_complex_matrix(out_dir / "truncated_map.bin",
                         render_map(basis, truth, theta_pts, range_pts));
  }

  const CMatrix m_ref = assemble_forward_matrix(ref, geom, timing);
  ARParams p;
  p.alpha = cfg.b.alpha;
  p.mu = mu_ref;
  p.lambda_diag = RVector::Constant(ref.flat_size(), cfg.b.lambda);
  const CMatrix chain =
      draw_ar_chain(p, cfg.inference.n_frames,
                    seed_stream(cfg.seeds.root, 0, "scenario-b/chain"));
  const CMatrix clean = m_ref * chain;
  const ForwardModel fm_unit = assemble_forward_model(
      basis, geom, timing, 1.0, cfg.inference.pinv_tolerance);
  const RunOptions opt = run_options(cfg);

  ScenarioBSummary summary;
  json per_snr = json::array();
  for (double snr_db : cfg.b.snr_list_db) {
    const std::string label = snr_label(snr_db);
    ScenarioBSnrResult res;
    res.snr_db = snr_db;
    res.lambda_w = snr_to_noise_precision(snr_db, m_ref, mu_ref);
    const CMatrix y = add_measurement_noise(
        clean, res.lambda_w,
        seed_stream(cfg.seeds.root, 0, "scenario-b/noise/" + label));
    const ForwardModel fm = fm_unit.with_noise_precision(res.lambda_w);
    const PosteriorState state = run(fm, y, opt);
    res.report.coeff_mse = coefficient_error(state.mu.mean, truth);
    res.report.field_mse =
        field_error(basis, state.mu.mean, true_map, theta_pts, range_pts);
    res.report.coverage_3sigma = coverage_3sigma(state.mu, truth);
    res.report.alpha_hat = state.alpha;
    if (cfg.outputs.binary)
      write_complex_matrix(
          out_dir / ("posterior_map_" + label + ".bin"),
          render_map(basis, state.mu.mean, theta_pts, range_pts));
    json entry = report_json(res.report);
    entry["snr_db"] = snr_db;
    entry["lambda_w"] = res.lambda_w;
    entry["lambda_floor_hits"] = state.lambda_floor_hits;
    per_snr.push_back(std::move(entry));
    summary.per_snr.push_back(std::move(res));
  }
  write_json(out_dir / "summary.json",
             json{{"config_hash", hash_hex(hash)}, {"per_snr", per_snr}});
  run_sweep(cfg, out_dir, sweep_opt);
  return summary;
}

void run_simulate(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  write_resolved_config(cfg, out_dir / "resolved_config.json");
  const ReplicaSim sim = simulate_replicate0(cfg);
  json truth = sim.truth;
  truth["config_hash"] = hash_hex(config_hash(cfg));
  write_json(out_dir / "truth.json", truth);
  if (cfg.outputs.binary) {
    write_complex_matrix(out_dir / "chain.bin", sim.chain);
    write_complex_matrix(out_dir / "frames.bin", sim.frames);
  }
}

void run_infer(const ExperimentConfig& cfg, const fs::path& out_dir) {
  cfg.validate();
  fs::create_directories(out_dir);
  write_resolved_config(cfg, out_dir / "resolved_config.json");
  const std::uint64_t hash = config_hash(cfg);
  const ReplicaSim sim = simulate_replicate0(cfg);

  const BasisConfig basis = cfg.basis_config();
  const ForwardModel fm =
      assemble_forward_model(basis, cfg.geometry(), cfg.timing(), 1.0,
                             cfg.inference.pinv_tolerance)
          .with_noise_precision(sim.lambda_w);
  const PosteriorState state = run(fm, sim.frames, run_options(cfg));

  json post = posterior_json(state);
  post["config_hash"] = hash_hex(hash);
  write_json(out_dir / "posterior.json", post);
  if (cfg.outputs.binary)
    write_complex_matrix(out_dir / "gamma_means.bin", state.gamma_means());
  if (cfg.outputs.csv) {
    CsvWriter csv(out_dir / "diagnostics.csv", hash,
                  {"iteration", "delta_mu", "delta_lambda", "alpha"});
    for (const auto& it : state.trace)
      csv.row({std::to_string(it.iteration), format_double(it.delta_mu),
               format_double(it.delta_lambda), format_double(it.alpha)});
  }

  ErrorReport report;
  report.coeff_mse = coefficient_error(state.mu.mean, sim.coeff_truth);
  report.field_mse = field_error(basis, state.mu.mean, sim.field_truth,
                                 sim.theta_pts, sim.range_pts);
  report.coverage_3sigma = coverage_3sigma(state.mu, sim.coeff_truth);
  report.alpha_hat = state.alpha;
  json rep = report_json(report);
  rep["config_hash"] = hash_hex(hash);
  write_json(out_dir / "error_report.json", rep);
}

std::vector<ScalingPoint> run_probe(const fs::path& out_dir,
                                    int timed_iterations) {
  fs::create_directories(out_dir);
  BasisConfig base;
  base.n_angle = 16;
  base.n_range = 16;
  const ArrayGeometry geom = ArrayGeometry::mimo_ula(4, 4);
  ChirpTiming timing;
  timing.sample_rate_hz = 32e6;  // keeps the largest case desk sized
  const std::vector<ScalingCase> cases{
      {1, 1}, {2, 1}, {4, 1}, {1, 2}, {1, 4}};
  const auto points =
      scaling_probe(base, geom, timing, 50, cases, timed_iterations, 1);

  json desc{{"base_n_angle", base.n_angle},
            {"base_n_range", base.n_range},
            {"base_frames", 50},
            {"timed_iterations", timed_iterations},
            {"sample_rate_hz", timing.sample_rate_hz}};
  CsvWriter csv(out_dir / "scaling.csv", fnv1a64(desc.dump()),
                {"n_frames", "n_components", "init_seconds",
                 "iter_seconds_median"});
  for (const auto& pt : points)
    csv.row({std::to_string(pt.n_frames), std::to_string(pt.n_components),
             format_double(pt.init_seconds),
             format_double(pt.iter_seconds_median)});
  return points;
}

}  // namespace clutter
