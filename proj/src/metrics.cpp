#include "clutter/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "clutter/rng.hpp"
#include "clutter/scene.hpp"

namespace clutter {

double coefficient_error(const CVector& estimate, const CVector& truth) {
  if (estimate.size() != truth.size())
    throw std::invalid_argument("coefficient vectors differ in length");
  return (estimate - truth).squaredNorm() / static_cast<double>(truth.size());
}

double field_error(const BasisConfig& cfg, const CVector& coeffs,
                   const CMatrix& true_map, const RVector& theta_pts,
                   const RVector& range_pts) {
  const CMatrix rendered = render_map(cfg, coeffs, theta_pts, range_pts);
  if (rendered.rows() != true_map.rows() || rendered.cols() != true_map.cols())
    throw std::invalid_argument("reference map does not match the grid");
  return (rendered - true_map).squaredNorm() /
         static_cast<double>(true_map.size());
}

double coverage_3sigma(const GaussianBelief& belief, const CVector& truth) {
  if (belief.mean.size() != truth.size())
    throw std::invalid_argument("belief and truth differ in length");
  const auto dim = truth.size();
  int inside = 0;
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double sigma = std::sqrt(0.5 / belief.precision_diag[j]);
    const Complex err = belief.mean[j] - truth[j];
    if (std::abs(err.real()) <= 3.0 * sigma &&
        std::abs(err.imag()) <= 3.0 * sigma)
      ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(dim);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<ScalingPoint> scaling_probe(const BasisConfig& base,
                                        const ArrayGeometry& geom,
                                        const ChirpTiming& timing,
                                        int base_frames,
                                        const std::vector<ScalingCase>& cases,
                                        int timed_iterations,
                                        std::uint64_t seed) {
  if (timed_iterations < 5)
    throw std::invalid_argument("need at least five timed iterations");
  std::vector<ScalingPoint> out;
  out.reserve(cases.size());
  std::uint64_t case_index = 0;
  for (const auto& c : cases) {
    if (c.frames_multiplier < 1 || c.components_multiplier < 1)
      throw std::invalid_argument("scaling multipliers must be >= 1");
    BasisConfig cfg = base;
    cfg.n_range *= c.components_multiplier;
    const int frames = base_frames * c.frames_multiplier;

    CMatrix m = CMatrix::Zero(
        geom.n_rx() * timing.total_samples(geom.n_tx()), cfg.flat_size());
    for (int tx = 0; tx < geom.n_tx(); ++tx)
      m += kronecker(expand_steering(cfg, geom, tx),
                     expand_waveform(cfg, timing, geom.n_tx(), tx));

    ARParams p;
    p.alpha = 0.1;
    p.mu = CVector::Zero(cfg.flat_size());
    p.lambda_diag = RVector::Ones(cfg.flat_size());
    const CMatrix chain =
        draw_ar_chain(p, frames, seed_stream(seed, case_index, "probe/chain"));

    ForwardModel fm;
    fm.m = m;
    fm.noise_precision = 1.0;
    const CMatrix frames_y = add_measurement_noise(
        synthesize_frames_noiseless(fm, chain), fm.noise_precision,
        seed_stream(seed, case_index, "probe/noise"));

    ScalingPoint pt;
    pt.n_frames = frames;
    pt.n_components = static_cast<int>(cfg.flat_size());

    const auto t0 = std::chrono::steady_clock::now();
    fm.m_pinv = pseudoinverse(fm.m, 1e-10, &fm.rank);
    fm.msg_cov_diag = message_covariance(fm.m_pinv, fm.noise_precision);
    PosteriorState state = initialize(fm, frames_y);
    pt.init_seconds = seconds_since(t0);

    RunOptions opt;
    std::vector<double> iter_times;
    iter_times.reserve(timed_iterations);
    for (int it = 0; it < timed_iterations; ++it) {
      const auto t1 = std::chrono::steady_clock::now();
      vmp_sweep(state, opt);
      iter_times.push_back(seconds_since(t1));
    }
    pt.iter_seconds_median = median(std::move(iter_times));
    out.push_back(pt);
    ++case_index;
  }
  return out;
}

}  // namespace clutter
