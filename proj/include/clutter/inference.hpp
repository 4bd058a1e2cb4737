#pragma once

#include <vector>

#include "clutter/basis.hpp"
#include "clutter/types.hpp"

namespace clutter {

// Gaussian belief with diagonal precision over a complex coefficient vector.
// Covariance diagonal is the elementwise inverse of precision_diag, so the
// per-component variance is E|x_j - mean_j|^2 = 1/precision_diag[j].
struct GaussianBelief {
  CVector mean;
  RVector precision_diag;

  RVector variance() const { return precision_diag.cwiseInverse(); }
};

// Per-component gamma belief over the field precisions, density
// proportional to lambda^(shape-1) exp(-rate_j lambda) per component.
struct GammaBelief {
  double shape = 1.0;
  RVector rate;

  RVector mean() const { return shape * rate.cwiseInverse(); }
};

struct AlphaEstimate {
  double value = 0.0;
  // Set when the pooled lag-0 power is numerically zero (constant input);
  // the value is then the upper clamp bound.
  bool degenerate = false;
};

struct IterationDiagnostics {
  int iteration = 0;
  double delta_mu = 0.0;      // ||change of mean of q(mu)||
  double delta_lambda = 0.0;  // ||change of E[lambda]||
  double alpha = 0.0;
};

constexpr double kXiFloor = 1e-30;

// Mean-field posterior over N+1 coefficient frames, the shared process
// mean, the per-component precisions, and the AR coefficient.
struct PosteriorState {
  std::vector<GaussianBelief> gamma;  // q(Gamma_n), n = 0..N
  GaussianBelief mu;                  // q(mu)
  GammaBelief lambda;                 // q(Lambda)
  double alpha = 0.1;
  bool alpha_degenerate = false;

  std::vector<GaussianBelief> data_msgs;  // fixed messages from each frame
  int lambda_floor_hits = 0;              // cumulative rate-floor applications
  std::vector<IterationDiagnostics> trace;

  int n_frames() const { return static_cast<int>(gamma.size()); }
  Eigen::Index dim() const { return mu.mean.size(); }
  CMatrix gamma_means() const;  // column n = mean of q(Gamma_n)
};

struct RunOptions {
  int iterations = 150;
  bool update_alpha = false;
  bool update_lambda = true;
};

// Message from one observed frame: mean M^+ y, precision the inverse of the
// diagonalised pseudoinverse-propagated noise covariance.
GaussianBelief msg_data_to_gamma(const ForwardModel& fm, const CVector& y);

// Message through the transition from the predecessor frame.
GaussianBelief msg_prev_to_current(const CVector& prev_mean,
                                   const CVector& mu_mean,
                                   const RVector& lambda_mean, double alpha);

// Message through the transition from the successor frame.
GaussianBelief msg_next_to_current(const CVector& next_mean,
                                   const CVector& mu_mean,
                                   const RVector& lambda_mean, double alpha);

// Direct message from the process mean/precision beliefs.
GaussianBelief msg_prior_to_gamma(const CVector& mu_mean,
                                  const RVector& lambda_mean);

// Product of Gaussian messages: precisions add, means are precision-weighted.
GaussianBelief combine_gaussians(const std::vector<GaussianBelief>& messages);

// Recompute q(Gamma_n) from the cached data message, the neighbour frames
// present for this n, and the process-mean message.
GaussianBelief update_gamma(const PosteriorState& state, int n);

// Closed-form q(mu) given the current frame beliefs.
GaussianBelief update_mu(const std::vector<GaussianBelief>& gamma,
                         const RVector& lambda_mean, double alpha);

// E|Gamma_j - mu_j|^2 under the two beliefs.
RVector compute_v(const GaussianBelief& g, const GaussianBelief& mu);

// E|Gamma_j^(n) - alpha Gamma_j^(n-1) - (1-alpha) mu_j|^2 / (1-alpha^2).
RVector compute_w(const GaussianBelief& cur, const GaussianBelief& prev,
                  const GaussianBelief& mu, double alpha);

// Closed-form q(Lambda): shape 2N+2, rate the summed second moments; rates
// are floored at kXiFloor and floor applications are counted if requested.
GammaBelief update_lambda(const std::vector<GaussianBelief>& gamma,
                          const GaussianBelief& mu, double alpha,
                          int* floor_hits = nullptr);

// Pooled lag-1 regression over all components after removing `center`,
// clamped to [amin, amax].
AlphaEstimate estimate_ar_coefficient(const CMatrix& means,
                                      const CVector& center,
                                      double amin = kAlphaMin,
                                      double amax = kAlphaMax);

// Data messages, frame beliefs, sample-mean q(mu), moment-matched q(Lambda)
// and a pooled lag-1 alpha, ready for sweeping. Columns of `frames` are the
// observed vectors y_0..y_N.
PosteriorState initialize(const ForwardModel& fm, const CMatrix& frames);

// One coordinate sweep: q(Gamma_0)..q(Gamma_N) in order, then q(mu), then
// q(Lambda), then optionally alpha. Throws if any belief goes non-finite.
IterationDiagnostics vmp_sweep(PosteriorState& state, const RunOptions& opt);

// initialize() followed by opt.iterations sweeps; per-sweep diagnostics are
// appended to the returned state's trace.
PosteriorState run(const ForwardModel& fm, const CMatrix& frames,
                   const RunOptions& opt = {});

}  // namespace clutter
