#include "clutter/inference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clutter {

namespace {

bool finite(const RVector& v) { return v.allFinite(); }
bool finite(const CVector& v) { return v.allFinite(); }

void check_belief(const GaussianBelief& b, const char* what) {
  if (!finite(b.mean) || !finite(b.precision_diag) ||
      (b.precision_diag.array() <= 0.0).any())
    throw std::runtime_error(std::string("non-finite or non-positive belief: ") +
                             what);
}

void check_state(const PosteriorState& s) {
  for (const auto& g : s.gamma) check_belief(g, "q(Gamma)");
  check_belief(s.mu, "q(mu)");
  if (!std::isfinite(s.lambda.shape) || !finite(s.lambda.rate) ||
      (s.lambda.rate.array() <= 0.0).any())
    throw std::runtime_error("non-finite or non-positive belief: q(Lambda)");
  if (!std::isfinite(s.alpha))
    throw std::runtime_error("non-finite alpha estimate");
}

}  // namespace

CMatrix PosteriorState::gamma_means() const {
  CMatrix m(dim(), n_frames());
  for (int n = 0; n < n_frames(); ++n) m.col(n) = gamma[n].mean;
  return m;
}

GaussianBelief msg_data_to_gamma(const ForwardModel& fm, const CVector& y) {
  if (y.size() != fm.m.rows())
    throw std::invalid_argument("frame length does not match the model");
  GaussianBelief b;
  b.mean = fm.m_pinv * y;
  b.precision_diag = fm.msg_cov_diag.cwiseInverse();
  return b;
}

GaussianBelief msg_prev_to_current(const CVector& prev_mean,
                                   const CVector& mu_mean,
                                   const RVector& lambda_mean, double alpha) {
  GaussianBelief b;
  b.mean = mu_mean + alpha * (prev_mean - mu_mean);
  b.precision_diag = lambda_mean / ((1.0 - alpha) * (1.0 - alpha));
  return b;
}

GaussianBelief msg_next_to_current(const CVector& next_mean,
                                   const CVector& mu_mean,
                                   const RVector& lambda_mean, double alpha) {
  GaussianBelief b;
  b.mean = mu_mean + (next_mean - mu_mean) / alpha;
  b.precision_diag = lambda_mean * (alpha * alpha / (1.0 - alpha * alpha));
  return b;
}

GaussianBelief msg_prior_to_gamma(const CVector& mu_mean,
                                  const RVector& lambda_mean) {
  return {mu_mean, lambda_mean};
}

GaussianBelief combine_gaussians(const std::vector<GaussianBelief>& messages) {
  if (messages.empty())
    throw std::invalid_argument("cannot combine an empty message set");
  const auto dim = messages.front().mean.size();
  RVector prec = RVector::Zero(dim);
  CVector weighted = CVector::Zero(dim);
  for (const auto& m : messages) {
    if (m.mean.size() != dim || m.precision_diag.size() != dim)
      throw std::invalid_argument("message lengths differ");
    prec += m.precision_diag;
    weighted.array() += m.precision_diag.array() * m.mean.array();
  }
  GaussianBelief out;
  out.precision_diag = prec;
  out.mean = weighted.array() / prec.array();
  return out;
}

GaussianBelief update_gamma(const PosteriorState& state, int n) {
  const int last = state.n_frames() - 1;
  if (n < 0 || n > last) throw std::invalid_argument("frame index out of range");
  const RVector lambda_mean = state.lambda.mean();
  std::vector<GaussianBelief> msgs;
  msgs.reserve(4);
  msgs.push_back(state.data_msgs[n]);
  if (n > 0)
    msgs.push_back(msg_prev_to_current(state.gamma[n - 1].mean, state.mu.mean,
                                       lambda_mean, state.alpha));
  if (n < last)
    msgs.push_back(msg_next_to_current(state.gamma[n + 1].mean, state.mu.mean,
                                       lambda_mean, state.alpha));
  msgs.push_back(msg_prior_to_gamma(state.mu.mean, lambda_mean));
  return combine_gaussians(msgs);
}

GaussianBelief update_mu(const std::vector<GaussianBelief>& gamma,
                         const RVector& lambda_mean, double alpha) {
  if (gamma.empty()) throw std::invalid_argument("no frame beliefs");
  const int last = static_cast<int>(gamma.size()) - 1;
  const double n_trans = static_cast<double>(last);
  const double kappa = (n_trans + 1.0) + n_trans * (1.0 - alpha) *
                                             (1.0 - alpha) /
                                             (1.0 - alpha * alpha);
  CVector acc = CVector::Zero(gamma.front().mean.size());
  for (const auto& g : gamma) acc += g.mean;
  const double trans_weight = (1.0 - alpha) / (1.0 - alpha * alpha);
  for (int n = 1; n <= last; ++n)
    acc += trans_weight * (gamma[n].mean - alpha * gamma[n - 1].mean);
  GaussianBelief out;
  out.mean = acc / kappa;
  out.precision_diag = kappa * lambda_mean;
  return out;
}

RVector compute_v(const GaussianBelief& g, const GaussianBelief& mu) {
  return (g.mean - mu.mean).cwiseAbs2() + g.variance() + mu.variance();
}

RVector compute_w(const GaussianBelief& cur, const GaussianBelief& prev,
                  const GaussianBelief& mu, double alpha) {
  const RVector quad =
      (cur.mean - alpha * prev.mean - (1.0 - alpha) * mu.mean).cwiseAbs2();
  return (quad + cur.variance() + alpha * alpha * prev.variance() +
          (1.0 - alpha) * (1.0 - alpha) * mu.variance()) /
         (1.0 - alpha * alpha);
}

GammaBelief update_lambda(const std::vector<GaussianBelief>& gamma,
                          const GaussianBelief& mu, double alpha,
                          int* floor_hits) {
  if (gamma.empty()) throw std::invalid_argument("no frame beliefs");
  const int last = static_cast<int>(gamma.size()) - 1;
  RVector xi = RVector::Zero(mu.mean.size());
  for (const auto& g : gamma) xi += compute_v(g, mu);
  for (int n = 1; n <= last; ++n)
    xi += compute_w(gamma[n], gamma[n - 1], mu, alpha);
  int hits = 0;
  for (Eigen::Index j = 0; j < xi.size(); ++j)
    if (xi[j] < kXiFloor) {
      xi[j] = kXiFloor;
      ++hits;
    }
  if (floor_hits) *floor_hits = hits;
  GammaBelief out;
  out.shape = 2.0 * last + 2.0;
  out.rate = xi;
  return out;
}

AlphaEstimate estimate_ar_coefficient(const CMatrix& means,
                                      const CVector& center, double amin,
                                      double amax) {
  if (means.rows() != center.size())
    throw std::invalid_argument("center length does not match the sequence");
  double lag1 = 0.0;
  double lag0 = 0.0;
  for (Eigen::Index n = 1; n < means.cols(); ++n) {
    const CVector prev = means.col(n - 1) - center;
    const CVector cur = means.col(n) - center;
    lag1 += prev.dot(cur).real();  // conjugates the earlier sample
    lag0 += prev.squaredNorm();
  }
  if (lag0 < 1e-30) return {amax, true};
  return {std::clamp(lag1 / lag0, amin, amax), false};
}

PosteriorState initialize(const ForwardModel& fm, const CMatrix& frames) {
  if (frames.cols() < 1) throw std::invalid_argument("no frames supplied");
  const int count = static_cast<int>(frames.cols());
  const int last = count - 1;

  PosteriorState s;
  s.data_msgs.reserve(count);
  const RVector data_prec = fm.msg_cov_diag.cwiseInverse();
  for (int n = 0; n < count; ++n)
    s.data_msgs.push_back({fm.m_pinv * frames.col(n), data_prec});
  s.gamma = s.data_msgs;

  const auto dim = s.gamma.front().mean.size();
  CVector mean_acc = CVector::Zero(dim);
  for (const auto& g : s.gamma) mean_acc += g.mean;
  s.mu.mean = mean_acc / static_cast<double>(count);

  if (count >= 2) {
    const AlphaEstimate est = estimate_ar_coefficient(s.gamma_means(), s.mu.mean);
    s.alpha = est.value;
    s.alpha_degenerate = est.degenerate;
  } else {
    s.alpha = kAlphaMin;
  }

  // Moment match the precisions from scatter about the sample mean plus the
  // data-message variances; the unknown q(mu) spread is left out here.
  RVector xi = RVector::Zero(dim);
  for (const auto& g : s.gamma)
    xi += (g.mean - s.mu.mean).cwiseAbs2() + g.variance();
  for (Eigen::Index j = 0; j < xi.size(); ++j)
    if (xi[j] < kXiFloor) {
      xi[j] = kXiFloor;
      ++s.lambda_floor_hits;
    }
  s.lambda.shape = 2.0 * last + 2.0;
  s.lambda.rate = xi;

  const double a = s.alpha;
  const double kappa = (last + 1.0) +
                       last * (1.0 - a) * (1.0 - a) / (1.0 - a * a);
  s.mu.precision_diag = kappa * s.lambda.mean();

  check_state(s);
  return s;
}

IterationDiagnostics vmp_sweep(PosteriorState& state, const RunOptions& opt) {
  const int count = state.n_frames();
  if (count < 1) throw std::invalid_argument("state holds no frames");

  for (int n = 0; n < count; ++n) state.gamma[n] = update_gamma(state, n);

  const RVector lambda_mean = state.lambda.mean();
  const GaussianBelief new_mu = update_mu(state.gamma, lambda_mean, state.alpha);
  IterationDiagnostics diag;
  diag.delta_mu = (new_mu.mean - state.mu.mean).norm();
  state.mu = new_mu;

  if (opt.update_lambda) {
    int hits = 0;
    const GammaBelief nl =
        update_lambda(state.gamma, state.mu, state.alpha, &hits);
    diag.delta_lambda = (nl.mean() - lambda_mean).norm();
    state.lambda = nl;
    state.lambda_floor_hits += hits;
  }

  if (opt.update_alpha && count >= 2) {
    const AlphaEstimate est =
        estimate_ar_coefficient(state.gamma_means(), state.mu.mean);
    state.alpha = est.value;
    state.alpha_degenerate = est.degenerate;
  }
  diag.alpha = state.alpha;

  check_state(state);
  return diag;
}

PosteriorState run(const ForwardModel& fm, const CMatrix& frames,
                   const RunOptions& opt) {
  PosteriorState state = initialize(fm, frames);
  state.trace.reserve(opt.iterations);
  for (int it = 1; it <= opt.iterations; ++it) {
    IterationDiagnostics diag = vmp_sweep(state, opt);
    diag.iteration = it;
    state.trace.push_back(diag);
  }
  return state;
}

}  // namespace clutter
