#include "clutter/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "clutter/rng.hpp"

namespace clutter {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ARParams::validate() const {
  // alpha = 0 (white chain) is a valid generator even though the tracker
  // clamps its own estimate away from the endpoints.
  if (alpha < 0.0 || alpha > kAlphaMax)
    throw std::invalid_argument("ar: alpha outside [0, 1)");
  if (mu.size() == 0 || mu.size() != lambda_diag.size())
    throw std::invalid_argument("ar: mu/lambda size mismatch");
  if ((lambda_diag.array() <= 0.0).any())
    throw std::invalid_argument("ar: nonpositive precision");
}

NoiseParams stationary_noise_params(const ARParams& p) {
  p.validate();
  NoiseParams out;
  out.mean = p.mu * (1.0 - p.alpha);
  out.precision_diag = p.lambda_diag / (1.0 - p.alpha * p.alpha);
  return out;
}

CMatrix draw_ar_chain(const ARParams& p, int n_frames, std::uint64_t seed) {
  p.validate();
  if (n_frames < 1) throw std::invalid_argument("ar: need at least one frame");
  const NoiseParams innov = stationary_noise_params(p);
  const auto dim = p.mu.size();
  CMatrix chain(dim, n_frames);
  Rng rng(seed);
  for (Eigen::Index j = 0; j < dim; ++j)
    chain(j, 0) = draw_complex_gaussian(rng, p.mu[j], p.lambda_diag[j]);
  for (int n = 1; n < n_frames; ++n)
    for (Eigen::Index j = 0; j < dim; ++j)
      chain(j, n) = p.alpha * chain(j, n - 1) +
                    draw_complex_gaussian(rng, innov.mean[j],
                                          innov.precision_diag[j]);
  return chain;
}

CVector project_scatterers(const BasisConfig& cfg,
                           const std::vector<Scatterer>& scatterers) {
  cfg.validate();
  for (const auto& s : scatterers)
    if (s.theta < cfg.theta_lo || s.theta > cfg.theta_hi ||
        s.range < cfg.range_lo || s.range > cfg.range_hi)
      throw std::invalid_argument("scatterer outside the configured domain");
  CVector out = CVector::Zero(cfg.flat_size());
  for (const auto& s : scatterers)
    for (int k = 0; k < cfg.n_angle; ++k)
      for (int l = 0; l < cfg.n_range; ++l)
        out[cfg.flat_index(k, l)] +=
            s.amplitude * eval_basis(cfg, k, l, s.theta, s.range);
  return out;
}

namespace {

// family values on a point set: out(k, p) = psi_k(x_p)
CMatrix angle_values(const BasisConfig& cfg, const RVector& pts) {
  CMatrix v(cfg.n_angle, pts.size());
  for (int k = 0; k < cfg.n_angle; ++k)
    for (Eigen::Index p = 0; p < pts.size(); ++p)
      v(k, p) = eval_angle_basis(cfg, k, pts[p]);
  return v;
}

CMatrix range_values(const BasisConfig& cfg, const RVector& pts) {
  CMatrix v(cfg.n_range, pts.size());
  for (int l = 0; l < cfg.n_range; ++l)
    for (Eigen::Index p = 0; p < pts.size(); ++p)
      v(l, p) = eval_range_basis(cfg, l, pts[p]);
  return v;
}

CMatrix coeff_grid(const BasisConfig& cfg, const CVector& coeffs) {
  if (coeffs.size() != cfg.flat_size())
    throw std::invalid_argument("coefficient vector does not match the basis");
  CMatrix g(cfg.n_angle, cfg.n_range);
  for (int k = 0; k < cfg.n_angle; ++k)
    for (int l = 0; l < cfg.n_range; ++l) g(k, l) = coeffs[cfg.flat_index(k, l)];
  return g;
}

RVector uniform_trapezoid_weights(const RVector& pts) {
  const auto n = pts.size();
  if (n < 2) throw std::invalid_argument("grid needs >= 2 points");
  const double h = (pts[n - 1] - pts[0]) / static_cast<double>(n - 1);
  RVector w = RVector::Constant(n, h);
  w[0] *= 0.5;
  w[n - 1] *= 0.5;
  return w;
}

}  // namespace

CMatrix render_map(const BasisConfig& cfg, const CVector& coeffs,
                   const RVector& theta_pts, const RVector& range_pts) {
  const CMatrix g = coeff_grid(cfg, coeffs);
  const CMatrix et = angle_values(cfg, theta_pts);
  const CMatrix er = range_values(cfg, range_pts);
  // C(theta, r) = sum_kl G(k,l) conj(psi_k(theta) psi_l(r))
  return et.adjoint() * g * er.conjugate();
}

CVector project_gridded_map(const BasisConfig& cfg, const CMatrix& map,
                            const RVector& theta_pts,
                            const RVector& range_pts) {
  if (map.rows() != theta_pts.size() || map.cols() != range_pts.size())
    throw std::invalid_argument("map shape does not match the grids");
  const CMatrix et = angle_values(cfg, theta_pts);
  const CMatrix er = range_values(cfg, range_pts);
  const RVector wt = uniform_trapezoid_weights(theta_pts);
  const RVector wr = uniform_trapezoid_weights(range_pts);
  const CMatrix g =
      et * wt.asDiagonal() * map * wr.asDiagonal() * er.transpose();
  CVector out(cfg.flat_size());
  for (int k = 0; k < cfg.n_angle; ++k)
    for (int l = 0; l < cfg.n_range; ++l) out[cfg.flat_index(k, l)] = g(k, l);
  return out;
}

CMatrix synthesize_frames_noiseless(const ForwardModel& fm,
                                    const CMatrix& chain) {
  if (chain.rows() != fm.m.cols())
    throw std::invalid_argument("chain dimension does not match the model");
  return fm.m * chain;
}

CMatrix add_measurement_noise(const CMatrix& clean, double noise_precision,
                              std::uint64_t seed) {
  CMatrix y = clean;
  Rng rng(seed);
  for (Eigen::Index n = 0; n < y.cols(); ++n)
    for (Eigen::Index i = 0; i < y.rows(); ++i)
      y(i, n) += draw_complex_gaussian(rng, 0.0, noise_precision);
  return y;
}

CMatrix synthesize_frames(const ForwardModel& fm, const CMatrix& chain,
                          std::uint64_t seed) {
  return add_measurement_noise(synthesize_frames_noiseless(fm, chain),
                               fm.noise_precision, seed);
}

DirectFrame synthesize_frame_direct(const ArrayGeometry& geom,
                                    const ChirpTiming& timing,
                                    const CMatrix& map,
                                    const RVector& theta_pts,
                                    const RVector& range_pts) {
  timing.validate(geom.n_tx());
  if (map.rows() != theta_pts.size() || map.cols() != range_pts.size())
    throw std::invalid_argument("map shape does not match the grids");
  const RVector wt = uniform_trapezoid_weights(theta_pts);
  const RVector wr = uniform_trapezoid_weights(range_pts);
  const int ns = timing.samples_per_slot();
  const int total = timing.total_samples(geom.n_tx());
  const double c = kSpeedOfLight;
  const double kap = timing.chirp_rate();

  DirectFrame out;
  // Fastest phase rates: 4pi(f_c+B)/c per meter of range, 2pi*d_max per
  // radian of angle (d in wavelengths); demand >= 4 points per period.
  double d_max = 0.0;
  for (double rx : geom.rx_pos)
    for (double tx : geom.tx_pos) d_max = std::max(d_max, std::abs(rx + tx));
  const double dr = (range_pts[range_pts.size() - 1] - range_pts[0]) /
                    static_cast<double>(range_pts.size() - 1);
  const double dt = (theta_pts[theta_pts.size() - 1] - theta_pts[0]) /
                    static_cast<double>(theta_pts.size() - 1);
  const double r_period = c / (2.0 * (timing.carrier_hz + timing.bandwidth_hz));
  if (dr > r_period / 4.0 || (d_max > 0.0 && dt > 1.0 / (4.0 * d_max)))
    out.under_resolved = true;

  CVector y = CVector::Zero(geom.n_rx() * total);
  const CMatrix cw = wt.asDiagonal() * map;  // theta-weighted field
  CVector f(range_pts.size());
  for (int m = 0; m < geom.n_tx(); ++m) {
    // theta integral first: g(j, q) = sum_p w_p A^{(j,m)}(theta_p) C(p, q)
    CMatrix a(geom.n_rx(), theta_pts.size());
    for (int j = 0; j < geom.n_rx(); ++j) {
      const double d = geom.rx_pos[j] + geom.tx_pos[m];
      for (Eigen::Index p = 0; p < theta_pts.size(); ++p)
        a(j, p) = std::polar(1.0, 2.0 * kPi * d * std::sin(theta_pts[p]));
    }
    const CMatrix g = a * cw;
    for (int i = 0; i < ns; ++i) {
      const double t_loc = (i + 0.5) / timing.sample_rate_hz;
      const double t_abs = m * timing.pulse_s + t_loc;
      for (Eigen::Index q = 0; q < range_pts.size(); ++q) {
        const double s = t_loc - 2.0 * range_pts[q] / c;
        if (s < 0.0 || s >= timing.pulse_s) {
          f[q] = 0.0;
          continue;
        }
        const double ph = kPi * kap * s * s +
                          2.0 * kPi * timing.carrier_hz *
                              (t_abs - 2.0 * range_pts[q] / c);
        f[q] = std::polar(wr[q], ph);
      }
      const CVector col = g * f;
      for (int j = 0; j < geom.n_rx(); ++j)
        y[j * total + m * ns + i] = col[j];
    }
  }
  out.y = std::move(y);
  return out;
}

double snr_to_noise_precision(double snr_db, const CMatrix& m,
                              const CVector& gamma_ref) {
  if (gamma_ref.size() != m.cols())
    throw std::invalid_argument("snr: reference does not match the model");
  const double p_sig = (m * gamma_ref).squaredNorm() / m.rows();
  if (p_sig <= 0.0)
    throw std::invalid_argument("snr: zero reference signal power");
  return std::pow(10.0, snr_db / 10.0) / p_sig;
}

}  // namespace clutter
