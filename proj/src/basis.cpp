#include "clutter/basis.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace clutter {

namespace {
constexpr double kPi = std::numbers::pi;

// 8-point Gauss-Legendre on [-1, 1].
constexpr double kGlx[8] = {-0.9602898564975363, -0.7966664774136267,
                            -0.5255324099163290, -0.1834346424956498,
                            0.1834346424956498,  0.5255324099163290,
                            0.7966664774136267,  0.9602898564975363};
constexpr double kGlw[8] = {0.1012285362903763, 0.2223810344533745,
                            0.3137066458778873, 0.3626837833783620,
                            0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};
}  // namespace

void BasisConfig::validate() const {
  if (n_angle < 1 || n_range < 1)
    throw std::invalid_argument("basis: truncation sizes must be positive");
  if (!(theta_hi > theta_lo) || !(range_hi > range_lo))
    throw std::invalid_argument("basis: empty domain");
}

int wave_number(int idx) {
  if (idx < 0) throw std::invalid_argument("basis: negative index");
  if (idx == 0) return 0;
  return (idx % 2 == 1) ? (idx + 1) / 2 : -idx / 2;
}

int max_wave_number(int count) {
  int m = 0;
  for (int i = 0; i < count; ++i) m = std::max(m, std::abs(wave_number(i)));
  return m;
}

Complex eval_angle_basis(const BasisConfig& cfg, int k, double theta) {
  const double len = cfg.theta_len();
  const double ph = 2.0 * kPi * wave_number(k) * (theta - cfg.theta_lo) / len;
  return std::polar(1.0 / std::sqrt(len), ph);
}

Complex eval_range_basis(const BasisConfig& cfg, int l, double r) {
  const double len = cfg.range_len();
  const double ph = 2.0 * kPi * wave_number(l) * (r - cfg.range_lo) / len;
  return std::polar(1.0 / std::sqrt(len), ph);
}

Complex eval_basis(const BasisConfig& cfg, int k, int l, double theta,
                   double r) {
  return eval_angle_basis(cfg, k, theta) * eval_range_basis(cfg, l, r);
}

int default_grid_density(const BasisConfig& cfg) {
  const int numax =
      std::max(max_wave_number(cfg.n_angle), max_wave_number(cfg.n_range));
  return std::max(256, 8 * numax);
}

void trapezoid_grid(double lo, double hi, int n, RVector& pts, RVector& wts) {
  if (n < 2) throw std::invalid_argument("trapezoid_grid: need >= 2 points");
  pts.resize(n);
  wts.resize(n);
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) pts[i] = lo + h * i;
  wts.setConstant(h);
  wts[0] *= 0.5;
  wts[n - 1] *= 0.5;
}

namespace {

// 1-D Gram of one family by trapezoid quadrature.
CMatrix family_gram(int count, double lo, double hi, int n,
                    const std::function<Complex(int, double)>& eval) {
  RVector pts, wts;
  trapezoid_grid(lo, hi, n, pts, wts);
  CMatrix vals(count, n);
  for (int k = 0; k < count; ++k)
    for (int i = 0; i < n; ++i) vals(k, i) = eval(k, pts[i]);
  CMatrix g(count, count);
  for (int k = 0; k < count; ++k)
    for (int kk = 0; kk < count; ++kk) {
      Complex acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += std::conj(vals(k, i)) * vals(kk, i) * wts[i];
      g(k, kk) = acc;
    }
  return g;
}

}  // namespace

double check_orthonormality(const BasisConfig& cfg, int density) {
  cfg.validate();
  const int n = density > 0 ? density : default_grid_density(cfg);
  CMatrix gt = family_gram(
      cfg.n_angle, cfg.theta_lo, cfg.theta_hi, n,
      [&](int k, double x) { return eval_angle_basis(cfg, k, x); });
  CMatrix gr = family_gram(
      cfg.n_range, cfg.range_lo, cfg.range_hi, n,
      [&](int l, double x) { return eval_range_basis(cfg, l, x); });
  double dev = 0.0;
  for (int k = 0; k < cfg.n_angle; ++k)
    for (int kk = 0; kk < cfg.n_angle; ++kk)
      for (int l = 0; l < cfg.n_range; ++l)
        for (int ll = 0; ll < cfg.n_range; ++ll) {
          const Complex v = gt(k, kk) * gr(l, ll);
          const double id = (k == kk && l == ll) ? 1.0 : 0.0;
          dev = std::max(dev, std::abs(v - id));
        }
  return dev;
}

ArrayGeometry ArrayGeometry::mimo_ula(int n_rx, int n_tx) {
  if (n_rx < 1 || n_tx < 1)
    throw std::invalid_argument("geometry: need at least one element");
  ArrayGeometry g;
  g.rx_pos.resize(n_rx);
  g.tx_pos.resize(n_tx);
  // phase centre at the array centre so the virtual aperture is symmetric
  for (int j = 0; j < n_rx; ++j) g.rx_pos[j] = 0.5 * (j - 0.5 * (n_rx - 1));
  for (int m = 0; m < n_tx; ++m)
    g.tx_pos[m] = 0.5 * n_rx * (m - 0.5 * (n_tx - 1));
  return g;
}

int ChirpTiming::samples_per_slot() const {
  return static_cast<int>(std::llround(pulse_s * sample_rate_hz));
}

void ChirpTiming::validate(int n_tx) const {
  if (carrier_hz < 0 || bandwidth_hz < 0)
    throw std::invalid_argument("timing: negative frequency");
  if (pulse_s <= 0 || sample_rate_hz <= 0 || prf_hz <= 0)
    throw std::invalid_argument("timing: nonpositive pulse/rate/prf");
  if (samples_per_slot() < 1)
    throw std::invalid_argument("timing: empty slot");
  if (n_tx * pulse_s > 1.0 / prf_hz)
    throw std::invalid_argument("timing: TDM slots exceed the pulse interval");
}

CMatrix expand_steering(const BasisConfig& cfg, const ArrayGeometry& geom,
                        int tx, int density) {
  cfg.validate();
  if (geom.n_rx() < 1 || geom.n_tx() < 1)
    throw std::invalid_argument("expand_steering: empty geometry");
  if (tx < 0 || tx >= geom.n_tx())
    throw std::invalid_argument("expand_steering: bad transmitter index");

  const double dmax = geom.rx_pos.cwiseAbs().maxCoeff() +
                      geom.tx_pos.cwiseAbs().maxCoeff();
  const int numax = max_wave_number(cfg.n_angle);
  const int n = density > 0
                    ? density
                    : std::max(4096, 64 * (numax + static_cast<int>(
                                                       std::ceil(2 * dmax))));
  RVector pts, wts;
  trapezoid_grid(cfg.theta_lo, cfg.theta_hi, n, pts, wts);

  CMatrix out = CMatrix::Zero(geom.n_rx(), cfg.n_angle);
  CMatrix psis(cfg.n_angle, n);
  for (int k = 0; k < cfg.n_angle; ++k)
    for (int i = 0; i < n; ++i)
      psis(k, i) = std::conj(eval_angle_basis(cfg, k, pts[i])) * wts[i];
  for (int j = 0; j < geom.n_rx(); ++j) {
    const double d = geom.rx_pos[j] + geom.tx_pos[tx];
    for (int i = 0; i < n; ++i) {
      const Complex a = std::polar(1.0, 2.0 * kPi * d * std::sin(pts[i]));
      for (int k = 0; k < cfg.n_angle; ++k) out(j, k) += psis(k, i) * a;
    }
  }
  return out;
}

Complex oscillatory_integral(double a, double b, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  const auto phase = [a, b](double r) { return (a * r + b) * r; };
  const auto dphase = [a, b](double r) { return 2.0 * a * r + b; };
  // panelled 8-point Gauss-Legendre, <= ~1 rad per panel
  const auto gauss_panels = [&](double l, double h, double span) {
    const int panels = std::max(1, static_cast<int>(std::ceil(span)));
    Complex acc = 0.0;
    const double w = (h - l) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = l + (p + 0.5) * w;
      for (int q = 0; q < 8; ++q)
        acc += kGlw[q] * std::polar(0.5 * w, phase(mid + 0.5 * w * kGlx[q]));
    }
    return acc;
  };
  const auto span_bound = [&](double l, double h) {
    const double d = h - l;
    return std::max(std::abs(dphase(l)), std::abs(dphase(h))) * d +
           std::abs(a) * d * d;
  };

  const double span_ub = span_bound(lo, hi);
  if (span_ub <= 3000.0) return gauss_panels(lo, hi, span_ub);

  // stationary point inside: direct quadrature on a patch around it, sized
  // so the boundary series stays valid on the remainder (|phi'|^2 = 1000|a|
  // at the patch edge)
  const double rs = -b / (2.0 * a);
  if (a != 0.0 && rs > lo && rs < hi) {
    const double half = std::sqrt(250.0 / std::abs(a));
    const double mlo = std::max(lo, rs - half), mhi = std::min(hi, rs + half);
    Complex acc = gauss_panels(mlo, mhi, span_bound(mlo, mhi));
    if (mlo > lo) acc += oscillatory_integral(a, b, lo, mlo);
    if (mhi < hi) acc += oscillatory_integral(a, b, mhi, hi);
    return acc;
  }

  // fast monotone phase: three-term integration-by-parts boundary series
  const auto boundary = [&](double r) {
    const double p = dphase(r);
    const Complex w(-2.0 * a / (p * p * p),
                    -1.0 / p + 12.0 * a * a / (p * p * p * p * p));
    return std::polar(1.0, phase(r)) * w;
  };
  return boundary(hi) - boundary(lo);
}

CMatrix expand_waveform(const BasisConfig& cfg, const ChirpTiming& timing,
                        int n_tx, int tx) {
  cfg.validate();
  timing.validate(n_tx);
  if (tx < 0 || tx >= n_tx)
    throw std::invalid_argument("expand_waveform: bad transmitter index");

  const int ns = timing.samples_per_slot();
  const int total = timing.total_samples(n_tx);
  const double rlen = cfg.range_len();
  const double kap = timing.chirp_rate();
  const double c = kSpeedOfLight;
  const double a = 4.0 * kPi * kap / (c * c);
  const double norm = 1.0 / std::sqrt(rlen);

  CMatrix out = CMatrix::Zero(total, cfg.n_range);
  for (int i = 0; i < ns; ++i) {
    const double t_loc = (i + 0.5) / timing.sample_rate_hz;
    const double t_abs = tx * timing.pulse_s + t_loc;
    // echo gate: 0 <= t_loc - 2r/c < pulse
    const double gate_hi = std::min(cfg.range_hi, 0.5 * c * t_loc);
    const double gate_lo =
        std::max(cfg.range_lo, 0.5 * c * (t_loc - timing.pulse_s));
    if (gate_hi <= gate_lo) continue;
    for (int l = 0; l < cfg.n_range; ++l) {
      const double nu = wave_number(l);
      const double b = -2.0 * kPi * nu / rlen - 4.0 * kPi * kap * t_loc / c -
                       4.0 * kPi * timing.carrier_hz / c;
      const double cphase = kPi * kap * t_loc * t_loc +
                            2.0 * kPi * timing.carrier_hz * t_abs +
                            2.0 * kPi * nu * cfg.range_lo / rlen;
      out(tx * ns + i, l) = std::polar(norm, cphase) *
                            oscillatory_integral(a, b, gate_lo, gate_hi);
    }
  }
  return out;
}

CMatrix kronecker(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

CMatrix pseudoinverse(const CMatrix& m, double rel_cutoff, int* rank_out) {
  if (m.size() == 0) throw std::invalid_argument("pseudoinverse: empty matrix");
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const double cut = rel_cutoff * sv[0];
  int rank = 0;
  RVector inv = RVector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut && sv[i] > 0.0) {
      inv[i] = 1.0 / sv[i];
      ++rank;
    }
  if (rank_out) *rank_out = rank;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

RVector message_covariance(const CMatrix& m_pinv, double noise_precision) {
  if (noise_precision <= 0.0)
    throw std::invalid_argument("message_covariance: nonpositive precision");
  RVector diag = m_pinv.rowwise().squaredNorm() / noise_precision;
  // pinv-truncated directions carry no data information; keep the stored
  // variance finite so downstream precisions stay positive
  const double cap = diag.maxCoeff() * 1e30;
  if (cap > 0.0)
    for (Eigen::Index j = 0; j < diag.size(); ++j)
      if (diag[j] <= 0.0) diag[j] = cap;
  return diag;
}

ForwardModel ForwardModel::with_noise_precision(double lambda_w) const {
  if (lambda_w <= 0.0)
    throw std::invalid_argument("forward model: nonpositive noise precision");
  ForwardModel out = *this;
  out.msg_cov_diag = msg_cov_diag * (noise_precision / lambda_w);
  out.noise_precision = lambda_w;
  return out;
}

CMatrix assemble_forward_matrix(const BasisConfig& cfg,
                                const ArrayGeometry& geom,
                                const ChirpTiming& timing) {
  cfg.validate();
  timing.validate(geom.n_tx());
  const int rows = geom.n_rx() * timing.total_samples(geom.n_tx());
  CMatrix out = CMatrix::Zero(rows, cfg.flat_size());
  for (int m = 0; m < geom.n_tx(); ++m) {
    const CMatrix ab = expand_steering(cfg, geom, m);
    const CMatrix bb = expand_waveform(cfg, timing, geom.n_tx(), m);
    out += kronecker(ab, bb);
  }
  return out;
}

CVector restrict_coefficients(const BasisConfig& from, const BasisConfig& to,
                              const CVector& coeffs) {
  if (to.n_angle > from.n_angle || to.n_range > from.n_range)
    throw std::invalid_argument("target family is not nested in the source");
  if (from.theta_lo != to.theta_lo || from.theta_hi != to.theta_hi ||
      from.range_lo != to.range_lo || from.range_hi != to.range_hi)
    throw std::invalid_argument("families span different domains");
  if (coeffs.size() != from.flat_size())
    throw std::invalid_argument("coefficient vector does not match the source");
  CVector out(to.flat_size());
  for (int k = 0; k < to.n_angle; ++k)
    for (int l = 0; l < to.n_range; ++l)
      out[to.flat_index(k, l)] = coeffs[from.flat_index(k, l)];
  return out;
}

ForwardModel assemble_forward_model(const BasisConfig& cfg,
                                    const ArrayGeometry& geom,
                                    const ChirpTiming& timing,
                                    double noise_precision, double sv_cutoff) {
  ForwardModel fm;
  fm.m = assemble_forward_matrix(cfg, geom, timing);
  fm.m_pinv = pseudoinverse(fm.m, sv_cutoff, &fm.rank);
  fm.rank_deficient = fm.rank < cfg.flat_size();
  fm.noise_precision = noise_precision;
  fm.msg_cov_diag = message_covariance(fm.m_pinv, noise_precision);
  return fm;
}

}  // namespace clutter
