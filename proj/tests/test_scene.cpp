#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "clutter/rng.hpp"
#include "clutter/scene.hpp"

using namespace clutter;

namespace {

ARParams small_params(double alpha) {
  ARParams p;
  p.alpha = alpha;
  p.mu = CVector(3);
  p.mu << Complex(1.0, -1.0), Complex(0.3, 2.0), Complex(-2.0, 0.5);
  p.lambda_diag = RVector(3);
  p.lambda_diag << 0.5, 2.0, 8.0;
  return p;
}

}  // namespace

TEST_CASE("innovation law that keeps the chain stationary") {
  ARParams p = small_params(0.0);
  NoiseParams n = stationary_noise_params(p);
  CHECK((n.mean - p.mu).norm() == 0.0);
  CHECK((n.precision_diag - p.lambda_diag).norm() == 0.0);

  p = small_params(0.5);
  p.mu.setConstant(Complex(2.0, 0.0));
  p.lambda_diag.setConstant(1.0);
  n = stationary_noise_params(p);
  CHECK(n.mean[0].real() == doctest::Approx(1.0));
  CHECK(n.precision_diag[0] == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("chain parameter validation") {
  ARParams p = small_params(0.5);
  p.alpha = -0.1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.alpha = 0.9995;  // past the shared clamp bound
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params(0.5);
  p.lambda_diag[1] = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = small_params(0.5);
  p.lambda_diag = RVector::Ones(2);
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(draw_ar_chain(small_params(0.5), 0, 1),
                  std::invalid_argument);
}

TEST_CASE("long chain matches its stationary moments") {
  const ARParams p = small_params(0.7);
  const CMatrix chain = draw_ar_chain(p, 100000, 42);
  REQUIRE(chain.rows() == 3);
  REQUIRE(chain.cols() == 100000);

  for (int j = 0; j < 3; ++j) {
    const Complex mean = chain.row(j).mean();
    double var = 0.0;
    for (Eigen::Index n = 0; n < chain.cols(); ++n)
      var += std::norm(chain(j, n) - mean);
    var /= static_cast<double>(chain.cols());
    CHECK(var == doctest::Approx(1.0 / p.lambda_diag[j]).epsilon(0.05));
    CHECK(std::abs(mean - p.mu[j]) < 0.08 / std::sqrt(p.lambda_diag[j]));
  }

  double lag1 = 0.0, lag0 = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Complex mean = chain.row(j).mean();
    for (Eigen::Index n = 1; n < chain.cols(); ++n) {
      lag1 += (std::conj(chain(j, n - 1) - mean) * (chain(j, n) - mean)).real();
      lag0 += std::norm(chain(j, n - 1) - mean);
    }
  }
  CHECK(lag1 / lag0 == doctest::Approx(0.7).epsilon(0.03));
}

TEST_CASE("white chain has no lag-1 correlation") {
  const ARParams p = small_params(0.0);
  const CMatrix chain = draw_ar_chain(p, 50000, 9);
  double lag1 = 0.0, lag0 = 0.0;
  for (int j = 0; j < 3; ++j) {
    const Complex mean = chain.row(j).mean();
    for (Eigen::Index n = 1; n < chain.cols(); ++n) {
      lag1 += (std::conj(chain(j, n - 1) - mean) * (chain(j, n) - mean)).real();
      lag0 += std::norm(chain(j, n - 1) - mean);
    }
  }
  CHECK(std::abs(lag1 / lag0) < 0.02);
}

TEST_CASE("huge precision pins the chain to the process mean") {
  ARParams p = small_params(0.3);
  p.lambda_diag.setConstant(1e12);
  const CMatrix chain = draw_ar_chain(p, 50, 3);
  for (Eigen::Index n = 0; n < chain.cols(); ++n)
    CHECK((chain.col(n) - p.mu).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("near-static high-precision chain stays near the scatterer map") {
  // the regime used by the scatterer-map study: alpha 0.9, lambda 1e6
  ARParams p;
  p.alpha = 0.9;
  p.mu = CVector(8);
  for (int j = 0; j < 8; ++j) p.mu[j] = Complex(0.2 * j - 0.7, 0.1 * j);
  p.lambda_diag = RVector::Constant(8, 1e6);
  const CMatrix chain = draw_ar_chain(p, 100, 11);
  double worst = 0.0;
  for (Eigen::Index n = 0; n < chain.cols(); ++n)
    worst = std::max(worst, (chain.col(n) - p.mu).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-2);
  CHECK(worst > 0.0);
}

TEST_CASE("chain draws are seed deterministic") {
  const ARParams p = small_params(0.4);
  const CMatrix a = draw_ar_chain(p, 32, 123);
  const CMatrix b = draw_ar_chain(p, 32, 123);
  const CMatrix c = draw_ar_chain(p, 32, 124);
  CHECK((a - b).norm() == 0.0);
  CHECK((a - c).norm() > 0.0);
}

TEST_CASE("render and gridded projection invert each other") {
  const BasisConfig cfg;
  Rng rng(7);
  CVector coeffs(cfg.flat_size());
  for (Eigen::Index j = 0; j < coeffs.size(); ++j)
    coeffs[j] = draw_complex_gaussian(rng, Complex(0.0), 1.0);
  const RVector tp = RVector::LinSpaced(256, cfg.theta_lo, cfg.theta_hi);
  const RVector rp = RVector::LinSpaced(256, cfg.range_lo, cfg.range_hi);
  const CMatrix map = render_map(cfg, coeffs, tp, rp);
  const CVector back = project_gridded_map(cfg, map, tp, rp);
  CHECK((back - coeffs).norm() < 1e-8);
}

TEST_CASE("rendering is linear in the coefficients") {
  const BasisConfig cfg;
  Rng rng(8);
  CVector c1(cfg.flat_size()), c2(cfg.flat_size());
  for (Eigen::Index j = 0; j < c1.size(); ++j) {
    c1[j] = draw_complex_gaussian(rng, Complex(0.0), 1.0);
    c2[j] = draw_complex_gaussian(rng, Complex(0.0), 1.0);
  }
  const RVector tp = RVector::LinSpaced(16, cfg.theta_lo, cfg.theta_hi);
  const RVector rp = RVector::LinSpaced(16, cfg.range_lo, cfg.range_hi);
  const CMatrix sum = render_map(cfg, (c1 + c2).eval(), tp, rp);
  const CMatrix parts =
      render_map(cfg, c1, tp, rp) + render_map(cfg, c2, tp, rp);
  CHECK((sum - parts).norm() < 1e-12);
}

TEST_CASE("DC-only coefficients render a constant field") {
  const BasisConfig cfg;
  CVector coeffs = CVector::Zero(cfg.flat_size());
  coeffs[0] = Complex(3.0, -1.0);
  const RVector tp = RVector::LinSpaced(9, cfg.theta_lo, cfg.theta_hi);
  const RVector rp = RVector::LinSpaced(9, cfg.range_lo, cfg.range_hi);
  const CMatrix map = render_map(cfg, coeffs, tp, rp);
  const Complex expect =
      coeffs[0] / std::sqrt(cfg.theta_len() * cfg.range_len());
  for (Eigen::Index i = 0; i < map.rows(); ++i)
    for (Eigen::Index j = 0; j < map.cols(); ++j)
      CHECK(std::abs(map(i, j) - expect) < 1e-12);
}

TEST_CASE("point-source projection") {
  const BasisConfig cfg;
  CHECK(project_scatterers(cfg, {}).norm() == 0.0);

  const Scatterer s1{0.1, 20.0, Complex(2.0, 1.0)};
  const Scatterer s2{-0.4, 35.0, Complex(-1.0, 0.5)};
  const CVector a = project_scatterers(cfg, {s1});
  const CVector b = project_scatterers(cfg, {s2});
  const CVector both = project_scatterers(cfg, {s1, s2});
  CHECK((both - a - b).norm() < 1e-12);

  // coefficient convention: gamma = amplitude * psi(source)
  CHECK(std::abs(a[0] - s1.amplitude * eval_basis(cfg, 0, 0, 0.1, 20.0)) <
        1e-14);

  CHECK_THROWS_AS(project_scatterers(cfg, {Scatterer{1.0, 20.0, 1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(project_scatterers(cfg, {Scatterer{0.0, 60.0, 1.0}}),
                  std::invalid_argument);
}

TEST_CASE("rendered point source peaks at its location") {
  BasisConfig cfg;
  cfg.n_angle = 12;
  cfg.n_range = 12;
  const double st = 0.2, sr = 30.0;
  const CVector coeffs = project_scatterers(cfg, {Scatterer{st, sr, 1.0}});
  const RVector tp = RVector::LinSpaced(97, cfg.theta_lo, cfg.theta_hi);
  const RVector rp = RVector::LinSpaced(101, cfg.range_lo, cfg.range_hi);
  const CMatrix map = render_map(cfg, coeffs, tp, rp);
  Eigen::Index bi = 0, bj = 0;
  map.cwiseAbs().maxCoeff(&bi, &bj);
  CHECK(std::abs(tp[bi] - st) < 2.0 * (tp[1] - tp[0]));
  CHECK(std::abs(rp[bj] - sr) < 2.0 * (rp[1] - rp[0]));
}

TEST_CASE("frame synthesis is signal plus an independent noise draw") {
  Rng rng(21);
  ForwardModel fm;
  fm.m = CMatrix(6, 3);
  for (Eigen::Index i = 0; i < fm.m.rows(); ++i)
    for (Eigen::Index j = 0; j < fm.m.cols(); ++j)
      fm.m(i, j) = draw_complex_gaussian(rng, Complex(0.0), 1.0);
  fm.noise_precision = 4.0;
  CMatrix chain(3, 5);
  for (Eigen::Index i = 0; i < chain.size(); ++i)
    chain.data()[i] = draw_complex_gaussian(rng, Complex(0.0), 1.0);

  const CMatrix clean = synthesize_frames_noiseless(fm, chain);
  CHECK((clean - fm.m * chain).norm() == 0.0);
  const CMatrix y = synthesize_frames(fm, chain, 77);
  CHECK((y - add_measurement_noise(clean, fm.noise_precision, 77)).norm() ==
        0.0);
  const CMatrix noise =
      add_measurement_noise(CMatrix::Zero(6, 5), fm.noise_precision, 77);
  CHECK((y - clean - noise).norm() < 1e-12);

  CHECK_THROWS_AS(synthesize_frames_noiseless(fm, CMatrix::Zero(4, 5)),
                  std::invalid_argument);
}

TEST_CASE("measurement noise is circular with the requested power") {
  const double lw = 4.0;
  const CMatrix w = add_measurement_noise(CMatrix::Zero(200, 500), lw, 99);
  double p_re = 0.0, p_im = 0.0, cross = 0.0;
  Complex mean = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const Complex v = w.data()[i];
    mean += v;
    p_re += v.real() * v.real();
    p_im += v.imag() * v.imag();
    cross += v.real() * v.imag();
  }
  const double n = static_cast<double>(w.size());
  CHECK(p_re / n == doctest::Approx(1.0 / (2.0 * lw)).epsilon(0.02));
  CHECK(p_im / n == doctest::Approx(1.0 / (2.0 * lw)).epsilon(0.02));
  CHECK(std::abs(cross / n) < 0.01 / lw);
  CHECK(std::abs(mean / n) < 0.005);
}

TEST_CASE("huge noise precision leaves the signal untouched") {
  ForwardModel fm;
  fm.m = CMatrix::Identity(4, 4);
  fm.noise_precision = 1e12;
  const CMatrix chain = CMatrix::Constant(4, 3, Complex(1.0, 1.0));
  const CMatrix y = synthesize_frames(fm, chain, 5);
  CHECK((y - chain).norm() / chain.norm() < 1e-4);
}

TEST_CASE("noise precision from a target SNR") {
  Rng rng(31);
  CMatrix m(24, 6);
  for (Eigen::Index i = 0; i < m.size(); ++i)
    m.data()[i] = draw_complex_gaussian(rng, Complex(0.0), 1.0);
  CVector gamma(6);
  for (Eigen::Index j = 0; j < 6; ++j)
    gamma[j] = draw_complex_gaussian(rng, Complex(0.0), 1.0);

  const double lw = snr_to_noise_precision(7.0, m, gamma);
  const double p_sig = (m * gamma).squaredNorm() / m.rows();
  CHECK(lw == doctest::Approx(std::pow(10.0, 0.7) / p_sig).epsilon(1e-12));

  // measured SNR of synthetic frames lands within half a dB
  CMatrix clean(24, 100);
  for (int n = 0; n < 100; ++n) clean.col(n) = m * gamma;
  const CMatrix y = add_measurement_noise(clean, lw, 17);
  const double p_noise = (y - clean).squaredNorm() / y.size();
  const double snr_meas = 10.0 * std::log10(p_sig / p_noise);
  CHECK(snr_meas == doctest::Approx(7.0).epsilon(0.07));

  CHECK_THROWS_AS(snr_to_noise_precision(0.0, m, CVector::Zero(6)),
                  std::invalid_argument);
  CHECK_THROWS_AS(snr_to_noise_precision(0.0, m, CVector::Zero(4)),
                  std::invalid_argument);
}

TEST_CASE("direct synthesis of a zero field is zero") {
  const ArrayGeometry geom = ArrayGeometry::mimo_ula(2, 1);
  ChirpTiming t;
  t.carrier_hz = 1e7;
  t.bandwidth_hz = 1e6;
  t.pulse_s = 8e-6;
  t.sample_rate_hz = 4e6;
  const RVector tp = RVector::LinSpaced(32, -0.7, 0.7);
  const RVector rp = RVector::LinSpaced(128, 0.0, 50.0);
  const DirectFrame out =
      synthesize_frame_direct(geom, t, CMatrix::Zero(32, 128), tp, rp);
  CHECK(out.y.norm() == 0.0);
  CHECK_FALSE(out.under_resolved);
  CHECK(out.y.size() == geom.n_rx() * t.total_samples(geom.n_tx()));

  CHECK_THROWS_AS(
      synthesize_frame_direct(geom, t, CMatrix::Zero(32, 64), tp, rp),
      std::invalid_argument);
}

TEST_CASE("direct synthesis flags grids that cannot resolve the carrier") {
  const ArrayGeometry geom = ArrayGeometry::mimo_ula(2, 1);
  ChirpTiming t;  // 10 GHz carrier: range period ~ 1.5 cm
  t.sample_rate_hz = 4e6;
  const RVector tp = RVector::LinSpaced(32, -0.7, 0.7);
  const RVector rp = RVector::LinSpaced(128, 0.0, 50.0);
  const DirectFrame out =
      synthesize_frame_direct(geom, t, CMatrix::Zero(32, 128), tp, rp);
  CHECK(out.under_resolved);
}

TEST_CASE("direct synthesis converges under grid refinement") {
  BasisConfig cfg;
  cfg.n_angle = 4;
  cfg.n_range = 4;
  const ArrayGeometry geom = ArrayGeometry::mimo_ula(2, 1);
  ChirpTiming t;
  t.carrier_hz = 1e7;
  t.bandwidth_hz = 1e6;
  t.pulse_s = 8e-6;
  t.sample_rate_hz = 4e6;

  Rng rng(13);
  CVector gamma(cfg.flat_size());
  for (Eigen::Index j = 0; j < gamma.size(); ++j)
    gamma[j] = draw_complex_gaussian(rng, Complex(0.0), 1.0);

  CVector y[3];
  for (int dens = 0; dens < 3; ++dens) {
    const int nt = 64 << dens, nr = 128 << dens;
    const RVector tp = RVector::LinSpaced(nt, cfg.theta_lo, cfg.theta_hi);
    const RVector rp = RVector::LinSpaced(nr, cfg.range_lo, cfg.range_hi);
    const CMatrix map = render_map(cfg, gamma, tp, rp);
    const DirectFrame out = synthesize_frame_direct(geom, t, map, tp, rp);
    CHECK_FALSE(out.under_resolved);
    y[dens] = out.y;
  }
  // first-order refinement: the waveform gate edges cut through grid cells
  const double step01 = (y[0] - y[1]).norm() / y[1].norm();
  const double step12 = (y[1] - y[2]).norm() / y[2].norm();
  CHECK(step01 < 2e-2);  // measured 7.5e-3
  CHECK(step12 < step01);

  // and agrees with the expanded forward operator on the same field
  const CVector via_model = assemble_forward_matrix(cfg, geom, t) * gamma;
  CHECK((y[2] - via_model).norm() / via_model.norm() < 1e-2);
}
