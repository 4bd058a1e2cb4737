#pragma once

#include <vector>

#include "clutter/types.hpp"

namespace clutter {

// Separable complex-exponential family on [theta_lo,theta_hi] x [range_lo,range_hi].
// Index order per dimension is 0, +1, -1, +2, -2, ... (DC first, ascending
// wave number), so truncations are nested. Flattened coefficient index is
// angle-major with the range index fastest: flat = k * n_range + l.
struct BasisConfig {
  int n_angle = 6;
  int n_range = 6;
  double theta_lo = -0.7853981633974483;  // pi/4
  double theta_hi = 0.7853981633974483;
  double range_lo = 0.0;
  double range_hi = 50.0;

  int flat_size() const { return n_angle * n_range; }
  int flat_index(int k, int l) const { return k * n_range + l; }
  double theta_len() const { return theta_hi - theta_lo; }
  double range_len() const { return range_hi - range_lo; }
  void validate() const;  // throws std::invalid_argument
};

// 0, +1, -1, +2, -2, ...
int wave_number(int idx);
int max_wave_number(int count);

Complex eval_angle_basis(const BasisConfig& cfg, int k, double theta);
Complex eval_range_basis(const BasisConfig& cfg, int l, double r);
Complex eval_basis(const BasisConfig& cfg, int k, int l, double theta, double r);

// Default trapezoid density per dimension: max(256, 8 * highest wave number).
int default_grid_density(const BasisConfig& cfg);

// Uniform grid with trapezoid weights over [lo, hi], n >= 2 points.
void trapezoid_grid(double lo, double hi, int n, RVector& pts, RVector& wts);

// Max |Gram - I| over the flattened 2-D family, Gram entries by trapezoid
// quadrature at `density` points per dimension (0 selects the default).
double check_orthonormality(const BasisConfig& cfg, int density = 0);

// MIMO geometry, element positions in carrier wavelengths.
struct ArrayGeometry {
  RVector rx_pos;
  RVector tx_pos;
  int n_rx() const { return static_cast<int>(rx_pos.size()); }
  int n_tx() const { return static_cast<int>(tx_pos.size()); }
  // Half-wavelength receive ULA; transmit ULA at n_rx half-wavelengths,
  // forming the standard filled virtual array.
  static ArrayGeometry mimo_ula(int n_rx, int n_tx);
};

// Linear up-chirp bursts in time-division slots, one slot per transmitter,
// slot length equal to the pulse. Sample instants sit mid-period within the
// active slot; echoes are attributed to the slot's own transmitter only.
struct ChirpTiming {
  double carrier_hz = 10e9;
  double bandwidth_hz = 20e6;
  double pulse_s = 16e-6;
  double sample_rate_hz = 256e6;
  double prf_hz = 10.0;

  int samples_per_slot() const;
  int total_samples(int n_tx) const { return n_tx * samples_per_slot(); }
  double chirp_rate() const { return bandwidth_hz / pulse_s; }
  void validate(int n_tx) const;  // TDM feasibility: n_tx * pulse_s <= 1/prf
};

// Steering vector A^(j,m)(theta) = exp(i 2 pi (d_rx_j + d_tx_m) sin theta)
// expanded on the angle family: out(j, k) = <psi_k | A^(j,m)>.
CMatrix expand_steering(const BasisConfig& cfg, const ArrayGeometry& geom,
                        int tx, int density = 0);

// Delayed waveform u(t - tau) e^{i w_c (t - tau)}, tau = 2r/c, expanded on
// the range family per sample instant: out(i, l) = <psi_l | u(t_i - .)>.
// Rows outside transmitter tx's slot are zero.
CMatrix expand_waveform(const BasisConfig& cfg, const ChirpTiming& timing,
                        int n_tx, int tx);

// integral of exp(i (a r^2 + b r)) dr over [lo, hi]; exact boundary series
// for fast phases, panelled Gauss-Legendre otherwise.
Complex oscillatory_integral(double a, double b, double lo, double hi);

CMatrix kronecker(const CMatrix& a, const CMatrix& b);

// Moore-Penrose via SVD; singular values below rel_cutoff * s_max are
// dropped. rank_out reports the retained count.
CMatrix pseudoinverse(const CMatrix& m, double rel_cutoff = 1e-10,
                      int* rank_out = nullptr);

// diag(M^+ (M^+)^H) / lambda_w, computed row-wise.
RVector message_covariance(const CMatrix& m_pinv, double noise_precision);

struct ForwardModel {
  CMatrix m;             // (n_rx * n_samples) x (n_angle * n_range)
  CMatrix m_pinv;
  RVector msg_cov_diag;  // per-coefficient data-message variance
  double noise_precision = 1.0;
  int rank = 0;
  bool rank_deficient = false;

  ForwardModel with_noise_precision(double lambda_w) const;
};

// Sum over transmit slots of kron(steering expansion, waveform expansion).
CMatrix assemble_forward_matrix(const BasisConfig& cfg,
                                const ArrayGeometry& geom,
                                const ChirpTiming& timing);

// Re-index coefficients of a larger family onto a nested smaller one over
// the same domain; shared wave-number ordering means modes simply drop.
CVector restrict_coefficients(const BasisConfig& from, const BasisConfig& to,
                              const CVector& coeffs);

ForwardModel assemble_forward_model(const BasisConfig& cfg,
                                    const ArrayGeometry& geom,
                                    const ChirpTiming& timing,
                                    double noise_precision = 1.0,
                                    double sv_cutoff = 1e-10);

}  // namespace clutter
