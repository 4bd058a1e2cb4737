#pragma once

#include <cstdint>
#include <vector>

#include "clutter/basis.hpp"
#include "clutter/types.hpp"

namespace clutter {


// First-order autoregressive coefficient field: frame-to-frame update
// G_n = alpha G_{n-1} + V_n around a stationary mean mu with per-component
// stationary precision lambda.
struct ARParams {
  double alpha = 0.1;
  CVector mu;
  RVector lambda_diag;
  void validate() const;
};

struct NoiseParams {
  CVector mean;            // mu (1 - alpha)
  RVector precision_diag;  // lambda / (1 - alpha^2)
};

// Innovation distribution that keeps the chain stationary at (mu, lambda).
NoiseParams stationary_noise_params(const ARParams& p);

// n_frames columns; column 0 drawn from the stationary law.
CMatrix draw_ar_chain(const ARParams& p, int n_frames, std::uint64_t seed);

struct Scatterer {
  double theta = 0.0;
  double range = 0.0;
  Complex amplitude = 1.0;
};

// Orthogonal projection of a sum of point sources onto the truncated family.
CVector project_scatterers(const BasisConfig& cfg,
                           const std::vector<Scatterer>& scatterers);

// Coefficients -> field values on a (theta x range) grid. Rows follow
// theta_pts, columns range_pts.
CMatrix render_map(const BasisConfig& cfg, const CVector& coeffs,
                   const RVector& theta_pts, const RVector& range_pts);

// Quadrature projection of a gridded field back onto the family; the grids
// are treated as uniform trapezoid rules spanning the domain.
CVector project_gridded_map(const BasisConfig& cfg, const CMatrix& map,
                            const RVector& theta_pts,
                            const RVector& range_pts);

// Stacked receiver samples for every chain column: y_n = M G_n + w_n with
// w ~ CN(0, 1/lambda_w) iid per sample.
CMatrix synthesize_frames(const ForwardModel& fm, const CMatrix& chain,
                          std::uint64_t seed);
CMatrix synthesize_frames_noiseless(const ForwardModel& fm,
                                    const CMatrix& chain);

// Adds iid CN(0, 1/noise_precision) noise to every entry, frame by frame.
CMatrix add_measurement_noise(const CMatrix& clean, double noise_precision,
                              std::uint64_t seed);

struct DirectFrame {
  CVector y;
  // Raised when either grid provides fewer than four points per period of
  // the fastest phase term (carrier+chirp in range, steering in angle).
  bool under_resolved = false;
};

// Reference synthesis that integrates the gridded field against steering and
// delayed waveform directly (no basis expansion); noiseless single frame.
// The grid must resolve the field, the chirp and the carrier.
DirectFrame synthesize_frame_direct(const ArrayGeometry& geom,
                                    const ChirpTiming& timing,
                                    const CMatrix& map,
                                    const RVector& theta_pts,
                                    const RVector& range_pts);

// lambda_w such that mean per-sample power of M gamma_ref over the full
// frame is 10^(snr_db/10) times the per-sample noise power.
double snr_to_noise_precision(double snr_db, const CMatrix& m,
                              const CVector& gamma_ref);

}  // namespace clutter
