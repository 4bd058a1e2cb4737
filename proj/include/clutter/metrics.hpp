#pragma once

#include <cstdint>
#include <vector>

#include "clutter/basis.hpp"
#include "clutter/inference.hpp"
#include "clutter/types.hpp"

namespace clutter {

struct ErrorReport {
  double coeff_mse = 0.0;
  double field_mse = 0.0;
  double coverage_3sigma = 0.0;
  double alpha_hat = 0.0;
};

// Mean over components of |estimate_j - truth_j|^2.
double coefficient_error(const CVector& estimate, const CVector& truth);

// Renders the coefficients onto the grid and returns the grid mean of
// |rendered - true_map|^2; against an out-of-family reference this floors at
// the truncation error of the family.
double field_error(const BasisConfig& cfg, const CVector& coeffs,
                   const CMatrix& true_map, const RVector& theta_pts,
                   const RVector& range_pts);

// Fraction of components whose real and imaginary errors both stay within
// three per-axis standard deviations sqrt(1/(2 precision_j)).
double coverage_3sigma(const GaussianBelief& belief, const CVector& truth);

// One timing measurement: the setup covers the pseudoinverse, the propagated
// message covariance and the state initialisation; the per-sweep time is the
// median over the timed iterations of the main loop.
struct ScalingPoint {
  int n_frames = 0;
  int n_components = 0;
  double init_seconds = 0.0;
  double iter_seconds_median = 0.0;
};

struct ScalingCase {
  int frames_multiplier = 1;
  int components_multiplier = 1;  // applied to the range mode count
};

// Times the tracker across scaled copies of a base problem, all on one
// thread so the ratios stay comparable. The multipliers scale the frame
// count and the basis size of `base`.
std::vector<ScalingPoint> scaling_probe(const BasisConfig& base,
                                        const ArrayGeometry& geom,
                                        const ChirpTiming& timing,
                                        int base_frames,
                                        const std::vector<ScalingCase>& cases,
                                        int timed_iterations,
                                        std::uint64_t seed);

}  // namespace clutter
