#pragma once

#include <complex>

#include <Eigen/Dense>

namespace clutter {

using Complex = std::complex<double>;

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

constexpr double kSpeedOfLight = 299792458.0;

// Clamp bounds for the AR(1) coefficient, shared by the simulator and the
// tracker. Both ends are kept away from the degenerate limits 0 and 1.
constexpr double kAlphaMin = 1e-3;
constexpr double kAlphaMax = 1.0 - 1e-3;

}  // namespace clutter
