#pragma once

#include <vector>

#include "biphoton/gvd.hpp"
#include "biphoton/spline.hpp"

namespace biphoton {

// Propagation-constant model reconstructed from tabulated D(lambda).
//
// beta2(omega) = -D(lambda) lambda^2 / (2 pi c) is interpolated by a cubic
// spline over the tabulated frequencies, and k(omega) is its double integral
// evaluated analytically piece by piece. Both integration constants are set
// to zero at omega_ref: they are an affine gauge in omega and cancel in
// delta_k = k(omega_s) + k(omega_i) - 2 k(omega_p) because
// omega_s + omega_i = 2 omega_p. Only delta_k-type combinations of k_at are
// physically meaningful.
//
// Evaluation outside the tabulated range is a hard error, never an
// extrapolation: phase-matching roots found in extrapolated tails would be
// artifacts of the interpolant.
class DispersionModel {
 public:
  static DispersionModel from_gvd(const GvdTable& table);

  double beta2_at(double omega) const;  // s^2/m
  double k_at(double omega) const;      // rad/m, gauge-fixed as above

  double omega_ref() const { return omega_ref_; }
  double omega_min() const;
  double omega_max() const;
  bool in_range(double omega) const;
  double lambda_min_nm() const;  // red edge of validity expressed in nm
  double lambda_max_nm() const;

 private:
  explicit DispersionModel(CubicSpline beta2, double omega_ref);

  CubicSpline beta2_;
  double omega_ref_;
  double i1_ref_, i2_ref_;  // antiderivative values at omega_ref (gauge subtraction)
};

// All sign changes of beta2 inside the valid range, as wavelengths in nm,
// each located by bisection to well below 1e-3 nm. Empty result means the
// model is normal- or anomalous-dispersion-only over its whole range.
std::vector<double> zero_dispersion_wavelengths(const DispersionModel& model);

// Convenience form: requires exactly one root and returns it; throws
// NumericalError when beta2 has no sign change and std::invalid_argument when
// there are several (caller should use the list form and select).
double zero_dispersion_wavelength(const DispersionModel& model);

// Built-in stand-in for the NL-PM-760 datasheet curve:
//
//   D(lambda) = S0 (lambda - 760 nm) [1 - (lambda - 760 nm)/W]
//
// S0 is an assumed slope of typical small-core-PCF magnitude. W is the
// curvature length that bends D back down at long wavelengths; a strictly
// linear D cannot phase-match a 660 nm/897 nm pair at all (delta_k is linear
// in D, so no scale factor can move a delta_k = 0 root, and the linear shape
// has the wrong beta4 sign). W is the one calibrated constant, fixed so the
// delta_k = 0 branch at a 760.4 nm pump passes through 660 nm; see
// phasematch::calibrate_default_curvature for the solve that produced it.
inline constexpr double kDefaultZdwNm = 760.0;
inline constexpr double kDefaultGvdSlope = 1.0;           // ps/(nm^2 km), assumed
inline constexpr double kDefaultGvdCurvatureNm = 258.729279613;  // calibrated
inline constexpr double kDefaultTableMinNm = 600.0;
inline constexpr double kDefaultTableMaxNm = 990.0;

GvdTable default_fiber_table();
DispersionModel default_model();

}  // namespace biphoton
