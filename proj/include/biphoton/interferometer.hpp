#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <vector>

#include "biphoton/spectrum.hpp"  // FilterShape

namespace biphoton {

// Unbalanced Mach-Zehnder geometry. delta_x is the piezo scan offset added
// to the long arm, so the effective path difference is delta_l() + delta_x.
struct InterferometerGeometry {
  double l_long_m = 0.6;
  double l_short_m = 0.0;
  double delta_x_m = 0.0;

  static InterferometerGeometry from_delta_l(double delta_l_m, double delta_x_m = 0.0);

  double delta_l_m() const { return l_long_m - l_short_m; }
  double effective_delta_l_m() const { return delta_l_m() + delta_x_m; }
  double tau_s() const;  // propagation-time difference delta_l / c

  void validate() const;  // delta_l >= 0
};

// The four path-combination amplitudes of the biphoton after the
// interferometer, with the global phase common to all four dropped:
//   A_LL = 1/2 e^{i 2 k_p dL},  A_SL = 1/2 e^{i k_s dL},
//   A_LS = 1/2 e^{i k_i dL},    A_SS = 1/2.
// Wavenumbers are vacuum values and satisfy k_s + k_i = 2 k_p (monochromatic
// pump). mu in [0,1] scales the interference cross terms only; it models the
// observed mode-overlap degradation with a single number.
struct BiphotonPathState {
  double k_p, k_s, k_i;  // rad/m
  std::complex<double> a_ll, a_sl, a_ls, a_ss;
  double mu;

  // coincidence shape for this spectral component: |sum A|^2 with the six
  // cross terms scaled by mu
  double coincidence_shape() const;
};

BiphotonPathState path_amplitudes(const InterferometerGeometry& geom, double k_p, double k_s,
                                  double mu = 1.0);

// Eq.-of-motion closed forms for the fringe shapes (normalized so the
// fringe-average is 1):
//   full (all arrival-time classes):      1 + (mu/2) cos(2 k_p dL)
//   postselected (central class only):    1 + mu cos(2 k_p dL)
// The postselected visibility is always exactly twice the full one; at
// mu = 1 they are 1.0 and the classical-limit 0.5.
double coincidence_full(double k_p, double delta_l_m, double mu);
double coincidence_postselected(double k_p, double delta_l_m, double mu);

// Band-pass filters on the signal and idler arms. Centers must satisfy
// energy conservation with the pump implied by their own average:
// k_p = (k_s + k_i)/2, which validate_against_pump checks explicitly.
struct FilteredBiphotonSpectrum {
  double center_s_nm = 660.0;
  double center_i_nm = 896.8263045032166;
  double fwhm_s_nm = 10.0;
  double fwhm_i_nm = 10.0;
  FilterShape shape = FilterShape::Rectangular;

  void validate() const;
  double implied_pump_nm() const;
  void validate_against_pump(double lambda_p_nm, double rel_tol = 1e-6) const;
};

// Brute-force spectral average of the four-term coincidence shape over the
// filtered biphoton spectrum: the oracle the closed forms are checked
// against. The CW pump pins omega_s + omega_i = 2 omega_p, so the average is
// a single quadrature over the signal detuning.  operator() evaluates the
// fringe at scan offset delta_x; the quadrature doubles its grid until the
// result moves by less than 1e-4 (NumericalError if that never happens).
class CoincidenceOracle {
 public:
  CoincidenceOracle(InterferometerGeometry geom, FilteredBiphotonSpectrum spectrum,
                    double mu);
  double operator()(double delta_x_m) const;

 private:
  double average(double delta_x_m, int n) const;
  InterferometerGeometry geom_;
  FilteredBiphotonSpectrum spectrum_;
  double mu_;
  double k_p_, q_lo_, q_hi_;  // detuning window in wavenumber space
};

// One-photon fringe envelope: magnitude of the filter autocorrelation at
// delay delta_l. Rectangular filter -> |sinc|, gaussian -> gaussian, both in
// the small-fractional-bandwidth approximation dk = 2 pi fwhm / lambda^2.
double single_photon_visibility(double lambda_center_nm, double fwhm_nm, double delta_l_m,
                                FilterShape shape = FilterShape::Rectangular);

struct ScanPoint {
  double delta_x_nm;
  double counts;
};

struct FringeFit {
  double visibility = 0.0;
  double visibility_stderr = 0.0;
  double amplitude = 0.0;
  double amplitude_stderr = 0.0;
  double offset = 0.0;
  double offset_stderr = 0.0;
  double phase_rad = 0.0;
  double phase_stderr = 0.0;
  double period_nm = 0.0;

  void to_json_file(const std::filesystem::path& path) const;
};

// Poisson-weighted least squares of counts = A + B cos(2 pi x / period + phi)
// at a known period (lambda_p/2 for coincidence fringes, lambda_p for pump
// fringes). Needs >= 8 points spanning at least one period. Errors: A <= 0
// after fitting, too few points, insufficient span.
FringeFit fit_visibility(std::span<const ScanPoint> scan, double period_nm);

// Same model with the period free: coarse scan around period_guess_nm plus
// golden-section refinement of the weighted residual. Used for the
// period-halving check between biphoton and pump fringes.
FringeFit fit_visibility_free_period(std::span<const ScanPoint> scan, double period_guess_nm);

std::vector<ScanPoint> scan_from_csv(const std::filesystem::path& path);
void scan_to_csv(std::span<const ScanPoint> scan, const std::filesystem::path& path);

}  // namespace biphoton
