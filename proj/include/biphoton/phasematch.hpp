#pragma once

#include <filesystem>
#include <vector>

#include "biphoton/dispersion.hpp"

namespace biphoton {

// Fiber/pump parameters for spontaneous four-wave mixing.
struct FwmConfig {
  double gamma_per_w_km = 102.0;  // nonlinear coefficient
  double pump_power_w = 0.1;
  double length_m = 1.93;
  double lambda_p_nm = 760.4;
  double loss_db_per_km = 50.0;

  double gamma_per_w_m() const { return gamma_per_w_km * 1e-3; }
  double gamma_p() const { return gamma_per_w_m() * pump_power_w; }  // 1/m
  double gamma_p_l() const { return gamma_p() * length_m; }          // dimensionless

  void validate(const DispersionModel& model) const;
  void validate() const;  // parameter-only checks, no model range check
};

// One phase-matched signal/idler pair. The signal is the blue photon by
// convention: lambda_s <= lambda_p <= lambda_i, with
// omega_s = omega_p + delta_omega and omega_i = omega_p - delta_omega.
struct PairPoint {
  double lambda_s_nm;
  double lambda_i_nm;
  double delta_omega;  // rad/s
  double n_density;    // pair rate per unit (dOmega * dt), dimensionless
};

struct SpectralDensityMap {
  std::vector<double> lambda_p_axis_nm;
  std::vector<double> lambda_axis_nm;  // covers signal and idler wavelengths
  std::vector<double> values;          // row-major: [ip * lambda_axis.size() + il]

  double at(std::size_t ip, std::size_t il) const {
    return values[ip * lambda_axis_nm.size() + il];
  }
  void to_csv(const std::filesystem::path& path) const;
};

// Idler wavelength from 2/lambda_p = 1/lambda_s + 1/lambda_i (energy
// conservation for a monochromatic pump). Throws when the idler frequency
// would be non-positive.
double conjugate_wavelength_nm(double lambda_p_nm, double lambda_s_nm);

// delta_k = k(omega_p + dw) + k(omega_p - dw) - 2 k(omega_p); even in dw.
double delta_k(const DispersionModel& model, double lambda_p_nm, double delta_omega);

// F = |sin(kappa L)/(kappa L)|^2 with kappa^2 = (dk/2)(dk/2 + 2 gamma P).
// The radicand is negative exactly in the parametric-gain band
// -4 gamma P < dk < 0; there the factor continues to (sinh x / x)^2. A short
// Taylor series takes over for |kappa L|^2 < 1e-6 where both forms lose
// digits to cancellation.
double phase_match_factor(double delta_k_val, const FwmConfig& config);

// N = (gamma P L)^2 F dOmega dt. dOmega is interpreted as the signal-side
// acceptance bandwidth (rad/s); dt is the counting interval.
double pair_rate(const DispersionModel& model, const FwmConfig& config, double delta_omega,
                 double d_omega, double dt);

// Pair density per unit (dOmega dt) at a signal-or-idler wavelength; the
// quantity plotted in the spectral map. Wavelengths whose energy-conserving
// partner falls outside the model's validity evaluate to 0 (the map cannot
// claim pairs it cannot place). Used as the per-cell map kernel; exposed for
// the mirror-symmetry property.
double pair_density_at(const DispersionModel& model, const FwmConfig& config,
                       double lambda_nm);

// Trunk/branch classification boundary: four trunk half-widths,
// 4 sqrt(4 gamma P / |beta2(omega_p)|). Root searches below the threshold
// belong to the trunk (the modulation-instability band around the pump),
// above it to the branch. Infinite when beta2(omega_p) = 0 (pump exactly at
// the ZDW, the bifurcation point).
double trunk_branch_threshold(const DispersionModel& model, const FwmConfig& config);

// Roots of delta_k = 0 beyond the threshold (the far phase-matched branch).
// Empty when pumping in the normal-dispersion region. delta_k = -4 gamma P
// also crosses zero just inside each branch root; those crossings are
// excluded from trunk_solutions by the same threshold.
std::vector<PairPoint> branch_solutions(const DispersionModel& model,
                                        const FwmConfig& config, int scan_points = 2000);
// Roots of delta_k = -4 gamma P inside the threshold (near the pump).
std::vector<PairPoint> trunk_solutions(const DispersionModel& model,
                                       const FwmConfig& config, int scan_points = 2000);

enum class SolutionKind { Trunk, Branch };
struct LabeledPairPoint {
  double lambda_p_nm;
  PairPoint point;
  SolutionKind kind;
};
void solutions_to_csv(const std::vector<LabeledPairPoint>& solutions,
                      const std::filesystem::path& path);

// Pair-density map over a pump-wavelength range; config.lambda_p_nm is
// ignored (each column supplies its own pump). Cells are independent, so the
// evaluation may be split across threads; the output is identical for any
// thread count.
SpectralDensityMap spectral_map(const DispersionModel& model, const FwmConfig& config,
                                double lambda_p_min_nm, double lambda_p_max_nm,
                                std::size_t n_pump, double lambda_min_nm,
                                double lambda_max_nm, std::size_t n_lambda,
                                int threads = 1);

// Length over which loss_db_per_km attenuates power by 1/e:
// (10/ln 10)/loss km. 50 dB/km gives 86.9 m.
double attenuation_efolding_length_m(double loss_db_per_km);

// The 1-D solve that produced dispersion::kDefaultGvdCurvatureNm: finds the
// curvature W for which the delta_k = 0 branch at pump_nm passes through
// target_signal_nm. Kept callable so a test can re-derive the frozen
// constant.
double calibrate_default_curvature(double pump_nm = 760.4, double target_signal_nm = 660.0);

}  // namespace biphoton
