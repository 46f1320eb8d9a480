#pragma once

#include <cmath>
#include <numbers>

// Unit conventions used throughout:
//   wavelengths   nm (vacuum) at all public interfaces
//   omega         rad/s angular frequency
//   k             rad/m propagation constant / vacuum wavenumber
//   D             ps/(nm km) group-velocity dispersion, datasheet convention
//   beta2         s^2/m
// Internally everything is SI; nm only appears at the API boundary.

namespace biphoton {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s, exact

inline double omega_from_lambda_nm(double lambda_nm) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / (lambda_nm * 1e-9);
}

inline double lambda_nm_from_omega(double omega) {
  return 2.0 * std::numbers::pi * kSpeedOfLight / omega * 1e9;
}

// vacuum wavenumber 2*pi/lambda
inline double k_from_lambda_nm(double lambda_nm) {
  return 2.0 * std::numbers::pi / (lambda_nm * 1e-9);
}

// beta2 = -D lambda^2 / (2 pi c).  1 ps/(nm km) = 1e-6 s/m^2.
inline double beta2_from_gvd(double d_ps_nm_km, double lambda_nm) {
  const double d_si = d_ps_nm_km * 1e-6;
  const double lam = lambda_nm * 1e-9;
  return -d_si * lam * lam / (2.0 * std::numbers::pi * kSpeedOfLight);
}

inline double gvd_from_beta2(double beta2, double lambda_nm) {
  const double lam = lambda_nm * 1e-9;
  return -beta2 * 2.0 * std::numbers::pi * kSpeedOfLight / (lam * lam) * 1e6;
}

}  // namespace biphoton
