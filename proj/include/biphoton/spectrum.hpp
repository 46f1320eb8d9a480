#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace biphoton {

enum class FilterShape { Rectangular, Gaussian };

// A fiber-output spectrum at one pump power. counts is a per-wavelength rate
// density in 1/(s nm); the optional stop band marks the notch-filtered
// region, which is missing data (those bins simply have no rows), never
// zeros.
struct MeasuredSpectrum {
  std::vector<double> lambda_axis_nm;
  std::vector<double> counts_per_s;  // density, 1/(s nm)
  double pump_power_w = 0.0;
  std::optional<std::pair<double, double>> stop_band_nm;

  void validate() const;
  bool in_stop_band(double lambda_nm) const;

  // CSV: `lambda_nm,counts_per_s` with `# pump_power_W=...` and optional
  // `# stop_band_nm=lo,hi` header comments.
  static MeasuredSpectrum from_csv(const std::filesystem::path& path);
  void to_csv(const std::filesystem::path& path) const;
};

// Per-bin split S(lambda; P) = a P + b P^2: pairs scale as P^2, Raman and
// residual-pump background as P. Coefficients are stored power-free;
// pair_component/linear_component are the two terms evaluated at
// reference_power (the larger input power, so the result is independent of
// argument order).
struct DecomposedSpectrum {
  std::vector<double> lambda_axis_nm;
  std::vector<double> linear_coeff;  // a, 1/(s nm W)
  std::vector<double> quad_coeff;    // b, 1/(s nm W^2)
  std::vector<double> pair_component;
  std::vector<double> linear_component;
  std::vector<std::uint8_t> clamped;  // unclamped solve went negative here
  double reference_power_w = 0.0;
  std::optional<std::pair<double, double>> stop_band_nm;

  void to_csv(const std::filesystem::path& path) const;
};

DecomposedSpectrum decompose(const MeasuredSpectrum& spec1, const MeasuredSpectrum& spec2);

// Least-squares extension for three or more powers; the two-spectra overload
// is the exactly-determined special case of the same normal equations.
DecomposedSpectrum decompose(std::span<const MeasuredSpectrum> spectra);

// Background (linear-in-P) rate density rescaled to pump power P.
std::vector<double> background_model(const DecomposedSpectrum& dec, double power_w);

// Integral of the rate density over a filter window centered at center_nm.
// Rectangular window of width fwhm (default) or unit-peak gaussian of that
// FWHM. Bins are the midpoint cells of the wavelength axis. Erroring cases:
// window sticking out of the axis, or overlapping the stop band.
double band_integrate(std::span<const double> lambda_axis_nm, std::span<const double> density,
                      const std::optional<std::pair<double, double>>& stop_band_nm,
                      double center_nm, double fwhm_nm,
                      FilterShape shape = FilterShape::Rectangular);
double band_integrate(const MeasuredSpectrum& spec, double center_nm, double fwhm_nm,
                      FilterShape shape = FilterShape::Rectangular);

}  // namespace biphoton
