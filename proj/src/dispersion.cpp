#include "biphoton/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

DispersionModel::DispersionModel(CubicSpline beta2, double omega_ref)
    : beta2_(std::move(beta2)), omega_ref_(omega_ref) {
  i1_ref_ = beta2_.integral(omega_ref_);
  i2_ref_ = beta2_.integral2(omega_ref_);
}

DispersionModel DispersionModel::from_gvd(const GvdTable& table) {
  const auto& rows = table.rows();
  const std::size_t n = rows.size();
  // Tables are wavelength-ascending, so frequency order is the reverse.
  std::vector<double> omega(n), beta2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = rows[n - 1 - i];
    omega[i] = omega_from_lambda_nm(r.lambda_nm);
    beta2[i] = beta2_from_gvd(r.d_ps_nm_km, r.lambda_nm);
  }
  CubicSpline sp(std::move(omega), std::move(beta2));
  // Expansion origin: the middle knot. Any in-range choice works (gauge),
  // a fixed one keeps k_at values reproducible.
  const double oref = omega_from_lambda_nm(rows[n / 2].lambda_nm);
  return DispersionModel(std::move(sp), oref);
}

double DispersionModel::beta2_at(double omega) const { return beta2_.eval(omega); }

double DispersionModel::k_at(double omega) const {
  // double integral of beta2 with k(omega_ref) = k'(omega_ref) = 0
  return beta2_.integral2(omega) - i2_ref_ - i1_ref_ * (omega - omega_ref_);
}

double DispersionModel::omega_min() const { return beta2_.x_front(); }
double DispersionModel::omega_max() const { return beta2_.x_back(); }
bool DispersionModel::in_range(double omega) const { return beta2_.in_range(omega); }
double DispersionModel::lambda_min_nm() const { return lambda_nm_from_omega(omega_max()); }
double DispersionModel::lambda_max_nm() const { return lambda_nm_from_omega(omega_min()); }

std::vector<double> zero_dispersion_wavelengths(const DispersionModel& model) {
  // Sample each spline interval finely enough that a cubic cannot hide a
  // sign change, then bisect each bracket. Work in omega, report nm.
  const double lo = model.omega_min(), hi = model.omega_max();
  const int nscan = 4096;
  const double step = (hi - lo) / nscan;

  std::vector<double> roots_nm;
  auto push_root = [&](double w) {
    const double lam = lambda_nm_from_omega(w);
    for (double r : roots_nm)
      if (std::abs(r - lam) < 2e-3) return;  // same root from adjacent brackets
    roots_nm.push_back(lam);
  };

  double wa = lo, fa = model.beta2_at(lo);
  for (int i = 1; i <= nscan; ++i) {
    const double wb = (i == nscan) ? hi : lo + i * step;
    const double fb = model.beta2_at(wb);
    if (fa == 0.0) push_root(wa);
    if (fa * fb < 0.0) {
      double a = wa, b = wb, va = fa;
      // stop once the bracket is far below the 1e-3 nm contract
      while (std::abs(lambda_nm_from_omega(a) - lambda_nm_from_omega(b)) > 1e-6) {
        const double m = 0.5 * (a + b);
        const double vm = model.beta2_at(m);
        if (va * vm <= 0.0) {
          b = m;
        } else {
          a = m;
          va = vm;
        }
      }
      push_root(0.5 * (a + b));
    }
    wa = wb;
    fa = fb;
  }
  if (fa == 0.0) push_root(hi);
  std::sort(roots_nm.begin(), roots_nm.end());
  return roots_nm;
}

double zero_dispersion_wavelength(const DispersionModel& model) {
  const auto roots = zero_dispersion_wavelengths(model);
  if (roots.empty())
    throw NumericalError("beta2 does not change sign inside the model's valid range");
  if (roots.size() > 1)
    throw std::invalid_argument("beta2 has " + std::to_string(roots.size()) +
                                " zeros in range; use zero_dispersion_wavelengths()");
  return roots.front();
}

GvdTable default_fiber_table() {
  std::vector<GvdRow> rows;
  for (double lam = kDefaultTableMinNm; lam <= kDefaultTableMaxNm + 0.5; lam += 2.0) {
    const double x = lam - kDefaultZdwNm;
    rows.push_back({lam, kDefaultGvdSlope * x * (1.0 - x / kDefaultGvdCurvatureNm)});
  }
  return GvdTable(std::move(rows), "built-in NL-PM-760 stand-in");
}

DispersionModel default_model() { return DispersionModel::from_gvd(default_fiber_table()); }

}  // namespace biphoton
