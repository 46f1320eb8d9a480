#include "biphoton/interferometer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "biphoton/detail/text.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

namespace {

constexpr double kPi = std::numbers::pi;

// full width in wavenumber of a band-pass filter, small fractional bandwidth
double filter_dk(double center_nm, double fwhm_nm) {
  const double lam = center_nm * 1e-9;
  return 2.0 * kPi * (fwhm_nm * 1e-9) / (lam * lam);
}

// three-term fringe shape at signal detuning q from the pump wavenumber
double fringe_integrand(double k_p, double q, double dl, double mu) {
  return 1.0 + mu * (0.5 * std::cos(2.0 * k_p * dl) +
                     2.0 * std::cos(k_p * dl) * std::cos(q * dl) +
                     0.5 * std::cos(2.0 * q * dl));
}

}  // namespace

InterferometerGeometry InterferometerGeometry::from_delta_l(double delta_l_m, double delta_x_m) {
  InterferometerGeometry g;
  g.l_long_m = delta_l_m;
  g.l_short_m = 0.0;
  g.delta_x_m = delta_x_m;
  g.validate();
  return g;
}

double InterferometerGeometry::tau_s() const { return delta_l_m() / kSpeedOfLight; }

void InterferometerGeometry::validate() const {
  if (!(delta_l_m() >= 0.0))
    throw std::invalid_argument("interferometer: long arm must not be shorter than short arm");
  if (!std::isfinite(l_long_m) || !std::isfinite(l_short_m) || !std::isfinite(delta_x_m))
    throw std::invalid_argument("interferometer: non-finite arm length");
}

double BiphotonPathState::coincidence_shape() const {
  const std::complex<double> sum = a_ll + a_sl + a_ls + a_ss;
  const double total = std::norm(a_ll) + std::norm(a_sl) + std::norm(a_ls) + std::norm(a_ss);
  // |sum|^2 splits into the incoherent part and the cross terms; only the
  // latter are degraded by imperfect overlap
  return total + mu * (std::norm(sum) - total);
}

BiphotonPathState path_amplitudes(const InterferometerGeometry& geom, double k_p, double k_s,
                                  double mu) {
  geom.validate();
  if (!(k_p > 0.0) || !(k_s > 0.0))
    throw std::invalid_argument("path_amplitudes: wavenumbers must be positive");
  if (!(mu >= 0.0 && mu <= 1.0))
    throw std::invalid_argument("path_amplitudes: mu must lie in [0, 1]");
  const double k_i = 2.0 * k_p - k_s;
  if (!(k_i > 0.0))
    throw std::invalid_argument("path_amplitudes: idler wavenumber not positive");
  const double dl = geom.effective_delta_l_m();
  BiphotonPathState st;
  st.k_p = k_p;
  st.k_s = k_s;
  st.k_i = k_i;
  st.mu = mu;
  const std::complex<double> j(0.0, 1.0);
  st.a_ll = 0.5 * std::exp(j * (2.0 * k_p * dl));
  st.a_sl = 0.5 * std::exp(j * (k_s * dl));
  st.a_ls = 0.5 * std::exp(j * (k_i * dl));
  st.a_ss = 0.5;
  return st;
}

double coincidence_full(double k_p, double delta_l_m, double mu) {
  return 1.0 + 0.5 * mu * std::cos(2.0 * k_p * delta_l_m);
}

double coincidence_postselected(double k_p, double delta_l_m, double mu) {
  return 1.0 + mu * std::cos(2.0 * k_p * delta_l_m);
}

void FilteredBiphotonSpectrum::validate() const {
  if (!(center_s_nm > 0.0) || !(center_i_nm > 0.0))
    throw std::invalid_argument("filter centers must be positive");
  if (!(fwhm_s_nm >= 0.0) || !(fwhm_i_nm >= 0.0))
    throw std::invalid_argument("filter widths must be non-negative");
  if (!(fwhm_s_nm < center_s_nm) || !(fwhm_i_nm < center_i_nm))
    throw std::invalid_argument("filter width exceeds its center wavelength");
}

double FilteredBiphotonSpectrum::implied_pump_nm() const {
  return 2.0 / (1.0 / center_s_nm + 1.0 / center_i_nm);
}

void FilteredBiphotonSpectrum::validate_against_pump(double lambda_p_nm, double rel_tol) const {
  validate();
  const double implied = implied_pump_nm();
  if (std::abs(implied - lambda_p_nm) > rel_tol * lambda_p_nm)
    throw std::invalid_argument("filter centers are not energy-conserving: implied pump " +
                                std::to_string(implied) + " nm, expected " +
                                std::to_string(lambda_p_nm) + " nm");
}

CoincidenceOracle::CoincidenceOracle(InterferometerGeometry geom,
                                     FilteredBiphotonSpectrum spectrum, double mu)
    : geom_(geom), spectrum_(spectrum), mu_(mu) {
  geom_.validate();
  spectrum_.validate();
  if (!(mu >= 0.0 && mu <= 1.0))
    throw std::invalid_argument("coincidence oracle: mu must lie in [0, 1]");
  const double k_s0 = 2.0 * kPi / (spectrum_.center_s_nm * 1e-9);
  const double k_i0 = 2.0 * kPi / (spectrum_.center_i_nm * 1e-9);
  k_p_ = 0.5 * (k_s0 + k_i0);
  const double q0 = k_s0 - k_p_;
  const double dks = filter_dk(spectrum_.center_s_nm, spectrum_.fwhm_s_nm);
  const double dki = filter_dk(spectrum_.center_i_nm, spectrum_.fwhm_i_nm);
  if (spectrum_.shape == FilterShape::Rectangular) {
    // the idler filter maps onto the signal axis through k_i = 2 k_p - k_s
    // with the same center, so the joint window is the narrower one
    const double w = 0.5 * std::min(dks, dki);
    q_lo_ = q0 - w;
    q_hi_ = q0 + w;
  } else {
    const double f = 2.0 * std::sqrt(2.0 * std::log(2.0));
    const double ss = dks / f, si = dki / f;
    double sigma;
    if (ss == 0.0 || si == 0.0)
      sigma = 0.0;
    else
      sigma = 1.0 / std::sqrt(1.0 / (ss * ss) + 1.0 / (si * si));
    q_lo_ = q0 - 6.0 * sigma;
    q_hi_ = q0 + 6.0 * sigma;
  }
}

double CoincidenceOracle::average(double delta_x_m, int n) const {
  const double dl = geom_.delta_l_m() + delta_x_m;
  const double h = (q_hi_ - q_lo_) / n;
  double num = 0.0, den = 0.0;
  const bool gaussian = spectrum_.shape == FilterShape::Gaussian;
  const double q_mid = 0.5 * (q_lo_ + q_hi_);
  const double span = q_hi_ - q_lo_;
  for (int i = 0; i < n; ++i) {
    const double q = q_lo_ + (i + 0.5) * h;
    double w = 1.0;
    if (gaussian) {
      const double sigma = span / 12.0;  // window was built as +-6 sigma
      const double z = (q - q_mid) / sigma;
      w = std::exp(-0.5 * z * z);
    }
    num += w * fringe_integrand(k_p_, q, dl, mu_);
    den += w;
  }
  return num / den;
}

double CoincidenceOracle::operator()(double delta_x_m) const {
  const double dl = geom_.delta_l_m() + delta_x_m;
  if (spectrum_.fwhm_s_nm == 0.0 || spectrum_.fwhm_i_nm == 0.0 || q_hi_ == q_lo_) {
    const double q0 = 2.0 * kPi / (spectrum_.center_s_nm * 1e-9) - k_p_;
    return fringe_integrand(k_p_, q0, dl, mu_);
  }
  // midpoint rule with grid doubling; start well above the Nyquist rate of
  // cos(q dl) across the window so aliasing cannot fake convergence
  const double oscillations = (q_hi_ - q_lo_) * std::abs(dl) / (2.0 * kPi);
  int n = 256;
  while (n < 8.0 * oscillations && n < (1 << 20)) n *= 2;
  double prev = average(delta_x_m, n);
  while (n < (1 << 23)) {
    n *= 2;
    const double cur = average(delta_x_m, n);
    if (std::abs(cur - prev) <= 1e-4) return cur;
    prev = cur;
  }
  throw NumericalError("coincidence oracle quadrature did not converge");
}

double single_photon_visibility(double lambda_center_nm, double fwhm_nm, double delta_l_m,
                                FilterShape shape) {
  if (!(lambda_center_nm > 0.0) || !(fwhm_nm >= 0.0))
    throw std::invalid_argument("single_photon_visibility: bad filter parameters");
  if (fwhm_nm == 0.0) return 1.0;
  const double dk = filter_dk(lambda_center_nm, fwhm_nm);
  if (shape == FilterShape::Rectangular) {
    const double x = 0.5 * dk * std::abs(delta_l_m);
    if (x < 1e-8) return 1.0;
    return std::abs(std::sin(x) / x);
  }
  const double sigma = dk / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double arg = sigma * delta_l_m;
  return std::exp(-0.5 * arg * arg);
}

namespace {

struct LinearFringeSolution {
  double a, bc, bs;
  std::array<std::array<double, 3>, 3> cov;
  double ssr;  // weighted sum of squared residuals
};

// weighted least squares of counts = a + bc cos(w x) + bs sin(w x); weights
// are 1/max(counts, 1), the Poisson variance estimate
LinearFringeSolution solve_fringe(std::span<const ScanPoint> scan, double period_nm) {
  const double w = 2.0 * kPi / period_nm;
  std::array<std::array<double, 3>, 3> m{};
  std::array<double, 3> rhs{};
  for (const auto& p : scan) {
    const double wt = 1.0 / std::max(p.counts, 1.0);
    const std::array<double, 3> row{1.0, std::cos(w * p.delta_x_nm), std::sin(w * p.delta_x_nm)};
    for (int i = 0; i < 3; ++i) {
      rhs[i] += wt * row[i] * p.counts;
      for (int k = 0; k < 3; ++k) m[i][k] += wt * row[i] * row[k];
    }
  }
  // invert the 3x3 normal matrix by Gauss-Jordan; it doubles as the
  // parameter covariance because the weights are inverse variances
  std::array<std::array<double, 6>, 3> aug{};
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) aug[i][k] = m[i][k];
    aug[i][3 + i] = 1.0;
  }
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
    if (std::abs(aug[piv][col]) < 1e-12)
      throw NumericalError("fringe fit: degenerate design matrix (scan points do not "
                           "constrain the model at this period)");
    std::swap(aug[col], aug[piv]);
    const double d = aug[col][col];
    for (int k = 0; k < 6; ++k) aug[col][k] /= d;
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = aug[r][col];
      for (int k = 0; k < 6; ++k) aug[r][k] -= f * aug[col][k];
    }
  }
  LinearFringeSolution s{};
  std::array<double, 3> beta{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) beta[i] += aug[i][3 + k] * rhs[k];
  s.a = beta[0];
  s.bc = beta[1];
  s.bs = beta[2];
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) s.cov[i][k] = aug[i][3 + k];
  s.ssr = 0.0;
  for (const auto& p : scan) {
    const double wt = 1.0 / std::max(p.counts, 1.0);
    const double fit = s.a + s.bc * std::cos(w * p.delta_x_nm) + s.bs * std::sin(w * p.delta_x_nm);
    s.ssr += wt * (p.counts - fit) * (p.counts - fit);
  }
  return s;
}

void validate_scan(std::span<const ScanPoint> scan, double period_nm) {
  if (!(period_nm > 0.0)) throw std::invalid_argument("fringe fit: period must be positive");
  if (scan.size() < 8)
    throw std::invalid_argument("fringe fit: need at least 8 scan points, got " +
                                std::to_string(scan.size()));
  double lo = scan[0].delta_x_nm, hi = scan[0].delta_x_nm;
  for (const auto& p : scan) {
    if (!std::isfinite(p.delta_x_nm) || !std::isfinite(p.counts))
      throw std::invalid_argument("fringe fit: non-finite scan point");
    if (p.counts < 0.0) throw std::invalid_argument("fringe fit: negative counts");
    lo = std::min(lo, p.delta_x_nm);
    hi = std::max(hi, p.delta_x_nm);
  }
  if (hi - lo < period_nm)
    throw std::invalid_argument("fringe fit: scan span " + std::to_string(hi - lo) +
                                " nm covers less than one period");
}

FringeFit fit_from_solution(const LinearFringeSolution& s, double period_nm) {
  if (!(s.a > 0.0))
    throw NumericalError("fringe fit: non-positive mean count level");
  FringeFit f;
  f.period_nm = period_nm;
  f.offset = s.a;
  f.offset_stderr = std::sqrt(std::max(s.cov[0][0], 0.0));
  const double b = std::hypot(s.bc, s.bs);
  f.amplitude = b;
  f.phase_rad = std::atan2(-s.bs, s.bc);
  f.visibility = b / s.a;
  if (b > 0.0) {
    // propagate the (a, bc, bs) covariance through B = hypot and V = B/A
    const std::array<double, 3> gb{0.0, s.bc / b, s.bs / b};
    double var_b = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) var_b += gb[i] * s.cov[i][k] * gb[k];
    f.amplitude_stderr = std::sqrt(std::max(var_b, 0.0));
    const std::array<double, 3> gv{-b / (s.a * s.a), s.bc / (b * s.a), s.bs / (b * s.a)};
    double var_v = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) var_v += gv[i] * s.cov[i][k] * gv[k];
    f.visibility_stderr = std::sqrt(std::max(var_v, 0.0));
    const std::array<double, 3> gp{0.0, s.bs / (b * b), -s.bc / (b * b)};
    double var_p = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int k = 0; k < 3; ++k) var_p += gp[i] * s.cov[i][k] * gp[k];
    f.phase_stderr = std::sqrt(std::max(var_p, 0.0));
  } else {
    f.amplitude_stderr = std::sqrt(std::max(s.cov[1][1], 0.0));
    f.visibility_stderr = f.amplitude_stderr / s.a;
    f.phase_stderr = 0.0;
  }
  return f;
}

}  // namespace

FringeFit fit_visibility(std::span<const ScanPoint> scan, double period_nm) {
  validate_scan(scan, period_nm);
  return fit_from_solution(solve_fringe(scan, period_nm), period_nm);
}

FringeFit fit_visibility_free_period(std::span<const ScanPoint> scan, double period_guess_nm) {
  if (!(period_guess_nm > 0.0))
    throw std::invalid_argument("fringe fit: period guess must be positive");
  if (scan.size() < 8)
    throw std::invalid_argument("fringe fit: need at least 8 scan points, got " +
                                std::to_string(scan.size()));
  const auto ssr_at = [&](double t) { return solve_fringe(scan, t).ssr; };
  // coarse scan over half to double the guess, then golden-section
  const double lo = 0.5 * period_guess_nm, hi = 2.0 * period_guess_nm;
  const int steps = 400;
  int best = 0;
  double best_ssr = std::numeric_limits<double>::infinity();
  std::vector<double> ts(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    ts[i] = lo * std::pow(hi / lo, double(i) / steps);
    const double v = ssr_at(ts[i]);
    if (v < best_ssr) {
      best_ssr = v;
      best = i;
    }
  }
  double a = ts[std::max(best - 1, 0)];
  double b = ts[std::min(best + 1, steps)];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = ssr_at(x1), f2 = ssr_at(x2);
  for (int it = 0; it < 80 && (b - a) > 1e-12 * period_guess_nm; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = ssr_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = ssr_at(x2);
    }
  }
  const double period = 0.5 * (a + b);
  validate_scan(scan, period);
  return fit_from_solution(solve_fringe(scan, period), period);
}

void FringeFit::to_json_file(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["visibility"] = visibility;
  j["visibility_stderr"] = visibility_stderr;
  j["amplitude"] = amplitude;
  j["amplitude_stderr"] = amplitude_stderr;
  j["offset"] = offset;
  j["offset_stderr"] = offset_stderr;
  j["phase_rad"] = phase_rad;
  j["phase_stderr"] = phase_stderr;
  j["period_nm"] = period_nm;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

std::vector<ScanPoint> scan_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string() + ": cannot open");
  std::vector<ScanPoint> scan;
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t{detail::trim(line)};
    if (t.empty() || t[0] == '#') continue;
    if (!saw_header) {
      if (t != "delta_x_nm,counts")
        throw ParseError(path.string() + ":" + std::to_string(lineno) +
                         ": expected header 'delta_x_nm,counts', got '" + t + "'");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split_csv(t);
    if (fields.size() != 2)
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": expected 2 fields, got " +
                       std::to_string(fields.size()));
    ScanPoint p;
    p.delta_x_nm = detail::parse_double(fields[0], path.string(), lineno);
    p.counts = detail::parse_double(fields[1], path.string(), lineno);
    scan.push_back(p);
  }
  if (!saw_header) throw ParseError(path.string() + ": empty scan file");
  return scan;
}

void scan_to_csv(std::span<const ScanPoint> scan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "delta_x_nm,counts\n";
  out.precision(17);
  for (const auto& p : scan) out << p.delta_x_nm << "," << p.counts << "\n";
}

}  // namespace biphoton
