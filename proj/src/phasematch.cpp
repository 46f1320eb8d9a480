#include "biphoton/phasematch.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "biphoton/errors.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

void FwmConfig::validate() const {
  if (!(gamma_per_w_km > 0.0)) throw std::invalid_argument("gamma must be > 0");
  if (!(pump_power_w >= 0.0)) throw std::invalid_argument("pump power must be >= 0");
  if (!(length_m > 0.0)) throw std::invalid_argument("fiber length must be > 0");
  if (!(lambda_p_nm > 0.0)) throw std::invalid_argument("pump wavelength must be > 0");
}

void FwmConfig::validate(const DispersionModel& model) const {
  validate();
  if (!model.in_range(omega_from_lambda_nm(lambda_p_nm)))
    throw std::invalid_argument("pump wavelength " + std::to_string(lambda_p_nm) +
                                " nm outside the dispersion model's valid range [" +
                                std::to_string(model.lambda_min_nm()) + ", " +
                                std::to_string(model.lambda_max_nm()) + "] nm");
}

double conjugate_wavelength_nm(double lambda_p_nm, double lambda_s_nm) {
  if (!(lambda_p_nm > 0.0) || !(lambda_s_nm > 0.0))
    throw std::invalid_argument("wavelengths must be positive");
  const double inv_i = 2.0 / lambda_p_nm - 1.0 / lambda_s_nm;
  if (!(inv_i > 0.0))
    throw std::invalid_argument("no energy-conserving idler for lambda_s = " +
                                std::to_string(lambda_s_nm) + " nm at pump " +
                                std::to_string(lambda_p_nm) + " nm");
  return 1.0 / inv_i;
}

double delta_k(const DispersionModel& model, double lambda_p_nm, double delta_omega) {
  const double wp = omega_from_lambda_nm(lambda_p_nm);
  const double dw = std::abs(delta_omega);
  return model.k_at(wp + dw) + model.k_at(wp - dw) - 2.0 * model.k_at(wp);
}

namespace {

// (sin z / z)^2 expressed through s = z^2, valid for either sign of s
// ((sinh w / w)^2 is the same series with s -> -s):
//   1 - s/3 + 2 s^2/45 - s^3/315
double sinc_sq_from_square(double s) {
  if (std::abs(s) < 1e-6) {
    return 1.0 + s * (-1.0 / 3.0 + s * (2.0 / 45.0 - s / 315.0));
  }
  if (s > 0.0) {
    const double z = std::sqrt(s);
    const double r = std::sin(z) / z;
    return r * r;
  }
  const double z = std::sqrt(-s);
  const double r = std::sinh(z) / z;
  return r * r;
}

}  // namespace

double phase_match_factor(double delta_k_val, const FwmConfig& config) {
  config.validate();
  if (!std::isfinite(delta_k_val)) throw std::invalid_argument("non-finite delta_k");
  const double half = 0.5 * delta_k_val;
  const double kappa_sq = half * (half + 2.0 * config.gamma_p());
  const double L = config.length_m;
  return sinc_sq_from_square(kappa_sq * L * L);
}

double pair_rate(const DispersionModel& model, const FwmConfig& config, double delta_omega,
                 double d_omega, double dt) {
  if (!(d_omega > 0.0) || !(dt > 0.0))
    throw std::invalid_argument("pair_rate needs dOmega > 0 and dt > 0");
  const double gpl = config.gamma_p_l();
  const double f = phase_match_factor(delta_k(model, config.lambda_p_nm, delta_omega), config);
  return gpl * gpl * f * d_omega * dt;
}

double trunk_branch_threshold(const DispersionModel& model, const FwmConfig& config) {
  const double b2 = model.beta2_at(omega_from_lambda_nm(config.lambda_p_nm));
  if (b2 == 0.0) return std::numeric_limits<double>::infinity();
  return 4.0 * std::sqrt(4.0 * config.gamma_p() / std::abs(b2));
}

namespace {

PairPoint make_pair_point(const DispersionModel& model, const FwmConfig& config, double dw) {
  const double wp = omega_from_lambda_nm(config.lambda_p_nm);
  PairPoint p;
  p.delta_omega = dw;
  p.lambda_s_nm = lambda_nm_from_omega(wp + dw);
  p.lambda_i_nm = lambda_nm_from_omega(wp - dw);
  p.n_density = config.gamma_p_l() * config.gamma_p_l() *
                phase_match_factor(delta_k(model, config.lambda_p_nm, dw), config);
  return p;
}

// Sign-change bracketing + bisection for f(dw) = 0 on [lo, hi], refined to
// 1e-6 relative in dw.
template <typename F>
std::vector<double> bracketed_roots(F&& f, double lo, double hi, int scan_points) {
  std::vector<double> roots;
  if (!(hi > lo) || scan_points < 2) return roots;
  const double step = (hi - lo) / (scan_points - 1);
  double a = lo, fa = f(a);
  for (int i = 1; i < scan_points; ++i) {
    const double b = (i == scan_points - 1) ? hi : lo + i * step;
    const double fb = f(b);
    if (fa == 0.0) roots.push_back(a);
    if (fa * fb < 0.0) {
      double x0 = a, x1 = b, v0 = fa;
      while ((x1 - x0) > 1e-6 * std::max(std::abs(x0), std::abs(x1))) {
        const double m = 0.5 * (x0 + x1);
        const double vm = f(m);
        if (v0 * vm <= 0.0) {
          x1 = m;
        } else {
          x0 = m;
          v0 = vm;
        }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0 && (roots.empty() || roots.back() != hi)) roots.push_back(hi);
  return roots;
}

double max_detuning(const DispersionModel& model, double lambda_p_nm) {
  const double wp = omega_from_lambda_nm(lambda_p_nm);
  // keep a sliver of margin so bisection never steps outside validity
  return std::min(model.omega_max() - wp, wp - model.omega_min()) * (1.0 - 1e-12);
}

}  // namespace

std::vector<PairPoint> branch_solutions(const DispersionModel& model, const FwmConfig& config,
                                        int scan_points) {
  config.validate(model);
  const double hi = max_detuning(model, config.lambda_p_nm);
  const double thr = trunk_branch_threshold(model, config);
  const double lo = std::max(thr, hi * 1e-9);
  if (!(lo < hi)) return {};
  auto f = [&](double dw) { return delta_k(model, config.lambda_p_nm, dw); };
  std::vector<PairPoint> out;
  for (double dw : bracketed_roots(f, lo, hi, scan_points))
    out.push_back(make_pair_point(model, config, dw));
  return out;
}

std::vector<PairPoint> trunk_solutions(const DispersionModel& model, const FwmConfig& config,
                                       int scan_points) {
  config.validate(model);
  if (!(config.pump_power_w > 0.0))
    throw std::invalid_argument("trunk_solutions needs P > 0 (the trunk condition is "
                                "delta_k = -4 gamma P)");
  const double hi0 = max_detuning(model, config.lambda_p_nm);
  const double thr = trunk_branch_threshold(model, config);
  const double hi = std::min(hi0, thr);
  const double lo = hi0 * 1e-9;
  if (!(lo < hi)) return {};
  const double target = -4.0 * config.gamma_p();
  auto f = [&](double dw) { return delta_k(model, config.lambda_p_nm, dw) - target; };
  std::vector<PairPoint> out;
  for (double dw : bracketed_roots(f, lo, hi, scan_points))
    out.push_back(make_pair_point(model, config, dw));
  return out;
}

double pair_density_at(const DispersionModel& model, const FwmConfig& config,
                       double lambda_nm) {
  const double wp = omega_from_lambda_nm(config.lambda_p_nm);
  const double w = omega_from_lambda_nm(lambda_nm);
  if (!model.in_range(w))
    throw std::domain_error("wavelength " + std::to_string(lambda_nm) +
                            " nm outside the dispersion model's valid range");
  const double mirror = 2.0 * wp - w;  // energy-conserving partner
  if (!model.in_range(mirror)) return 0.0;
  const double dw = std::abs(w - wp);
  const double gpl = config.gamma_p_l();
  return gpl * gpl * phase_match_factor(delta_k(model, config.lambda_p_nm, dw), config);
}

SpectralDensityMap spectral_map(const DispersionModel& model, const FwmConfig& config,
                                double lambda_p_min_nm, double lambda_p_max_nm,
                                std::size_t n_pump, double lambda_min_nm,
                                double lambda_max_nm, std::size_t n_lambda, int threads) {
  config.validate();
  if (n_pump < 2 || n_lambda < 2)
    throw std::invalid_argument("spectral_map needs at least a 2x2 grid");
  if (!(lambda_p_min_nm < lambda_p_max_nm) || !(lambda_min_nm < lambda_max_nm))
    throw std::invalid_argument("spectral_map ranges must be non-degenerate");
  for (double lam : {lambda_p_min_nm, lambda_p_max_nm, lambda_min_nm, lambda_max_nm}) {
    if (!model.in_range(omega_from_lambda_nm(lam)))
      throw std::domain_error("map range endpoint " + std::to_string(lam) +
                              " nm outside the dispersion model's valid range");
  }

  SpectralDensityMap map;
  map.lambda_p_axis_nm.resize(n_pump);
  map.lambda_axis_nm.resize(n_lambda);
  for (std::size_t i = 0; i < n_pump; ++i)
    map.lambda_p_axis_nm[i] =
        lambda_p_min_nm + (lambda_p_max_nm - lambda_p_min_nm) * i / double(n_pump - 1);
  for (std::size_t j = 0; j < n_lambda; ++j)
    map.lambda_axis_nm[j] =
        lambda_min_nm + (lambda_max_nm - lambda_min_nm) * j / double(n_lambda - 1);
  map.values.assign(n_pump * n_lambda, 0.0);

  auto fill_rows = [&](std::size_t row_begin, std::size_t row_end) {
    FwmConfig col = config;
    for (std::size_t i = row_begin; i < row_end; ++i) {
      col.lambda_p_nm = map.lambda_p_axis_nm[i];
      for (std::size_t j = 0; j < n_lambda; ++j) {
        map.values[i * n_lambda + j] = pair_density_at(model, col, map.lambda_axis_nm[j]);
      }
    }
  };

  // Each cell is written exactly once at a precomputed index, so the result
  // is identical for any partitioning.
  const int nt = std::clamp(threads, 1, 64);
  if (nt == 1) {
    fill_rows(0, n_pump);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n_pump + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
      const std::size_t b = std::min(n_pump, t * chunk);
      const std::size_t e = std::min(n_pump, b + chunk);
      if (b < e) pool.emplace_back(fill_rows, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return map;
}

void SpectralDensityMap::to_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write map CSV: " + path.string());
  out << "lambda_p_nm,lambda_s_nm,N_density\n";
  out.precision(17);
  for (std::size_t i = 0; i < lambda_p_axis_nm.size(); ++i)
    for (std::size_t j = 0; j < lambda_axis_nm.size(); ++j)
      out << lambda_p_axis_nm[i] << "," << lambda_axis_nm[j] << "," << at(i, j) << "\n";
}

void solutions_to_csv(const std::vector<LabeledPairPoint>& solutions,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write solutions CSV: " + path.string());
  out << "lambda_p_nm,lambda_s_nm,lambda_i_nm,kind\n";
  out.precision(17);
  for (const auto& s : solutions) {
    out << s.lambda_p_nm << "," << s.point.lambda_s_nm << "," << s.point.lambda_i_nm << ","
        << (s.kind == SolutionKind::Branch ? "branch" : "trunk") << "\n";
  }
}

double attenuation_efolding_length_m(double loss_db_per_km) {
  if (!(loss_db_per_km > 0.0)) throw std::invalid_argument("loss must be > 0 dB/km");
  return (10.0 / std::log(10.0)) / loss_db_per_km * 1000.0;
}

double calibrate_default_curvature(double pump_nm, double target_signal_nm) {
  // Bisect the curvature length W on the signed miss distance of the branch
  // signal wavelength. Larger W (flatter D) pushes the branch blueward and
  // eventually out of range entirely, so treat "no branch" as overshoot.
  auto branch_signal = [&](double w_nm) -> double {
    std::vector<GvdRow> rows;
    for (double lam = kDefaultTableMinNm; lam <= kDefaultTableMaxNm + 0.5; lam += 2.0) {
      const double x = lam - kDefaultZdwNm;
      rows.push_back({lam, kDefaultGvdSlope * x * (1.0 - x / w_nm)});
    }
    const auto model = DispersionModel::from_gvd(GvdTable(std::move(rows), "calibration"));
    FwmConfig cfg;
    cfg.lambda_p_nm = pump_nm;
    const auto roots = branch_solutions(model, cfg, 4000);
    if (roots.empty()) return -1.0;
    return roots.front().lambda_s_nm;
  };

  // Bracket choice: below W ~ 230 nm the second dispersion zero at
  // kDefaultZdwNm + W re-enters the table and the branch disappears for a
  // different reason than overshoot, so start just above that.
  double lo = 235.0, hi = 300.0;
  auto miss = [&](double w) {
    const double ls = branch_signal(w);
    return (ls < 0.0) ? -(target_signal_nm) : (ls - target_signal_nm);
  };
  double flo = miss(lo);
  if (flo < 0.0)
    throw NumericalError("calibration bracket: branch already blue of target at W = 235 nm");
  for (int i = 0; i < 200 && (hi - lo) > 1e-7; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = miss(mid);
    if (fm >= 0.0) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  (void)flo;
  return 0.5 * (lo + hi);
}

}  // namespace biphoton
