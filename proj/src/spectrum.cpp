#include "biphoton/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "biphoton/detail/text.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

void MeasuredSpectrum::validate() const {
  if (lambda_axis_nm.size() != counts_per_s.size())
    throw std::invalid_argument("spectrum axis/counts size mismatch");
  if (lambda_axis_nm.size() < 2) throw std::invalid_argument("spectrum needs >= 2 bins");
  if (!(pump_power_w > 0.0)) throw std::invalid_argument("pump power must be > 0");
  for (std::size_t i = 0; i < lambda_axis_nm.size(); ++i) {
    if (i > 0 && !(lambda_axis_nm[i - 1] < lambda_axis_nm[i]))
      throw std::invalid_argument("spectrum axis must be strictly increasing");
    if (!std::isfinite(counts_per_s[i]) || counts_per_s[i] < 0.0)
      throw std::invalid_argument("spectrum counts must be finite and >= 0");
    if (in_stop_band(lambda_axis_nm[i]))
      throw std::invalid_argument("spectrum bin at " + std::to_string(lambda_axis_nm[i]) +
                                  " nm lies inside the stop band (stop-band data is "
                                  "missing data, not rows)");
  }
  if (stop_band_nm && !(stop_band_nm->first < stop_band_nm->second))
    throw std::invalid_argument("stop band must be an increasing interval");
}

bool MeasuredSpectrum::in_stop_band(double lambda_nm) const {
  return stop_band_nm && lambda_nm > stop_band_nm->first && lambda_nm < stop_band_nm->second;
}

MeasuredSpectrum MeasuredSpectrum::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spectrum file: " + path.string());
  const std::string fname = path.string();

  MeasuredSpectrum spec;
  bool saw_power = false, saw_header = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto body = detail::trim(t.substr(1));
      if (body.rfind("pump_power_W=", 0) == 0) {
        spec.pump_power_w = detail::parse_double(body.substr(13), fname, line_no);
        saw_power = true;
      } else if (body.rfind("stop_band_nm=", 0) == 0) {
        const auto parts = detail::split_csv(body.substr(13));
        if (parts.size() != 2)
          throw ParseError(fname + ":" + std::to_string(line_no) +
                           ": stop_band_nm needs two comma-separated values");
        spec.stop_band_nm = {detail::parse_double(parts[0], fname, line_no),
                             detail::parse_double(parts[1], fname, line_no)};
      }
      continue;  // other comments are free text
    }
    if (!saw_header) {
      if (t != "lambda_nm,counts_per_s")
        throw ParseError(fname + ":" + std::to_string(line_no) +
                         ": expected header 'lambda_nm,counts_per_s'");
      saw_header = true;
      continue;
    }
    const auto fields = detail::split_csv(t);
    if (fields.size() != 2)
      throw ParseError(fname + ":" + std::to_string(line_no) + ": expected 2 fields");
    const double lam = detail::parse_double(fields[0], fname, line_no);
    const double cnt = detail::parse_double(fields[1], fname, line_no);
    if (spec.in_stop_band(lam))
      throw ParseError(fname + ":" + std::to_string(line_no) + ": data row at " +
                       std::to_string(lam) + " nm inside the declared stop band");
    spec.lambda_axis_nm.push_back(lam);
    spec.counts_per_s.push_back(cnt);
  }
  if (!saw_header) throw ParseError(fname + ": missing 'lambda_nm,counts_per_s' header");
  if (!saw_power) throw ParseError(fname + ": missing '# pump_power_W=' header comment");
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(fname + ": " + e.what());
  }
  return spec;
}

void MeasuredSpectrum::to_csv(const std::filesystem::path& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write spectrum file: " + path.string());
  out.precision(17);
  out << "# pump_power_W=" << pump_power_w << "\n";
  if (stop_band_nm)
    out << "# stop_band_nm=" << stop_band_nm->first << "," << stop_band_nm->second << "\n";
  out << "lambda_nm,counts_per_s\n";
  for (std::size_t i = 0; i < lambda_axis_nm.size(); ++i)
    out << lambda_axis_nm[i] << "," << counts_per_s[i] << "\n";
}

DecomposedSpectrum decompose(std::span<const MeasuredSpectrum> spectra) {
  if (spectra.size() < 2)
    throw std::invalid_argument("decompose needs at least two spectra at different powers");
  for (const auto& s : spectra) s.validate();
  const auto& axis = spectra.front().lambda_axis_nm;
  for (const auto& s : spectra) {
    if (s.lambda_axis_nm != axis)
      throw std::invalid_argument("decompose: spectra must share an identical wavelength axis");
    if (s.stop_band_nm != spectra.front().stop_band_nm)
      throw std::invalid_argument("decompose: spectra must share the same stop band");
  }
  // conditioning guard: the most separated power pair must differ by >= 20%
  double pmin = spectra[0].pump_power_w, pmax = pmin;
  for (const auto& s : spectra) {
    pmin = std::min(pmin, s.pump_power_w);
    pmax = std::max(pmax, s.pump_power_w);
  }
  if (!((pmax - pmin) / pmax >= 0.2))
    throw std::invalid_argument("decompose: pump powers differ by less than 20%; the "
                                "per-bin solve for (a, b) is ill-conditioned");

  DecomposedSpectrum dec;
  dec.lambda_axis_nm = axis;
  dec.stop_band_nm = spectra.front().stop_band_nm;
  dec.reference_power_w = pmax;
  const std::size_t nbin = axis.size();
  dec.linear_coeff.resize(nbin);
  dec.quad_coeff.resize(nbin);
  dec.pair_component.resize(nbin);
  dec.linear_component.resize(nbin);
  dec.clamped.assign(nbin, 0);

  // Per-bin normal equations for S = a P + b P^2 over all supplied powers;
  // with exactly two spectra this reduces to the exact 2x2 solve.
  double spp = 0.0, spq = 0.0, sqq = 0.0;  // sums of P^2, P^3, P^4
  for (const auto& s : spectra) {
    const double p = s.pump_power_w;
    spp += p * p;
    spq += p * p * p;
    sqq += p * p * p * p;
  }
  const double det = spp * sqq - spq * spq;
  if (!(std::abs(det) > 0.0))
    throw std::invalid_argument("decompose: degenerate power set");

  for (std::size_t i = 0; i < nbin; ++i) {
    double rp = 0.0, rq = 0.0;  // sums of S*P and S*P^2
    for (const auto& s : spectra) {
      rp += s.counts_per_s[i] * s.pump_power_w;
      rq += s.counts_per_s[i] * s.pump_power_w * s.pump_power_w;
    }
    double a = (rp * sqq - rq * spq) / det;
    double b = (rq * spp - rp * spq) / det;
    if (a < 0.0 || b < 0.0) {
      dec.clamped[i] = 1;
      a = std::max(a, 0.0);
      b = std::max(b, 0.0);
    }
    // snap rounding dust to an exact zero: a component twelve orders below
    // the bin's count scale is solver noise, not signal
    double scale = 0.0;
    for (const auto& s : spectra) scale = std::max(scale, std::abs(s.counts_per_s[i]));
    if (std::abs(a) * pmax < 1e-12 * scale) a = 0.0;
    if (std::abs(b) * pmax * pmax < 1e-12 * scale) b = 0.0;
    dec.linear_coeff[i] = a;
    dec.quad_coeff[i] = b;
    dec.linear_component[i] = a * pmax;
    dec.pair_component[i] = b * pmax * pmax;
  }
  return dec;
}

DecomposedSpectrum decompose(const MeasuredSpectrum& spec1, const MeasuredSpectrum& spec2) {
  const MeasuredSpectrum arr[2] = {spec1, spec2};
  return decompose(std::span<const MeasuredSpectrum>(arr, 2));
}

std::vector<double> background_model(const DecomposedSpectrum& dec, double power_w) {
  if (!(power_w > 0.0)) throw std::invalid_argument("background power must be > 0");
  std::vector<double> out(dec.linear_coeff.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dec.linear_coeff[i] * power_w;
  return out;
}

void DecomposedSpectrum::to_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write decomposition file: " + path.string());
  out.precision(17);
  out << "# reference_power_W=" << reference_power_w << "\n";
  if (stop_band_nm)
    out << "# stop_band_nm=" << stop_band_nm->first << "," << stop_band_nm->second << "\n";
  out << "lambda_nm,pair,linear,clamped\n";
  for (std::size_t i = 0; i < lambda_axis_nm.size(); ++i)
    out << lambda_axis_nm[i] << "," << pair_component[i] << "," << linear_component[i] << ","
        << int(clamped[i]) << "\n";
}

namespace {

// Midpoint cell boundaries around axis point i; end cells extend half a
// spacing outward so a uniform axis covers a uniform span.
std::pair<double, double> cell_bounds(std::span<const double> axis, std::size_t i) {
  const std::size_t n = axis.size();
  const double lo =
      (i == 0) ? axis[0] - 0.5 * (axis[1] - axis[0]) : 0.5 * (axis[i - 1] + axis[i]);
  const double hi =
      (i + 1 == n) ? axis[n - 1] + 0.5 * (axis[n - 1] - axis[n - 2])
                   : 0.5 * (axis[i] + axis[i + 1]);
  return {lo, hi};
}

double gauss_window_integral(double lo, double hi, double center, double fwhm) {
  // integral of exp(-4 ln2 (x-c)^2 / fwhm^2) over [lo, hi]
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double s2 = sigma * std::sqrt(2.0);
  return sigma * std::sqrt(2.0 * std::acos(-1.0)) * 0.5 *
         (std::erf((hi - center) / s2) - std::erf((lo - center) / s2));
}

}  // namespace

double band_integrate(std::span<const double> axis, std::span<const double> density,
                      const std::optional<std::pair<double, double>>& stop_band,
                      double center_nm, double fwhm_nm, FilterShape shape) {
  if (axis.size() != density.size() || axis.size() < 2)
    throw std::invalid_argument("band_integrate: bad axis/density arrays");
  if (!(fwhm_nm > 0.0)) throw std::invalid_argument("band_integrate: fwhm must be > 0");
  const double lo = center_nm - 0.5 * fwhm_nm;
  const double hi = center_nm + 0.5 * fwhm_nm;
  const auto [axis_lo, axis_hi] =
      std::pair{cell_bounds(axis, 0).first, cell_bounds(axis, axis.size() - 1).second};
  if (lo < axis_lo || hi > axis_hi) {
    std::ostringstream oss;
    oss << "band [" << lo << ", " << hi << "] nm extends beyond the spectrum axis ["
        << axis_lo << ", " << axis_hi << "] nm";
    throw std::invalid_argument(oss.str());
  }
  if (stop_band && lo < stop_band->second && hi > stop_band->first) {
    std::ostringstream oss;
    oss << "band [" << lo << ", " << hi << "] nm overlaps the stop band ["
        << stop_band->first << ", " << stop_band->second << "] nm (overlap ["
        << std::max(lo, stop_band->first) << ", " << std::min(hi, stop_band->second)
        << "] nm has no data)";
    throw std::invalid_argument(oss.str());
  }

  double total = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const auto [clo, chi] = cell_bounds(axis, i);
    if (shape == FilterShape::Rectangular) {
      const double overlap = std::min(chi, hi) - std::max(clo, lo);
      if (overlap > 0.0) total += density[i] * overlap;
    } else {
      // unit-peak gaussian weight; effective width 1.0645 * fwhm on a flat
      // spectrum, documented behaviour of the gaussian switch
      total += density[i] * gauss_window_integral(clo, chi, center_nm, fwhm_nm);
    }
  }
  return total;
}

double band_integrate(const MeasuredSpectrum& spec, double center_nm, double fwhm_nm,
                      FilterShape shape) {
  spec.validate();
  return band_integrate(spec.lambda_axis_nm, spec.counts_per_s, spec.stop_band_nm, center_nm,
                        fwhm_nm, shape);
}

}  // namespace biphoton
