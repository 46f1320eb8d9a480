#include "biphoton/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "biphoton/rng.hpp"
#include "biphoton/units.hpp"

namespace biphoton {

void SourceParams::validate() const {
  if (!(pair_rate_hz >= 0.0)) throw std::invalid_argument("source: pair rate must be >= 0");
  if (!(eta_s >= 0.0 && eta_s <= 1.0) || !(eta_i >= 0.0 && eta_i <= 1.0))
    throw std::invalid_argument("source: efficiencies must lie in [0, 1]");
  if (!(dark_s_hz >= 0.0) || !(dark_i_hz >= 0.0) || !(background_s_hz >= 0.0) ||
      !(background_i_hz >= 0.0))
    throw std::invalid_argument("source: dark/background rates must be >= 0");
  if (!(mu >= 0.0 && mu <= 1.0)) throw std::invalid_argument("source: mu must lie in [0, 1]");
  if (!(tau_s > 0.0))
    throw std::invalid_argument("source: arrival-time class separation tau must be > 0");
  if (!(jitter_sigma_s >= 0.0)) throw std::invalid_argument("source: jitter sigma must be >= 0");
}

void GateConfig::validate() const {
  if (!(window_s > 0.0)) throw std::invalid_argument("gate: window must be > 0");
  if (!(tac_bin_s > 0.0)) throw std::invalid_argument("gate: TAC bin must be > 0");
  if (tac_bin_s > window_s / 4.0)
    throw std::invalid_argument("gate: TAC bin must be at most a quarter of the window");
}

namespace {

// homogeneous Poisson stream on [0, duration) by exponential gaps
std::vector<double> poisson_stream(double rate_hz, double duration_s, Rng& rng) {
  std::vector<double> times;
  if (rate_hz <= 0.0) return times;
  double t = rng.exponential(rate_hz);
  while (t < duration_s) {
    times.push_back(t);
    t += rng.exponential(rate_hz);
  }
  return times;
}

}  // namespace

EventStreams emit_events(const SourceParams& params, double phase_rad, double duration_s,
                         std::uint64_t seed) {
  params.validate();
  if (!(duration_s > 0.0)) throw std::invalid_argument("emit_events: duration must be > 0");

  EventStreams ev;
  Rng pair_rng(Rng::derive(seed, 0));

  // fringe-modulated pair rate and the class probabilities under it
  const double mod = 1.0 + 0.5 * params.mu * std::cos(phase_rad);
  const double rate = params.pair_rate_hz * mod;
  const double p_center = 0.5 * (1.0 + params.mu * std::cos(phase_rad)) / mod;
  const double p_plus = 0.25 / mod;  // idler delayed; signal-delayed has the rest

  if (rate > 0.0) {
    double t = pair_rng.exponential(rate);
    while (t < duration_s) {
      double dt_s = 0.0, dt_i = 0.0;
      const double u = pair_rng.uniform();
      if (u < p_center) {
        // both photons took the same arm; long/long adds tau to both
        if (pair_rng.uniform() < 0.5) {
          dt_s = params.tau_s;
          dt_i = params.tau_s;
        }
      } else if (u < p_center + p_plus) {
        dt_i = params.tau_s;
      } else {
        dt_s = params.tau_s;
      }
      const bool keep_s = pair_rng.uniform() < params.eta_s;
      const bool keep_i = pair_rng.uniform() < params.eta_i;
      if (keep_s) ev.signal_s.push_back(t + dt_s + pair_rng.normal(0.0, params.jitter_sigma_s));
      if (keep_i) ev.idler_s.push_back(t + dt_i + pair_rng.normal(0.0, params.jitter_sigma_s));
      t += pair_rng.exponential(rate);
    }
  }

  // uncorrelated singles: broadband background plus dark counts, one merged
  // Poisson stream per detector (jitter on a uniform process changes nothing)
  Rng bg_s_rng(Rng::derive(seed, 1));
  Rng bg_i_rng(Rng::derive(seed, 2));
  for (double t : poisson_stream(params.background_s_hz + params.dark_s_hz, duration_s, bg_s_rng))
    ev.signal_s.push_back(t);
  for (double t : poisson_stream(params.background_i_hz + params.dark_i_hz, duration_s, bg_i_rng))
    ev.idler_s.push_back(t);

  std::sort(ev.signal_s.begin(), ev.signal_s.end());
  std::sort(ev.idler_s.begin(), ev.idler_s.end());
  return ev;
}

CoincidenceResult count_coincidences(const EventStreams& events, const GateConfig& gate) {
  gate.validate();
  if (!std::is_sorted(events.signal_s.begin(), events.signal_s.end()) ||
      !std::is_sorted(events.idler_s.begin(), events.idler_s.end()))
    throw std::invalid_argument("count_coincidences: event streams must be sorted ascending");

  CoincidenceResult res;
  res.tac.window_s = gate.window_s;
  res.tac.bin_s = gate.tac_bin_s;
  const std::size_t n_bins =
      static_cast<std::size_t>(std::llround(gate.window_s / gate.tac_bin_s));
  res.tac.counts.assign(n_bins, 0);

  const auto& sig = events.signal_s;
  const auto& idl = events.idler_s;
  if (sig.empty() || idl.empty()) return res;

  const double half = 0.5 * gate.window_s;
  std::size_t j = 0;
  for (const double s : sig) {
    while (j + 1 < idl.size() && idl[j] < s) ++j;
    // nearest idler is idl[j] or its left neighbour
    double dt = idl[j] - s;
    if (j > 0 && std::abs(idl[j - 1] - s) < std::abs(dt)) dt = idl[j - 1] - s;
    if (std::abs(dt) <= half) {
      ++res.coincidences;
      auto bin = static_cast<std::size_t>((dt + half) / gate.tac_bin_s);
      if (bin >= n_bins) bin = n_bins - 1;  // right edge
      ++res.tac.counts[bin];
    }
  }
  return res;
}

CoincidenceScan scan_fringe(const SourceParams& params, const GateConfig& gate,
                            double lambda_p_nm, std::span<const double> delta_x_nm,
                            double duration_per_point_s, std::uint64_t seed) {
  params.validate();
  gate.validate();
  if (!(lambda_p_nm > 0.0)) throw std::invalid_argument("scan_fringe: pump wavelength must be > 0");
  if (delta_x_nm.empty()) throw std::invalid_argument("scan_fringe: empty scan");

  const double k_p = 2.0 * std::numbers::pi / (lambda_p_nm * 1e-9);
  const double base_dl = params.tau_s * kSpeedOfLight;

  CoincidenceScan scan;
  scan.delta_x_nm.assign(delta_x_nm.begin(), delta_x_nm.end());
  scan.duration_per_point_s = duration_per_point_s;
  scan.seed = seed;
  scan.coincidences.reserve(delta_x_nm.size());
  scan.tac.reserve(delta_x_nm.size());
  for (std::size_t jpt = 0; jpt < delta_x_nm.size(); ++jpt) {
    const double phase = 2.0 * k_p * (base_dl + delta_x_nm[jpt] * 1e-9);
    const auto ev =
        emit_events(params, phase, duration_per_point_s, Rng::derive(seed, 100 + jpt));
    const auto res = count_coincidences(ev, gate);
    scan.coincidences.push_back(static_cast<double>(res.coincidences));
    scan.tac.push_back(res.tac);
  }
  return scan;
}

double detected_rate_estimate(double source_rate_hz, double pair_throughput, double eta_s,
                              double eta_i) {
  if (!(source_rate_hz >= 0.0)) throw std::invalid_argument("rate estimate: source rate < 0");
  if (!(pair_throughput >= 0.0 && pair_throughput <= 1.0))
    throw std::invalid_argument("rate estimate: pair throughput must lie in [0, 1]");
  if (!(eta_s >= 0.0 && eta_s <= 1.0) || !(eta_i >= 0.0 && eta_i <= 1.0))
    throw std::invalid_argument("rate estimate: efficiencies must lie in [0, 1]");
  return source_rate_hz * pair_throughput * eta_s * eta_i;
}

std::vector<ScanPoint> CoincidenceScan::to_scan_points() const {
  std::vector<ScanPoint> pts;
  pts.reserve(delta_x_nm.size());
  for (std::size_t i = 0; i < delta_x_nm.size(); ++i)
    pts.push_back({delta_x_nm[i], coincidences[i]});
  return pts;
}

void CoincidenceScan::to_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "delta_x_nm,coincidences,duration_s\n";
  out.precision(17);
  for (std::size_t i = 0; i < delta_x_nm.size(); ++i)
    out << delta_x_nm[i] << "," << coincidences[i] << "," << duration_per_point_s << "\n";
}

void TacHistogram::to_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "dt_ns,counts\n";
  out.precision(17);
  for (std::size_t i = 0; i < counts.size(); ++i)
    out << bin_center_s(i) * 1e9 << "," << counts[i] << "\n";
}

}  // namespace biphoton
