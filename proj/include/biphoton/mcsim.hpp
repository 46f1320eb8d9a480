#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "biphoton/interferometer.hpp"  // ScanPoint

namespace biphoton {

// Photon-pair source plus detection chain, as seen by the counting
// electronics. Rates are per second; efficiencies are overall (collection x
// quantum) per arm. tau_s is the long/short propagation-time difference that
// separates the arrival-time classes.
struct SourceParams {
  double pair_rate_hz = 2.0e4;
  double eta_s = 0.32;
  double eta_i = 0.33;
  double dark_s_hz = 0.0;
  double dark_i_hz = 0.0;
  double background_s_hz = 0.0;
  double background_i_hz = 0.0;
  double mu = 0.83;
  double tau_s = 2.0e-9;
  double jitter_sigma_s = 150e-12;

  void validate() const;
};

// Coincidence gate and TAC binning. The gate accepts |t_i - t_s| <= window/2;
// the histogram spans the same window.
struct GateConfig {
  double window_s = 6.0e-9;
  double tac_bin_s = 0.1e-9;

  void validate() const;
};

struct EventStreams {
  std::vector<double> signal_s;  // detection times, sorted ascending
  std::vector<double> idler_s;
};

struct TacHistogram {
  double window_s = 0.0;
  double bin_s = 0.0;
  std::vector<std::uint64_t> counts;  // over [-window/2, window/2)

  double bin_center_s(std::size_t i) const { return -0.5 * window_s + (i + 0.5) * bin_s; }
  void to_csv(const std::filesystem::path& path) const;  // dt_ns,counts
};

struct CoincidenceResult {
  std::uint64_t coincidences = 0;
  TacHistogram tac;
};

// Draw one acquisition of duration_s at interferometer phase phase_rad
// (phase of the biphoton fringe, 2 k_p dL). Pairs arrive as a Poisson
// process whose rate carries the fringe modulation 1 + (mu/2) cos(phase);
// each pair lands in one of three arrival-time classes:
//   both photons undelayed or both delayed by tau   (indistinguishable pair)
//   signal delayed by tau, idler undelayed
//   idler delayed by tau, signal undelayed
// with probabilities (1 + mu cos(phase))/2, 1/4, 1/4 relative to the
// modulated rate. Photons are then thinned by the arm efficiencies and
// smeared by detector jitter. Dark and broadband background counts are
// independent Poisson streams per detector. Fully deterministic for a given
// seed, independent of platform.
EventStreams emit_events(const SourceParams& params, double phase_rad, double duration_s,
                         std::uint64_t seed);

// Start-stop converter model: each signal event is paired with its nearest
// idler event in time; pairs inside the gate window are coincidences and
// fill the TAC histogram. Pairing ignores the gate entirely, so widening the
// window can only add counts, never remove or move them. Both streams must
// be sorted ascending.
CoincidenceResult count_coincidences(const EventStreams& events, const GateConfig& gate);

struct CoincidenceScan {
  std::vector<double> delta_x_nm;
  std::vector<double> coincidences;
  std::vector<TacHistogram> tac;
  double duration_per_point_s = 0.0;
  std::uint64_t seed = 0;

  std::vector<ScanPoint> to_scan_points() const;
  void to_csv(const std::filesystem::path& path) const;  // delta_x_nm,coincidences,duration_s
};

// Simulate a piezo fringe scan: point j runs at phase 2 k_p (c tau + dx_j)
// with its own seed derived from the scan seed, so the points are
// statistically independent but the whole scan is reproducible.
CoincidenceScan scan_fringe(const SourceParams& params, const GateConfig& gate,
                            double lambda_p_nm, std::span<const double> delta_x_nm,
                            double duration_per_point_s, std::uint64_t seed);

// Back-of-envelope detected pair rate: source rate x fraction of pairs
// surviving the optics x both detector efficiencies.
double detected_rate_estimate(double source_rate_hz, double pair_throughput, double eta_s,
                              double eta_i);

}  // namespace biphoton
