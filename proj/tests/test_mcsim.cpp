#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "biphoton/interferometer.hpp"
#include "biphoton/mcsim.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {

SourceParams ideal_params(double mu) {
  SourceParams p;
  p.pair_rate_hz = 2e4;
  p.eta_s = 1.0;
  p.eta_i = 1.0;
  p.mu = mu;
  p.tau_s = 2e-9;
  p.jitter_sigma_s = 0.0;
  return p;
}

GateConfig wide_gate() { return {6e-9, 0.1e-9}; }

// counts in a TAC window centered at dt0 with half-width w
std::uint64_t window_counts(const TacHistogram& tac, double dt0, double w) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < tac.counts.size(); ++i)
    if (std::abs(tac.bin_center_s(i) - dt0) <= w) total += tac.counts[i];
  return total;
}

}  // namespace

TEST_SUITE("mcsim") {

TEST_CASE("event generation is deterministic per seed") {
  const auto p = ideal_params(0.8);
  const auto a = emit_events(p, 0.3, 0.5, 42);
  const auto b = emit_events(p, 0.3, 0.5, 42);
  CHECK(a.signal_s == b.signal_s);
  CHECK(a.idler_s == b.idler_s);
  const auto c = emit_events(p, 0.3, 0.5, 43);
  CHECK(a.signal_s != c.signal_s);
}

TEST_CASE("scan is reproducible and seed-sensitive") {
  const auto p = ideal_params(0.83);
  const std::vector<double> dxs{0, 50, 100, 150, 200, 250, 300, 350};
  const auto s1 = scan_fringe(p, wide_gate(), 760.4, dxs, 0.05, 7);
  const auto s2 = scan_fringe(p, wide_gate(), 760.4, dxs, 0.05, 7);
  CHECK(s1.coincidences == s2.coincidences);
  const auto s3 = scan_fringe(p, wide_gate(), 760.4, dxs, 0.05, 8);
  CHECK(s1.coincidences != s3.coincidences);
}

TEST_CASE("arrival-time classes populate 1:2:1 at mu = 0") {
  const auto p = ideal_params(0.0);
  const auto ev = emit_events(p, 0.0, 5.0, 11);  // ~1e5 pairs
  const auto res = count_coincidences(ev, wide_gate());
  const auto c0 = window_counts(res.tac, 0.0, 0.3e-9);
  const auto cp = window_counts(res.tac, +2e-9, 0.3e-9);
  const auto cm = window_counts(res.tac, -2e-9, 0.3e-9);
  const double n = double(c0 + cp + cm);
  CHECK(n > 9e4);
  // center holds half the pairs; each side peak a quarter
  CHECK(std::abs(c0 - 0.5 * n) < 3.0 * std::sqrt(n * 0.25));
  CHECK(std::abs(double(cp) - double(cm)) < 3.0 * std::sqrt(double(cp + cm)));
  CHECK(std::abs(cp - 0.25 * n) < 3.0 * std::sqrt(n * 0.1875));
}

TEST_CASE("jittered peaks sit at -tau, 0, +tau") {
  auto p = ideal_params(0.0);
  p.jitter_sigma_s = 150e-12;
  const auto ev = emit_events(p, 0.0, 5.0, 21);
  const auto res = count_coincidences(ev, wide_gate());
  const auto& tac = res.tac;
  auto peak_near = [&](double dt0) {
    double best_dt = 0.0;
    std::uint64_t best = 0;
    for (std::size_t i = 0; i < tac.counts.size(); ++i) {
      if (std::abs(tac.bin_center_s(i) - dt0) <= 0.8e-9 && tac.counts[i] > best) {
        best = tac.counts[i];
        best_dt = tac.bin_center_s(i);
      }
    }
    return best_dt;
  };
  CHECK(std::abs(peak_near(0.0)) < 0.2e-9);
  CHECK(std::abs(peak_near(+2e-9) - 2e-9) < 0.2e-9);
  CHECK(std::abs(peak_near(-2e-9) + 2e-9) < 0.2e-9);
}

TEST_CASE("gate narrowing keeps the center class only") {
  // mu = 1 at phase 0: center class carries (1+mu)/2 of the modulated rate,
  // so the wide/narrow count ratio is (1 + mu/2) / ((1+mu)/2) = 3/2
  const auto p = ideal_params(1.0);
  const auto ev = emit_events(p, 0.0, 5.0, 31);
  const auto wide = count_coincidences(ev, wide_gate());
  const auto narrow = count_coincidences(ev, {1.5e-9, 0.3e-9});
  const double ratio = double(wide.coincidences) / double(narrow.coincidences);
  CHECK(ratio == doctest::Approx(1.5).epsilon(0.02));
}

TEST_CASE("coincidences are monotone in the gate window by construction") {
  auto p = ideal_params(0.7);
  p.eta_s = 0.4;
  p.eta_i = 0.45;
  p.background_s_hz = 2e3;
  p.background_i_hz = 1e3;
  p.jitter_sigma_s = 150e-12;
  const auto ev = emit_events(p, 1.1, 2.0, 99);
  std::uint64_t prev = 0;
  for (double t_ns : {1.0, 1.5, 2.0, 3.0, 4.5, 6.0, 8.0}) {
    const auto res = count_coincidences(ev, {t_ns * 1e-9, 0.25e-9});
    CHECK(res.coincidences >= prev);
    prev = res.coincidences;
  }
}

TEST_CASE("TAC histogram totals the gated coincidences") {
  const auto p = ideal_params(0.5);
  const auto ev = emit_events(p, 0.7, 1.0, 5);
  const auto res = count_coincidences(ev, wide_gate());
  const auto total = std::accumulate(res.tac.counts.begin(), res.tac.counts.end(),
                                     std::uint64_t{0});
  CHECK(total == res.coincidences);
}

TEST_CASE("unsorted event streams are rejected") {
  EventStreams ev;
  ev.signal_s = {1e-3, 0.5e-3, 2e-3};
  ev.idler_s = {1e-3, 1.5e-3};
  CHECK_THROWS_AS(count_coincidences(ev, wide_gate()), std::invalid_argument);
}

TEST_CASE("uncorrelated streams produce the r1 r2 T accidental rate") {
  SourceParams p;
  p.pair_rate_hz = 0.0;
  p.background_s_hz = 1e5;
  p.background_i_hz = 1e5;
  p.tau_s = 2e-9;
  const double duration = 5.0;
  const auto ev = emit_events(p, 0.0, duration, 13);
  const auto res = count_coincidences(ev, wide_gate());
  // each signal finds an idler within +-T/2 with probability ~ r T
  const double expected = 1e5 * duration * (1e5 * 6e-9);
  CHECK(std::abs(double(res.coincidences) - expected) < 5.0 * std::sqrt(expected));
}

TEST_CASE("narrow gate doubles the fitted fringe visibility") {
  SourceParams p;
  p.pair_rate_hz = 2e4;
  p.eta_s = 0.32;
  p.eta_i = 0.33;
  p.mu = 0.83;
  p.tau_s = 0.6 / kSpeedOfLight;
  std::vector<double> dxs(16);
  for (std::size_t i = 0; i < dxs.size(); ++i) dxs[i] = 760.4 * double(i) / double(dxs.size() - 1);
  const auto scan_wide = scan_fringe(p, wide_gate(), 760.4, dxs, 1.0, 3);
  const auto scan_narrow = scan_fringe(p, {1.5e-9, 0.3e-9}, 760.4, dxs, 1.0, 3);
  const auto fit_wide = fit_visibility(scan_wide.to_scan_points(), 380.2);
  const auto fit_narrow = fit_visibility(scan_narrow.to_scan_points(), 380.2);
  CHECK(fit_narrow.visibility > fit_wide.visibility + 0.2);
  CHECK(fit_wide.visibility == doctest::Approx(0.415).epsilon(0.15));
  CHECK(fit_narrow.visibility == doctest::Approx(0.83).epsilon(0.08));
}

TEST_CASE("longer acquisitions shrink the visibility error bar") {
  const auto p = ideal_params(0.83);
  std::vector<double> dxs(12);
  for (std::size_t i = 0; i < dxs.size(); ++i) dxs[i] = 600.0 * double(i) / double(dxs.size() - 1);
  const auto quick = scan_fringe(p, wide_gate(), 760.4, dxs, 0.05, 17);
  const auto longer = scan_fringe(p, wide_gate(), 760.4, dxs, 1.6, 17);
  const auto fit_quick = fit_visibility(quick.to_scan_points(), 380.2);
  const auto fit_long = fit_visibility(longer.to_scan_points(), 380.2);
  CHECK(fit_long.visibility_stderr < 0.5 * fit_quick.visibility_stderr);
}

TEST_CASE("detected rate estimate multiplies the loss chain") {
  CHECK(detected_rate_estimate(2e4, 0.5, 0.32, 0.33) == doctest::Approx(1056.0).epsilon(1e-12));
  CHECK(detected_rate_estimate(0.0, 0.5, 0.32, 0.33) == 0.0);
  CHECK_THROWS_AS(detected_rate_estimate(2e4, 1.5, 0.32, 0.33), std::invalid_argument);
  CHECK_THROWS_AS(detected_rate_estimate(2e4, 0.5, -0.1, 0.33), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  SourceParams p;
  p.mu = 1.2;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SourceParams{};
  p.tau_s = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = SourceParams{};
  p.eta_s = 1.0001;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  GateConfig g{6e-9, 2e-9};  // bin > window / 4
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
  CHECK_NOTHROW(GateConfig{6e-9, 1.5e-9}.validate());
}

}  // TEST_SUITE
