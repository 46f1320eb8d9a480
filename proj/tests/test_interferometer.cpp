#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "biphoton/interferometer.hpp"
#include "biphoton/phasematch.hpp"
#include "biphoton/rng.hpp"
#include "biphoton/units.hpp"

using namespace biphoton;

namespace {

constexpr double kPumpNm = 760.4;
const double kKp = 2.0 * M_PI / (kPumpNm * 1e-9);

std::vector<ScanPoint> sample_fringe(double (*shape)(double, double, double), double mu,
                                     double scale, int n = 24) {
  const double period = kPumpNm / 2.0;
  std::vector<ScanPoint> scan;
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  for (int i = 0; i < n; ++i) {
    const double dx = 1.5 * period * i / (n - 1);
    scan.push_back({dx, scale * shape(kKp, geom.delta_l_m() + dx * 1e-9, mu)});
  }
  return scan;
}

}  // namespace

TEST_SUITE("interferometer") {

TEST_CASE("geometry bookkeeping: path difference and delay") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6, 50e-9);
  CHECK(geom.delta_l_m() == 0.6);
  CHECK(geom.effective_delta_l_m() == doctest::Approx(0.6 + 50e-9));
  CHECK(geom.tau_s() == doctest::Approx(0.6 / kSpeedOfLight));  // close to 2 ns
  CHECK(geom.tau_s() == doctest::Approx(2.0014e-9).epsilon(1e-4));
  CHECK_THROWS_AS(InterferometerGeometry::from_delta_l(-0.1), std::invalid_argument);
}

TEST_CASE("path amplitudes carry the documented phases") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  const double ks = 2.0 * M_PI / 660e-9;
  const auto st = path_amplitudes(geom, kKp, ks, 1.0);
  const double dl = geom.effective_delta_l_m();
  CHECK(std::abs(st.a_ll) == doctest::Approx(0.5));
  CHECK(std::abs(st.a_sl) == doctest::Approx(0.5));
  CHECK(std::abs(st.a_ls) == doctest::Approx(0.5));
  CHECK(st.a_ss == std::complex<double>(0.5, 0.0));
  CHECK(std::arg(st.a_ll) ==
        doctest::Approx(std::remainder(2.0 * kKp * dl, 2.0 * M_PI)).epsilon(1e-9));
  CHECK(std::arg(st.a_sl) == doctest::Approx(std::remainder(ks * dl, 2.0 * M_PI)).epsilon(1e-9));
  // energy conservation fixes the idler
  CHECK(st.k_i == doctest::Approx(2.0 * kKp - ks).epsilon(1e-12));
}

TEST_CASE("the indistinguishable-path pair interferes at twice the pump wavenumber") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  const double ks = 2.0 * M_PI / 660e-9;
  const auto st = path_amplitudes(geom, kKp, ks, 1.0);
  const double dl = geom.effective_delta_l_m();
  CHECK(std::norm(st.a_ll + st.a_ss) ==
        doctest::Approx(0.5 * (1.0 + std::cos(2.0 * kKp * dl))).epsilon(1e-9));
}

TEST_CASE("coincidence shape reduces to the spectral three-term formula") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const double q = (rng.uniform() - 0.5) * 4e5;  // signal detuning, rad/m
    const double mu = rng.uniform();
    const auto st = path_amplitudes(geom, kKp, kKp + q, mu);
    const double dl = geom.effective_delta_l_m();
    const double expected =
        1.0 + mu * (0.5 * std::cos(2.0 * kKp * dl) +
                    2.0 * std::cos(kKp * dl) * std::cos(q * dl) +
                    0.5 * std::cos(2.0 * q * dl));
    CHECK(st.coincidence_shape() == doctest::Approx(expected).epsilon(1e-9));
    CHECK(st.coincidence_shape() >= 0.0);
  }
}

TEST_CASE("full-gate fringe fits to visibility mu/2, postselected to mu") {
  const auto full1 = fit_visibility(sample_fringe(&coincidence_full, 1.0, 1000.0),
                                    kPumpNm / 2.0);
  CHECK(full1.visibility == doctest::Approx(0.5).epsilon(1e-9));
  const auto post1 = fit_visibility(sample_fringe(&coincidence_postselected, 1.0, 1000.0),
                                    kPumpNm / 2.0);
  CHECK(post1.visibility == doctest::Approx(1.0).epsilon(1e-9));
  const auto full083 = fit_visibility(sample_fringe(&coincidence_full, 0.83, 1000.0),
                                      kPumpNm / 2.0);
  CHECK(full083.visibility == doctest::Approx(0.415).epsilon(1e-9));
  const auto post083 = fit_visibility(sample_fringe(&coincidence_postselected, 0.83, 1000.0),
                                      kPumpNm / 2.0);
  CHECK(post083.visibility == doctest::Approx(0.83).epsilon(1e-9));
  // postselection doubles the modulation depth on the same offset
  CHECK(post083.amplitude == doctest::Approx(2.0 * full083.amplitude).epsilon(1e-9));
  CHECK(post083.offset == doctest::Approx(full083.offset).epsilon(1e-9));
}

TEST_CASE("fringe averages over one period are the unit offset") {
  const auto fit = fit_visibility(sample_fringe(&coincidence_full, 0.7, 1.0, 48),
                                  kPumpNm / 2.0);
  CHECK(fit.offset == doctest::Approx(1.0).epsilon(1e-9));
  // both closed forms stay non-negative even at full contrast
  for (double dl = 0.0; dl < 2e-6; dl += 1.3e-8) {
    CHECK(coincidence_full(kKp, 0.6 + dl, 1.0) >= 0.0);
    CHECK(coincidence_postselected(kKp, 0.6 + dl, 1.0) >= 0.0);
  }
}

TEST_CASE("one-photon envelope dies within the filter coherence length") {
  // 10 nm at 660 nm: coherence length lambda^2/dlambda = 43.56 um
  const double lc = 660e-9 * 660e-9 / 10e-9;
  CHECK(single_photon_visibility(660.0, 10.0, 0.0) == 1.0);
  CHECK(single_photon_visibility(660.0, 10.0, lc) < 1e-9);  // sinc null
  CHECK(single_photon_visibility(660.0, 10.0, 0.6) < 1e-3);
  CHECK(single_photon_visibility(660.0, 10.0, 0.6, FilterShape::Gaussian) < 1e-6);
  CHECK(single_photon_visibility(660.0, 10.0, lc / 10.0) > 0.9);
}

TEST_CASE("weighted fit recovers a noiseless sinusoid exactly") {
  const double period = 380.2;
  std::vector<ScanPoint> scan;
  for (int i = 0; i < 16; ++i) {
    const double x = 600.0 * i / 15.0;
    scan.push_back({x, 1000.0 * (1.0 + 0.83 * std::cos(2.0 * M_PI * x / period + 0.7))});
  }
  const auto fit = fit_visibility(scan, period);
  CHECK(fit.visibility == doctest::Approx(0.83).epsilon(1e-9));
  CHECK(fit.offset == doctest::Approx(1000.0).epsilon(1e-9));
  CHECK(fit.phase_rad == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(fit.period_nm == period);
}

TEST_CASE("fit tolerates Poisson-scale noise and reports a sane error bar") {
  const double period = 380.2;
  Rng rng(123);
  std::vector<ScanPoint> scan;
  for (int i = 0; i < 32; ++i) {
    const double x = 800.0 * i / 31.0;
    const double mean = 2000.0 * (1.0 + 0.83 * std::cos(2.0 * M_PI * x / period));
    scan.push_back({x, std::max(0.0, mean + rng.normal(0.0, std::sqrt(mean)))});
  }
  const auto fit = fit_visibility(scan, period);
  CHECK(fit.visibility == doctest::Approx(0.83).epsilon(0.06));
  CHECK(fit.visibility_stderr > 0.0);
  CHECK(fit.visibility_stderr < 0.05);
  CHECK(std::abs(fit.visibility - 0.83) < 5.0 * fit.visibility_stderr);
}

TEST_CASE("free-period fit finds the true period from a biased guess") {
  const double period = 380.2;
  std::vector<ScanPoint> scan;
  for (int i = 0; i < 40; ++i) {
    const double x = 1200.0 * i / 39.0;
    scan.push_back({x, 500.0 * (1.0 + 0.8 * std::cos(2.0 * M_PI * x / period + 0.4))});
  }
  const auto fit = fit_visibility_free_period(scan, period * 1.25);
  CHECK(fit.period_nm == doctest::Approx(period).epsilon(1e-4));
  CHECK(fit.visibility == doctest::Approx(0.8).epsilon(1e-4));
}

TEST_CASE("fit input validation") {
  std::vector<ScanPoint> tiny{{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}};
  CHECK_THROWS_AS(fit_visibility(tiny, 380.2), std::invalid_argument);  // 7 < 8 points
  std::vector<ScanPoint> narrow;
  for (int i = 0; i < 12; ++i) narrow.push_back({double(i), 1.0});  // span 11 nm
  CHECK_THROWS_AS(fit_visibility(narrow, 380.2), std::invalid_argument);
  std::vector<ScanPoint> negative;
  for (int i = 0; i < 12; ++i) negative.push_back({40.0 * i, i == 5 ? -2.0 : 10.0});
  CHECK_THROWS_AS(fit_visibility(negative, 380.2), std::invalid_argument);
}

TEST_CASE("filter pair validation against the pump") {
  FilteredBiphotonSpectrum spec;  // defaults are the conjugate 660 / 896.83 pair
  CHECK(spec.implied_pump_nm() == doctest::Approx(760.4).epsilon(1e-9));
  CHECK_NOTHROW(spec.validate_against_pump(760.4));
  spec.center_i_nm = 905.0;  // breaks energy conservation
  CHECK_THROWS_AS(spec.validate_against_pump(760.4), std::invalid_argument);
}

TEST_CASE("oracle matches the closed form once the filters average out") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  FilteredBiphotonSpectrum spec;  // 10 nm rectangular filters
  const CoincidenceOracle oracle(geom, spec, 1.0);
  const double k_p = 2.0 * M_PI / (spec.implied_pump_nm() * 1e-9);
  for (int i = 0; i <= 20; ++i) {
    const double dx = 380.2e-9 * i / 20.0;
    const double closed = coincidence_full(k_p, geom.delta_l_m() + dx, 1.0);
    CHECK(std::abs(oracle(dx) - closed) < 1e-3);
  }
}

TEST_CASE("oracle with vanishing filter width reproduces the center-line shape") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  FilteredBiphotonSpectrum spec;
  spec.fwhm_s_nm = 0.0;
  spec.fwhm_i_nm = 0.0;
  const CoincidenceOracle oracle(geom, spec, 0.9);
  const double k_s = 2.0 * M_PI / (spec.center_s_nm * 1e-9);
  const double k_p = 2.0 * M_PI / (spec.implied_pump_nm() * 1e-9);
  for (double dx : {0.0, 1e-7, 3.7e-7}) {
    InterferometerGeometry g = geom;
    g.delta_x_m = dx;
    const auto st = path_amplitudes(g, k_p, k_s, 0.9);
    CHECK(oracle(dx) == doctest::Approx(st.coincidence_shape()).epsilon(1e-9));
  }
}

TEST_CASE("oracle at zero imbalance gives the white-light maximum") {
  const auto geom = InterferometerGeometry::from_delta_l(0.0);
  FilteredBiphotonSpectrum spec;
  const CoincidenceOracle oracle(geom, spec, 1.0);
  CHECK(oracle(0.0) == doctest::Approx(4.0).epsilon(1e-6));  // all four paths in phase
}

TEST_CASE("oracle-vs-closed-form agreement over random long-imbalance geometries") {
  Rng rng(99);
  FilteredBiphotonSpectrum spec;
  for (int trial = 0; trial < 5; ++trial) {
    const double dl = 0.3 + 0.7 * rng.uniform();  // far beyond the 44 um coherence length
    const double mu = rng.uniform();
    const auto geom = InterferometerGeometry::from_delta_l(dl);
    const CoincidenceOracle oracle(geom, spec, mu);
    const double k_p = 2.0 * M_PI / (spec.implied_pump_nm() * 1e-9);
    const double dx = rng.uniform() * 400e-9;
    CHECK(std::abs(oracle(dx) - coincidence_full(k_p, dl + dx, mu)) < 1e-3);
  }
}

TEST_CASE("gaussian-filtered oracle also collapses to the closed form") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  FilteredBiphotonSpectrum spec;
  spec.shape = FilterShape::Gaussian;
  const CoincidenceOracle oracle(geom, spec, 1.0);
  const double k_p = 2.0 * M_PI / (spec.implied_pump_nm() * 1e-9);
  CHECK(std::abs(oracle(1.1e-7) - coincidence_full(k_p, geom.delta_l_m() + 1.1e-7, 1.0)) <
        1e-3);
}

TEST_CASE("unphysical path state requests are rejected") {
  const auto geom = InterferometerGeometry::from_delta_l(0.6);
  CHECK_THROWS_AS(path_amplitudes(geom, kKp, 2.0 * kKp, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(path_amplitudes(geom, kKp, 2.1 * kKp, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(path_amplitudes(geom, kKp, kKp, 1.5), std::invalid_argument);
}

}  // TEST_SUITE
