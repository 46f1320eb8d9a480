// biphoton: command-line front end for the fiber photon-pair toolkit.
//
// Subcommands: zdw, map, decompose, fringe, simulate. Every run writes a
// provenance JSON with the fully resolved configuration next to its outputs,
// so any result can be reproduced from that file alone.
//
// Exit codes: 0 success, 2 input or parse error, 3 numerical failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "biphoton/dispersion.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/gvd.hpp"
#include "biphoton/interferometer.hpp"
#include "biphoton/mcsim.hpp"
#include "biphoton/phasematch.hpp"
#include "biphoton/spectrum.hpp"
#include "biphoton/svg.hpp"
#include "biphoton/units.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ModelArgs {
  std::string gvd_csv;
  bool use_default = false;

  void attach(CLI::App* cmd) {
    auto* g = cmd->add_option("--gvd", gvd_csv, "GVD table CSV (wavelength_nm,D_ps_nm_km)")
                  ->check(CLI::ExistingFile);
    cmd->add_flag("--default-fiber", use_default, "use the built-in fiber dispersion model")
        ->excludes(g);
  }

  biphoton::DispersionModel resolve(json& prov) const {
    if (!gvd_csv.empty()) {
      prov["gvd_source"] = gvd_csv;
      return biphoton::DispersionModel::from_gvd(biphoton::GvdTable::from_csv(gvd_csv));
    }
    prov["gvd_source"] = "default-fiber";
    return biphoton::default_model();
  }
};

void write_provenance(const fs::path& out_dir, const std::string& name, const json& prov) {
  fs::create_directories(out_dir);
  std::ofstream f(out_dir / (name + "_provenance.json"));
  if (!f) throw std::runtime_error("cannot write provenance JSON in " + out_dir.string());
  f << prov.dump(2) << "\n";
}

biphoton::FilterShape parse_shape(const std::string& s) {
  if (s == "rect") return biphoton::FilterShape::Rectangular;
  if (s == "gaussian") return biphoton::FilterShape::Gaussian;
  throw std::invalid_argument("unknown filter shape '" + s + "' (rect|gaussian)");
}

int run(int argc, char** argv) {
  CLI::App app{"fiber photon-pair source and two-photon interference toolkit"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags like --out may follow the subcommand

  std::string out_dir = ".";
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  // ---- zdw ------------------------------------------------------------
  auto* zdw = app.add_subcommand("zdw", "zero-dispersion wavelength of a GVD table");
  ModelArgs zdw_model;
  zdw_model.attach(zdw);
  bool zdw_json = false;
  zdw->add_flag("--json", zdw_json, "print a JSON object instead of a bare number");
  zdw->callback([&] {
    json prov;
    const auto model = zdw_model.resolve(prov);
    const auto roots = biphoton::zero_dispersion_wavelengths(model);
    if (roots.empty())
      throw biphoton::NumericalError("no zero-dispersion wavelength in the tabulated range");
    prov["zdw_nm"] = roots;
    write_provenance(out_dir, "zdw", prov);
    std::cout.precision(10);
    if (zdw_json) {
      json j;
      j["zdw_nm"] = roots;
      std::cout << j.dump() << "\n";
    } else {
      for (double r : roots) std::cout << r << "\n";
    }
  });

  // ---- map ------------------------------------------------------------
  auto* map = app.add_subcommand("map", "pump/signal spectral-density map and solver ridge");
  ModelArgs map_model;
  map_model.attach(map);
  double map_pump_min = 755.0, map_pump_max = 770.0;
  std::size_t map_pump_points = 151;
  double map_sig_min = 600.0, map_sig_max = 990.0;
  std::size_t map_sig_points = 391;
  double map_power_mw = 100.0, map_length_m = 1.93, map_gamma = 102.0;
  double map_domega = 1.0, map_dt = 1.0;
  int map_threads = 1;
  map->add_option("--pump-min-nm", map_pump_min)->capture_default_str();
  map->add_option("--pump-max-nm", map_pump_max)->capture_default_str();
  map->add_option("--pump-points", map_pump_points)->capture_default_str();
  map->add_option("--signal-min-nm", map_sig_min)->capture_default_str();
  map->add_option("--signal-max-nm", map_sig_max)->capture_default_str();
  map->add_option("--signal-points", map_sig_points)->capture_default_str();
  map->add_option("--power-mw", map_power_mw, "pump power")->capture_default_str();
  map->add_option("--length-m", map_length_m, "fiber length")->capture_default_str();
  map->add_option("--gamma-per-w-km", map_gamma, "nonlinear coefficient")->capture_default_str();
  map->add_option("--delta-omega", map_domega, "acceptance bandwidth (rad/s) scaling the density")
      ->capture_default_str();
  map->add_option("--delta-t", map_dt, "counting interval (s) scaling the density")
      ->capture_default_str();
  map->add_option("--threads", map_threads, "worker threads for the map fill")
      ->capture_default_str();
  map->callback([&] {
    json prov;
    const auto model = map_model.resolve(prov);
    biphoton::FwmConfig config;
    config.pump_power_w = map_power_mw * 1e-3;
    config.length_m = map_length_m;
    config.gamma_per_w_km = map_gamma;
    auto grid = biphoton::spectral_map(model, config, map_pump_min, map_pump_max,
                                       map_pump_points, map_sig_min, map_sig_max,
                                       map_sig_points, map_threads);
    for (auto& v : grid.values) v *= map_domega * map_dt;
    fs::create_directories(out_dir);
    grid.to_csv(fs::path(out_dir) / "map.csv");
    biphoton::spectral_map_to_svg(grid, fs::path(out_dir) / "map.svg",
                                  "pair spectral density");
    std::vector<biphoton::LabeledPairPoint> sols;
    for (double lp : grid.lambda_p_axis_nm) {
      biphoton::FwmConfig c = config;
      c.lambda_p_nm = lp;
      for (const auto& p : biphoton::trunk_solutions(model, c))
        sols.push_back({lp, p, biphoton::SolutionKind::Trunk});
      for (const auto& p : biphoton::branch_solutions(model, c))
        sols.push_back({lp, p, biphoton::SolutionKind::Branch});
    }
    biphoton::solutions_to_csv(sols, fs::path(out_dir) / "solutions.csv");
    prov["pump_range_nm"] = {map_pump_min, map_pump_max};
    prov["pump_points"] = map_pump_points;
    prov["signal_range_nm"] = {map_sig_min, map_sig_max};
    prov["signal_points"] = map_sig_points;
    prov["power_w"] = config.pump_power_w;
    prov["length_m"] = config.length_m;
    prov["gamma_per_w_km"] = config.gamma_per_w_km;
    prov["delta_omega_rad_s"] = map_domega;
    prov["delta_t_s"] = map_dt;
    prov["threads"] = map_threads;
    prov["outputs"] = {"map.csv", "map.svg", "solutions.csv"};
    write_provenance(out_dir, "map", prov);
    std::cout << "map: " << map_pump_points << " x " << map_sig_points << " cells, "
              << sols.size() << " solver points -> " << out_dir << "\n";
  });

  // ---- decompose --------------------------------------------------------
  auto* dec = app.add_subcommand("decompose",
                                 "split two same-axis spectra into P and P^2 components");
  std::vector<std::string> dec_inputs;
  dec->add_option("spectra", dec_inputs, "spectrum CSVs at two or more pump powers")
      ->required()
      ->expected(2, -1)
      ->check(CLI::ExistingFile);
  dec->callback([&] {
    json prov;
    std::vector<biphoton::MeasuredSpectrum> spectra;
    for (const auto& p : dec_inputs) spectra.push_back(biphoton::MeasuredSpectrum::from_csv(p));
    const auto result = biphoton::decompose(spectra);
    fs::create_directories(out_dir);
    result.to_csv(fs::path(out_dir) / "decomposition.csv");
    prov["inputs"] = dec_inputs;
    json powers = json::array();
    for (const auto& s : spectra) powers.push_back(s.pump_power_w);
    prov["pump_powers_w"] = powers;
    prov["reference_power_w"] = result.reference_power_w;
    prov["outputs"] = {"decomposition.csv"};
    write_provenance(out_dir, "decompose", prov);
    std::cout << "decomposition at reference power " << result.reference_power_w << " W -> "
              << out_dir << "\n";
  });

  // ---- fringe -----------------------------------------------------------
  auto* fr = app.add_subcommand("fringe", "analytic two-photon fringe scan");
  double fr_pump_nm = 760.4, fr_delta_l_cm = 60.0, fr_mu = 1.0;
  std::string fr_mode = "full";
  double fr_scan_start = 0.0, fr_scan_end = 800.0;
  std::size_t fr_points = 81;
  double fr_center_s = 660.0, fr_fwhm = 10.0;
  std::string fr_shape = "rect";
  fr->add_option("--pump-nm", fr_pump_nm)->capture_default_str();
  fr->add_option("--delta-l-cm", fr_delta_l_cm, "arm imbalance")->capture_default_str();
  fr->add_option("--mu", fr_mu, "interference contrast in [0,1]")->capture_default_str();
  fr->add_option("--mode", fr_mode, "full | postselected | oracle")->capture_default_str();
  fr->add_option("--scan-start-nm", fr_scan_start)->capture_default_str();
  fr->add_option("--scan-end-nm", fr_scan_end)->capture_default_str();
  fr->add_option("--points", fr_points)->capture_default_str();
  fr->add_option("--center-s-nm", fr_center_s, "signal filter center (oracle mode)")
      ->capture_default_str();
  fr->add_option("--fwhm-nm", fr_fwhm, "filter FWHM (oracle mode)")->capture_default_str();
  fr->add_option("--shape", fr_shape, "filter shape, rect | gaussian (oracle mode)")
      ->capture_default_str();
  fr->callback([&] {
    if (fr_points < 2) throw std::invalid_argument("fringe: need at least 2 scan points");
    const double k_p = 2.0 * std::numbers::pi / (fr_pump_nm * 1e-9);
    const auto geom = biphoton::InterferometerGeometry::from_delta_l(fr_delta_l_cm * 1e-2);
    std::vector<biphoton::ScanPoint> scan(fr_points);
    const double step = (fr_scan_end - fr_scan_start) / double(fr_points - 1);
    if (fr_mode == "full" || fr_mode == "postselected") {
      for (std::size_t i = 0; i < fr_points; ++i) {
        const double dx_nm = fr_scan_start + double(i) * step;
        const double dl = geom.delta_l_m() + dx_nm * 1e-9;
        scan[i] = {dx_nm, fr_mode == "full"
                              ? biphoton::coincidence_full(k_p, dl, fr_mu)
                              : biphoton::coincidence_postselected(k_p, dl, fr_mu)};
      }
    } else if (fr_mode == "oracle") {
      biphoton::FilteredBiphotonSpectrum spec;
      spec.center_s_nm = fr_center_s;
      spec.center_i_nm = biphoton::conjugate_wavelength_nm(fr_pump_nm, fr_center_s);
      spec.fwhm_s_nm = fr_fwhm;
      spec.fwhm_i_nm = fr_fwhm;
      spec.shape = parse_shape(fr_shape);
      biphoton::CoincidenceOracle oracle(geom, spec, fr_mu);
      for (std::size_t i = 0; i < fr_points; ++i) {
        const double dx_nm = fr_scan_start + double(i) * step;
        scan[i] = {dx_nm, oracle(dx_nm * 1e-9)};
      }
    } else {
      throw std::invalid_argument("fringe: unknown mode '" + fr_mode +
                                  "' (full|postselected|oracle)");
    }
    fs::create_directories(out_dir);
    biphoton::scan_to_csv(scan, fs::path(out_dir) / "fringe.csv");
    json prov;
    prov["pump_nm"] = fr_pump_nm;
    prov["delta_l_cm"] = fr_delta_l_cm;
    prov["mu"] = fr_mu;
    prov["mode"] = fr_mode;
    prov["scan_nm"] = {fr_scan_start, fr_scan_end};
    prov["points"] = fr_points;
    if (fr_mode == "oracle") {
      prov["filter_center_s_nm"] = fr_center_s;
      prov["filter_fwhm_nm"] = fr_fwhm;
      prov["filter_shape"] = fr_shape;
    }
    prov["outputs"] = {"fringe.csv"};
    write_provenance(out_dir, "fringe", prov);
    std::cout << "fringe (" << fr_mode << "): " << fr_points << " points -> " << out_dir
              << "\n";
  });

  // ---- simulate -----------------------------------------------------------
  auto* sim = app.add_subcommand("simulate", "Monte Carlo coincidence fringe scan");
  std::string sim_params_json;
  double sim_pump_nm = 760.4, sim_delta_l_cm = 60.0, sim_mu = 0.83;
  double sim_power_mw = 4.0;
  double sim_pair_rate = 2.0e4, sim_eta_s = 0.32, sim_eta_i = 0.33;
  double sim_dark_hz = 0.0, sim_background_hz = 0.0;
  double sim_gate_ns = 6.0, sim_tac_bin_ns = 0.1;
  double sim_duration_s = 1.0;
  std::size_t sim_points = 24;
  double sim_span_periods = 2.0;
  std::uint64_t sim_seed = 1;
  sim->add_option("--params", sim_params_json,
                  "JSON file overriding source parameters (keys as in provenance)")
      ->check(CLI::ExistingFile);
  sim->add_option("--pump-nm", sim_pump_nm)->capture_default_str();
  sim->add_option("--delta-l-cm", sim_delta_l_cm)->capture_default_str();
  sim->add_option("--mu", sim_mu)->capture_default_str();
  sim->add_option("--power-mw", sim_power_mw, "pump power (recorded; rate is --pair-rate-hz)")
      ->capture_default_str();
  sim->add_option("--pair-rate-hz", sim_pair_rate)->capture_default_str();
  sim->add_option("--eta-s", sim_eta_s)->capture_default_str();
  sim->add_option("--eta-i", sim_eta_i)->capture_default_str();
  sim->add_option("--dark-hz", sim_dark_hz, "dark counts per detector")->capture_default_str();
  sim->add_option("--background-hz", sim_background_hz, "broadband background per detector")
      ->capture_default_str();
  sim->add_option("--gate-ns", sim_gate_ns)->capture_default_str();
  sim->add_option("--tac-bin-ns", sim_tac_bin_ns)->capture_default_str();
  sim->add_option("--duration-s", sim_duration_s, "acquisition per scan point")
      ->capture_default_str();
  sim->add_option("--points", sim_points)->capture_default_str();
  sim->add_option("--span-periods", sim_span_periods, "scan range in biphoton fringe periods")
      ->capture_default_str();
  sim->add_option("--seed", sim_seed)->capture_default_str();
  sim->callback([&] {
    biphoton::SourceParams params;
    params.pair_rate_hz = sim_pair_rate;
    params.eta_s = sim_eta_s;
    params.eta_i = sim_eta_i;
    params.dark_s_hz = params.dark_i_hz = sim_dark_hz;
    params.background_s_hz = params.background_i_hz = sim_background_hz;
    params.mu = sim_mu;
    params.tau_s = sim_delta_l_cm * 1e-2 / biphoton::kSpeedOfLight;
    if (!sim_params_json.empty()) {
      std::ifstream f(sim_params_json);
      json j = json::parse(f);
      params.pair_rate_hz = j.value("pair_rate_hz", params.pair_rate_hz);
      params.eta_s = j.value("eta_s", params.eta_s);
      params.eta_i = j.value("eta_i", params.eta_i);
      params.dark_s_hz = j.value("dark_s_hz", params.dark_s_hz);
      params.dark_i_hz = j.value("dark_i_hz", params.dark_i_hz);
      params.background_s_hz = j.value("background_s_hz", params.background_s_hz);
      params.background_i_hz = j.value("background_i_hz", params.background_i_hz);
      params.mu = j.value("mu", params.mu);
      params.tau_s = j.value("tau_s", params.tau_s);
      params.jitter_sigma_s = j.value("jitter_sigma_s", params.jitter_sigma_s);
    }
    biphoton::GateConfig gate;
    gate.window_s = sim_gate_ns * 1e-9;
    gate.tac_bin_s = sim_tac_bin_ns * 1e-9;
    if (sim_points < 8) throw std::invalid_argument("simulate: need at least 8 scan points");
    const double period_nm = sim_pump_nm * 0.5;  // biphoton fringe period
    std::vector<double> dxs(sim_points);
    const double span_nm = sim_span_periods * sim_pump_nm * 0.5;
    for (std::size_t i = 0; i < sim_points; ++i)
      dxs[i] = span_nm * double(i) / double(sim_points - 1);
    const auto scan = biphoton::scan_fringe(params, gate, sim_pump_nm, dxs, sim_duration_s,
                                            sim_seed);
    fs::create_directories(out_dir);
    scan.to_csv(fs::path(out_dir) / "scan.csv");
    // summed TAC across the scan: phase-averaged three-peak structure
    biphoton::TacHistogram tac = scan.tac.front();
    for (std::size_t i = 1; i < scan.tac.size(); ++i)
      for (std::size_t b = 0; b < tac.counts.size(); ++b)
        tac.counts[b] += scan.tac[i].counts[b];
    tac.to_csv(fs::path(out_dir) / "tac.csv");
    const auto pts = scan.to_scan_points();
    const auto fit = biphoton::fit_visibility(pts, sim_pump_nm * 0.5);
    fit.to_json_file(fs::path(out_dir) / "fit.json");
    json prov;
    prov["pump_nm"] = sim_pump_nm;
    prov["power_mw"] = sim_power_mw;
    prov["delta_l_cm"] = sim_delta_l_cm;
    prov["tau_s"] = params.tau_s;
    prov["mu"] = params.mu;
    prov["pair_rate_hz"] = params.pair_rate_hz;
    prov["eta_s"] = params.eta_s;
    prov["eta_i"] = params.eta_i;
    prov["dark_s_hz"] = params.dark_s_hz;
    prov["dark_i_hz"] = params.dark_i_hz;
    prov["background_s_hz"] = params.background_s_hz;
    prov["background_i_hz"] = params.background_i_hz;
    prov["jitter_sigma_s"] = params.jitter_sigma_s;
    prov["gate_ns"] = sim_gate_ns;
    prov["tac_bin_ns"] = sim_tac_bin_ns;
    prov["duration_per_point_s"] = sim_duration_s;
    prov["points"] = sim_points;
    prov["span_periods"] = sim_span_periods;
    prov["fit_period_nm"] = period_nm;
    prov["seed"] = sim_seed;
    const double throughput = 0.5;  // filters plus fiber-to-detector optics per arm pair
    json rate;
    rate["assumed_source_rate_hz"] = params.pair_rate_hz;
    rate["assumed_pair_throughput"] = throughput;
    rate["eta_s"] = params.eta_s;
    rate["eta_i"] = params.eta_i;
    rate["detected_rate_hz"] = biphoton::detected_rate_estimate(params.pair_rate_hz,
                                                                throughput, params.eta_s,
                                                                params.eta_i);
    prov["rate_estimate"] = rate;
    prov["outputs"] = {"scan.csv", "tac.csv", "fit.json"};
    write_provenance(out_dir, "simulate", prov);
    std::cout << "simulate: " << sim_points << " points, V = " << fit.visibility << " +- "
              << fit.visibility_stderr << " -> " << out_dir << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const biphoton::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const biphoton::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
