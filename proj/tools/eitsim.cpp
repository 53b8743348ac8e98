// eitsim: command-line driver for the EIT protection simulations.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eit/budget.hpp"
#include "eit/csv.hpp"
#include "eit/dressed.hpp"
#include "eit/errors.hpp"
#include "eit/experiments.hpp"
#include "eit/parallel.hpp"
#include "eit/scheme_io.hpp"
#include "eit/units.hpp"
#include "grid.hpp"

using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Result {
  json config;
  std::string csv;  // empty: nothing to write
  std::string summary;
  bool csv_on_stdout = true;
};

struct Common {
  std::string scheme;
  std::string output;
  unsigned threads = eit::default_thread_count();
  std::optional<double> protection_intensity;
  std::optional<double> detuning_mhz;
  std::optional<double> field_g;
};

void add_common(CLI::App* sub, Common& c, const std::string& default_scheme) {
  c.scheme = default_scheme;
  sub->add_option("-o,--output", c.output, "CSV output path (default: standard output)");
  sub->add_option("--threads", c.threads, "worker threads (default: EIT_THREADS or all cores)")
      ->check(CLI::PositiveNumber);
}

void add_scheme_options(CLI::App* sub, Common& c) {
  sub->add_option("--scheme", c.scheme, "preset name or scheme file")->capture_default_str();
  sub->add_option("--protection-intensity", c.protection_intensity, "W/cm^2");
  sub->add_option("--detuning-MHz", c.detuning_mhz, "detection detuning");
  sub->add_option("--field-G", c.field_g, "magnetic field in gauss");
}

eit::SchemeConfig scheme_of(const Common& c) {
  auto cfg = eit::resolve_scheme(c.scheme);
  if (c.protection_intensity) cfg.protection.intensity = *c.protection_intensity;
  if (c.detuning_mhz) cfg.detection.detuning = eit::units::mhz_to_angular(*c.detuning_mhz);
  if (c.field_g) cfg.magnetic_field = *c.field_g * eit::units::kGauss;
  cfg.validate();
  return cfg;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Suppression-run knobs shared by suppress, toy and scheme3.
struct Timing {
  double duration = 3e-6;
  double sample = 2e-9;
  double settle = 500e-9;
  std::string method = "propagator";
};

void add_timing(CLI::App* sub, Timing& t) {
  sub->add_option("--duration", t.duration, "evolution time [s]")->capture_default_str();
  sub->add_option("--sample", t.sample, "sample interval [s]")->capture_default_str();
  sub->add_option("--settle", t.settle, "settle window [s]")->capture_default_str();
  sub->add_option("--method", t.method, "propagator or rk")
      ->check(CLI::IsMember({"propagator", "rk"}))
      ->capture_default_str();
}

eit::SuppressionOptions options_of(const Timing& t) {
  eit::SuppressionOptions o;
  o.duration = t.duration;
  o.sample_every = t.sample;
  o.settle_window = t.settle;
  o.evolve.method = t.method == "rk" ? eit::EvolveMethod::AdaptiveRK : eit::EvolveMethod::Propagator;
  return o;
}

json timing_json(const Timing& t) {
  return {{"duration_s", t.duration}, {"sample_s", t.sample}, {"settle_s", t.settle},
          {"method", t.method}};
}

json grid_json(const std::vector<double>& v) { return json(v); }

// Least-squares slope of log R against log I over [lo, hi].
std::optional<double> loglog_slope(const std::vector<eit::SuppressionPoint>& pts, double lo,
                                   double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : pts) {
    if (p.intensity < lo || p.intensity > hi || !(p.result.r > 0.0)) continue;
    const double x = std::log(p.intensity), y = std::log(p.result.r);
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  if (n < 2) return std::nullopt;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Result suppression_result(const std::string& experiment, const eit::SchemeConfig& cfg,
                          const std::vector<double>& grid, const Timing& t, unsigned threads,
                          const std::optional<std::string>& target) {
  std::optional<eit::StateLabel> tgt;
  if (target) tgt = eit::StateLabel::parse(*target);
  const auto pts = eit::suppression_curve(cfg, grid, options_of(t), threads, tgt);
  Result r;
  r.config = {{"experiment", experiment}, {"scheme", eit::scheme_to_json(cfg)},
              {"intensities_W_cm2", grid_json(grid)}, {"timing", timing_json(t)}};
  if (target) r.config["target"] = *target;
  std::ostringstream out;
  eit::CsvWriter csv(out, r.config,
                     {"intensity_W_cm2", "R", "R_final", "protected_rate", "protected_rate_final",
                      "protected_upper_rate", "detected_rate"});
  for (const auto& p : pts) {
    csv.row({p.intensity, p.result.r, p.result.r_final, p.result.protected_rate,
             p.result.protected_rate_final, p.result.protected_upper_rate,
             p.result.detected_rate});
  }
  r.csv = out.str();
  std::ostringstream s;
  const auto best = std::min_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.result.r < b.result.r;
  });
  s << "min R: " << fmt("%.4e", best->result.r) << " at " << fmt("%.4g", best->intensity)
    << " W/cm2";
  bool any_saturated = false;
  for (const auto& p : pts) any_saturated |= p.intensity >= 1e3;
  if (any_saturated) s << "; saturated R: " << fmt("%.4e", eit::saturated_r(pts));
  if (const auto slope = loglog_slope(pts, 10.0, 1e3)) {
    s << "; slope 10-1e3 W/cm2: " << fmt("%.4f", *slope);
  }
  r.summary = s.str();
  return r;
}

// Turns {"experiment": "x", "key": value, ...} into an argument list.
std::vector<std::string> args_from_json(const json& j) {
  if (!j.is_object() || !j.contains("experiment") || !j["experiment"].is_string()) {
    throw eit::ConfigError("run config needs a string \"experiment\" entry");
  }
  std::vector<std::string> args{j["experiment"].get<std::string>()};
  if (args[0] == "run") throw eit::ConfigError("run configs cannot nest");
  for (const auto& [key, value] : j.items()) {
    if (key == "experiment") continue;
    const std::string flag = (key.size() == 1 ? "-" : "--") + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) {
        if (!joined.empty()) joined += ',';
        joined += v.is_string() ? v.get<std::string>() : v.dump();
      }
      args.push_back(flag);
      args.push_back(joined);
    } else {
      throw eit::ConfigError("run config entry '" + key + "' has an unsupported type");
    }
  }
  return args;
}

int dispatch(std::vector<std::string> args, bool allow_run);

void emit(const Result& r, const std::string& output) {
  if (output.empty()) {
    if (!r.csv_on_stdout) {
      std::cout << r.summary << '\n';
      return;
    }
    std::cout << r.csv;
    if (!r.summary.empty()) std::cerr << r.summary << '\n';
    return;
  }
  if (!r.csv.empty()) {
    std::ofstream f(output, std::ios::binary);
    if (!f) throw eit::ConfigError("cannot write output file '" + output + "'");
    f << r.csv;
  }
  if (!r.summary.empty()) std::cout << r.summary << '\n';
}

int run_app(std::vector<std::string> args, bool allow_run) {
  CLI::App app{"EIT protection simulations for cesium atom arrays", "eitsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "eitsim 1.0");
  std::optional<Result> result;
  std::string output;

  // dressed-map
  Common dm;
  std::string dm_det = "-300:300:121", dm_int = "1e-1:1e4:61log";
  std::optional<std::string> dm_target;
  auto* dressed = app.add_subcommand("dressed-map", "non-ground population of a dressed state");
  add_common(dressed, dm, "scheme1");
  add_scheme_options(dressed, dm);
  dressed->add_option("--detunings", dm_det, "detection detuning grid [MHz]")->capture_default_str();
  dressed->add_option("--intensities", dm_int, "protection intensity grid [W/cm^2]")
      ->capture_default_str();
  dressed->add_option("--target", dm_target, "state (default: first protected state)");
  dressed->callback([&] {
    const auto cfg = scheme_of(dm);
    const auto det_mhz = eitsim::parse_grid(dm_det);
    std::vector<double> det;
    for (double d : det_mhz) det.push_back(eit::units::mhz_to_angular(d));
    const auto inten = eitsim::parse_grid(dm_int);
    const auto target = dm_target ? eit::StateLabel::parse(*dm_target) : cfg.protected_states.at(0);
    const auto map = eit::protection_map(cfg, det, inten, target, dm.threads);
    Result r;
    r.config = {{"experiment", "dressed-map"}, {"scheme", eit::scheme_to_json(cfg)},
                {"detunings_MHz", grid_json(det_mhz)}, {"intensities_W_cm2", grid_json(inten)},
                {"target", target.to_string()}};
    std::ostringstream out;
    eit::CsvWriter csv(out, r.config, {"detuning_Hz", "intensity_W_cm2", "nonground_population"});
    for (std::size_t i = 0; i < inten.size(); ++i) {
      for (std::size_t j = 0; j < det.size(); ++j) {
        csv.row({det_mhz[j] * 1e6, inten[i],
                 map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
      }
    }
    r.csv = out.str();
    r.summary = "max non-ground population: " + fmt("%.4e", map.values.maxCoeff());
    result = std::move(r);
    output = dm.output;
  });

  // suppress
  Common sp;
  Timing sp_t;
  std::string sp_int = "1e-1:1e4:40log";
  std::optional<std::string> sp_target;
  auto* suppress = app.add_subcommand("suppress", "suppression factor R vs protection intensity");
  add_common(suppress, sp, "scheme1");
  add_scheme_options(suppress, sp);
  add_timing(suppress, sp_t);
  suppress->add_option("--intensities", sp_int, "protection intensity grid [W/cm^2]")
      ->capture_default_str();
  suppress->add_option("--target", sp_target, "protected state (default: first protected)");
  suppress->callback([&] {
    const auto cfg = scheme_of(sp);
    result = suppression_result("suppress", cfg, eitsim::parse_grid(sp_int), sp_t, sp.threads,
                                sp_target);
    output = sp.output;
  });

  // toy
  Common ty;
  Timing ty_t;
  int ty_levels = 3;
  std::string ty_int = "1e-1:1e4:40log";
  auto* toy = app.add_subcommand("toy", "truncated-basis ladder models (3 to 6 levels)");
  add_common(toy, ty, "toy3");
  add_timing(toy, ty_t);
  toy->add_option("--levels", ty_levels, "3, 4, 5 or 6")->capture_default_str();
  toy->add_option("--intensities", ty_int, "protection intensity grid [W/cm^2]")
      ->capture_default_str();
  toy->callback([&] {
    eit::SchemeConfig cfg = [&] {
      try {
        return eit::toy_model(ty_levels);
      } catch (const std::domain_error& e) {
        throw eit::ConfigError(e.what());
      }
    }();
    result = suppression_result("toy", cfg, eitsim::parse_grid(ty_int), ty_t, ty.threads,
                                std::nullopt);
    output = ty.output;
  });

  // trace
  Common tr;
  double tr_duration = 3e-6, tr_sample = 2e-9;
  std::optional<std::string> tr_state;
  auto* trace = app.add_subcommand("trace", "scattering-rate and population time series");
  add_common(trace, tr, "scheme1");
  add_scheme_options(trace, tr);
  trace->add_option("--state", tr_state, "initial state (default: first protected state)");
  trace->add_option("--duration", tr_duration, "[s]")->capture_default_str();
  trace->add_option("--sample", tr_sample, "[s]")->capture_default_str();
  trace->callback([&] {
    const auto cfg = scheme_of(tr);
    const auto s0 = tr_state ? eit::StateLabel::parse(*tr_state) : cfg.protected_states.at(0);
    const auto t = eit::evolve(eit::DensityMatrix::pure(cfg.registry, s0),
                               eit::build_rwa_hamiltonian(cfg),
                               eit::collapse_operators(cfg.registry), tr_duration, tr_sample);
    Result r;
    r.config = {{"experiment", "trace"}, {"scheme", eit::scheme_to_json(cfg)},
                {"state", s0.to_string()}, {"duration_s", tr_duration}, {"sample_s", tr_sample}};
    std::vector<std::string> cols{"time_s", "detection_rate", "upper_rate"};
    std::vector<eit::StateLabel> shown{s0};
    for (const auto& w : cfg.watch_states) {
      if (w != s0) shown.push_back(w);
    }
    for (const auto& w : shown) cols.push_back("P[" + w.to_string() + "]");
    std::ostringstream out;
    eit::CsvWriter csv(out, r.config, cols);
    for (std::size_t k = 0; k < t.times.size(); ++k) {
      std::vector<eit::CsvCell> row{t.times[k], t.rates[k], t.upper_rates[k]};
      for (const auto& w : shown) {
        row.emplace_back(t.populations(static_cast<Eigen::Index>(k),
                                       static_cast<Eigen::Index>(cfg.registry.index(w))));
      }
      csv.row(row);
    }
    r.csv = out.str();
    r.summary = "detection photons: " + fmt("%.6e", t.photons());
    result = std::move(r);
    output = tr.output;
  });

  // budget
  std::string bg_out;
  eit::budget::BudgetInput bin;
  std::optional<double> bg_error, bg_shells;
  auto* budget = app.add_subcommand("budget", "rescattering error budget and array size");
  budget->add_option("-o,--output", bg_out, "per-shell CSV output path");
  budget->add_option("--dim", bin.dimensionality, "2 or 3")->capture_default_str();
  budget->add_option("--spacing", bin.lattice_spacing, "lattice spacing [m]")->capture_default_str();
  budget->add_option("--wavelength", bin.wavelength, "[m]")->capture_default_str();
  budget->add_option("--photons", bin.photons, "photons per detection")->capture_default_str();
  budget->add_option("--suppression", bin.suppression, "R")->capture_default_str();
  budget->add_option("--error", bg_error, "error target (gives the maximum array)");
  budget->add_option("--shells", bg_shells, "shell count (gives the total error)");
  budget->callback([&] {
    bin.error_target = bg_error;
    bin.n_shells = bg_shells;
    const auto res = bg_error ? eit::budget::max_array(bin) : eit::budget::total_error(bin);
    Result r;
    r.config = {{"experiment", "budget"}, {"dim", bin.dimensionality},
                {"spacing_m", bin.lattice_spacing}, {"wavelength_m", bin.wavelength},
                {"photons", bin.photons}, {"suppression", bin.suppression}};
    if (bg_error) r.config["error"] = *bg_error;
    if (bg_shells) r.config["shells"] = *bg_shells;
    if (!res.per_shell_errors.empty()) {
      std::ostringstream out;
      eit::CsvWriter csv(out, r.config, {"shell", "shell_error", "cumulative_error"});
      double cum = 0.0;
      for (std::size_t i = 0; i < res.per_shell_errors.size(); ++i) {
        cum += res.per_shell_errors[i];
        csv.row({static_cast<long long>(i + 1), res.per_shell_errors[i], cum});
      }
      r.csv = out.str();
    }
    r.csv_on_stdout = false;
    std::ostringstream s;
    s << "atoms: "
      << (res.atoms == std::numeric_limits<long long>::max() ? std::string("> 9.2e18")
                                                             : std::to_string(res.atoms)) << "\nshells: " << fmt("%.6f", res.n_shells)
      << "\nerror: " << fmt("%.6e", res.total_error);
    r.summary = s.str();
    result = std::move(r);
    output = bg_out;
  });

  // imaging-loop
  Common il;
  eit::ImagingLoopConfig loop;
  loop.sample_every = 10e-9;
  auto* imaging = app.add_subcommand("imaging-loop", "open-transition imaging with swap pulses");
  add_common(imaging, il, "scheme2");
  add_scheme_options(imaging, il);
  imaging->add_option("--tau", loop.tau, "imaging interval [s] (0: 10 photons)")
      ->capture_default_str();
  imaging->add_option("--inner", loop.inner_repeats, "|4,3>-|3,3> swap repeats")
      ->capture_default_str();
  imaging->add_option("--outer", loop.outer_cycles, "outer cycles")->capture_default_str();
  imaging->add_option("--fidelity", loop.pulse_fidelity, "swap pulse fidelity")
      ->capture_default_str();
  imaging->add_option("--sample", loop.sample_every, "[s]")->capture_default_str();
  imaging->callback([&] {
    const auto cfg = scheme_of(il);
    const auto rep = eit::imaging_loop(cfg, loop);
    Result r;
    r.config = {{"experiment", "imaging-loop"}, {"scheme", eit::scheme_to_json(cfg)},
                {"tau_s", rep.tau}, {"inner", loop.inner_repeats}, {"outer", loop.outer_cycles},
                {"fidelity", loop.pulse_fidelity}, {"sample_s", loop.sample_every}};
    std::ostringstream out;
    eit::CsvWriter csv(out, r.config,
                       {"cycle", "photons", "P33", "P43", "P44", "leaked", "trace",
                        "pumped_fraction"});
    for (const auto& c : rep.cycles) {
      csv.row({static_cast<long long>(c.cycle), c.photons, c.p33, c.p43, c.p44, c.leaked, c.trace,
               c.pumped_fraction});
    }
    r.csv = out.str();
    r.summary = "pumped fraction: " + fmt("%.6f", rep.cycles.back().pumped_fraction) +
                "; photons: " + fmt("%.4f", rep.total_photons);
    result = std::move(r);
    output = il.output;
  });

  // sweep-pol / sweep-field
  struct SweepArgs {
    Common common;
    std::string beam = "protection";
    int wrong_q = 0;
    std::string error_state = "6S1/2:3:2";
    eit::SweepOptions opts;
  };
  SweepArgs spol, sfld;
  std::string pol_fractions = "0,1e-5,3e-5,1e-4,3e-4,1e-3";
  double fld_fraction = 5e-4;
  std::string fld_fields = "0:2:9";
  auto add_sweep = [](CLI::App* sub, SweepArgs& a) {
    add_common(sub, a.common, "scheme2");
    add_scheme_options(sub, a.common);
    sub->add_option("--beam", a.beam, "protection or detection")
        ->check(CLI::IsMember({"protection", "detection"}))
        ->capture_default_str();
    sub->add_option("--wrong-q", a.wrong_q, "spherical component receiving the power")
        ->check(CLI::Range(-1, 1))
        ->capture_default_str();
    sub->add_option("--error-state", a.error_state, "state counted as error")->capture_default_str();
    sub->add_option("--photons", a.opts.photons, "photons per detection")->capture_default_str();
    sub->add_option("--duration", a.opts.duration, "[s]")->capture_default_str();
    sub->add_option("--sample", a.opts.sample_every, "[s]")->capture_default_str();
  };
  auto sweep_csv = [](const eit::SweepResult& sw, const json& config, const std::string& x_col,
                      double x_scale) {
    std::ostringstream out;
    eit::CsvWriter csv(out, config,
                       {x_col, "error_per_detection", "transferred", "photons_scattered",
                        "unprotected_population"});
    for (const auto& p : sw.points) {
      csv.row({p.x * x_scale, p.error_per_detection, p.transferred, p.photons_scattered,
               p.unprotected_population});
    }
    return out.str();
  };
  auto sweep_config = [](const std::string& name, const eit::SchemeConfig& cfg,
                         const SweepArgs& a) {
    return json{{"experiment", name}, {"scheme", eit::scheme_to_json(cfg)}, {"beam", a.beam},
                {"wrong_q", a.wrong_q}, {"error_state", a.error_state},
                {"photons", a.opts.photons}, {"duration_s", a.opts.duration},
                {"sample_s", a.opts.sample_every}};
  };
  auto* sweep_pol = app.add_subcommand("sweep-pol", "error vs wrong-polarization fraction");
  add_sweep(sweep_pol, spol);
  sweep_pol->add_option("--fractions", pol_fractions, "fraction grid")->capture_default_str();
  sweep_pol->callback([&] {
    const auto cfg = scheme_of(spol.common);
    const auto fr = eitsim::parse_grid(pol_fractions);
    const auto beam = spol.beam == "protection" ? eit::ImpureBeam::Protection
                                                : eit::ImpureBeam::Detection;
    const auto sw = eit::polarization_sweep(cfg, beam, spol.wrong_q, fr, cfg.magnetic_field,
                                            eit::StateLabel::parse(spol.error_state), spol.opts,
                                            spol.common.threads);
    Result r;
    r.config = sweep_config("sweep-pol", cfg, spol);
    r.config["fractions"] = fr;
    r.csv = sweep_csv(sw, r.config, "wrong_fraction", 1.0);
    double worst = 0.0;
    for (const auto& p : sw.points) worst = std::max(worst, p.error_per_detection);
    r.summary = "max error per detection: " + fmt("%.4e", worst);
    result = std::move(r);
    output = spol.common.output;
  });
  auto* sweep_field = app.add_subcommand("sweep-field", "error vs magnetic field");
  add_sweep(sweep_field, sfld);
  sweep_field->add_option("--fraction", fld_fraction, "wrong-polarization fraction")
      ->capture_default_str();
  sweep_field->add_option("--fields-G", fld_fields, "field grid [G]")->capture_default_str();
  sweep_field->callback([&] {
    const auto cfg = scheme_of(sfld.common);
    const auto fields_g = eitsim::parse_grid(fld_fields);
    std::vector<double> fields;
    for (double g : fields_g) fields.push_back(g * eit::units::kGauss);
    const auto beam = sfld.beam == "protection" ? eit::ImpureBeam::Protection
                                                : eit::ImpureBeam::Detection;
    const auto sw = eit::field_sweep(cfg, beam, sfld.wrong_q, fld_fraction, fields,
                                     eit::StateLabel::parse(sfld.error_state), sfld.opts,
                                     sfld.common.threads);
    Result r;
    r.config = sweep_config("sweep-field", cfg, sfld);
    r.config["fraction"] = fld_fraction;
    r.config["fields_G"] = fields_g;
    r.csv = sweep_csv(sw, r.config, "magnetic_field_G", 1.0 / eit::units::kGauss);
    r.summary = "error at largest field: " + fmt("%.4e", sw.points.back().error_per_detection);
    result = std::move(r);
    output = sfld.common.output;
  });

  // scheme3
  std::string s3_out, s3_int = "1:1e4:13log";
  unsigned s3_threads = eit::default_thread_count();
  Timing s3_t;
  eit::Scheme3Options s3;
  auto* sch3 = app.add_subcommand("scheme3", "forbidden-transition scheme: R and leakage");
  sch3->add_option("-o,--output", s3_out, "CSV output path");
  sch3->add_option("--threads", s3_threads, "worker threads")->check(CLI::PositiveNumber);
  add_timing(sch3, s3_t);
  sch3->add_option("--intensities", s3_int, "protection intensity grid")->capture_default_str();
  sch3->add_option("--tau", s3.tau, "imaging interval [s] (0: 10 photons)")->capture_default_str();
  sch3->add_option("--sigma-share", s3.sigma_plus_share, "sigma+ power share of the probe mix")
      ->capture_default_str();
  sch3->add_option("--photons", s3.photons, "photons per detection")->capture_default_str();
  sch3->callback([&] {
    s3.suppression = options_of(s3_t);
    const auto grid = eitsim::parse_grid(s3_int);
    const auto pts = eit::scheme3_analysis(grid, s3, s3_threads);
    Result r;
    r.config = {{"experiment", "scheme3"}, {"scheme", eit::scheme_to_json(eit::scheme3())},
                {"intensities_W_cm2", grid}, {"timing", timing_json(s3_t)}, {"tau_s", s3.tau},
                {"sigma_plus_share", s3.sigma_plus_share}, {"photons", s3.photons}};
    std::ostringstream out;
    eit::CsvWriter csv(out, r.config,
                       {"intensity_W_cm2", "R_pi", "R_sigma", "leakage_error", "leaked",
                        "photons"});
    double best = INFINITY;
    for (const auto& p : pts) {
      csv.row({p.intensity, p.r_pi, p.r_sigma, p.leakage_error, p.leaked, p.photons});
      if (p.intensity >= 1e3) best = std::min(best, p.r_pi);
    }
    r.csv = out.str();
    if (std::isfinite(best)) r.summary = "saturated R_pi: " + fmt("%.4e", best);
    result = std::move(r);
    output = s3_out;
  });

  // mapping-check
  std::string mc_out, mc_pops = "1,0";
  auto* mapping = app.add_subcommand("mapping-check", "ideal swap bookkeeping for the readout map");
  mapping->add_option("-o,--output", mc_out, "CSV output path");
  mapping->add_option("--populations", mc_pops, "P(|3,0>),P(|4,0>)")->capture_default_str();
  mapping->callback([&] {
    const auto v = eitsim::parse_grid(mc_pops);
    if (v.size() != 2) throw eit::ConfigError("--populations needs two values");
    eit::MappingReport rep;
    try {
      rep = eit::mapping_sequence_check({v[0], v[1]});
    } catch (const std::domain_error& e) {
      throw eit::ConfigError(e.what());
    }
    Result r;
    r.config = {{"experiment", "mapping-check"}, {"populations", v}};
    std::ostringstream out;
    eit::CsvWriter csv(out, r.config, {"stage", "state", "population"});
    for (const auto& st : rep.stages) {
      for (const auto& [s, p] : st.populations) csv.row({st.name, s.to_string(), p});
    }
    r.csv = out.str();
    r.summary = "round trip (P30, P40): " + fmt("%.6f", rep.round_trip[0]) + ", " +
                fmt("%.6f", rep.round_trip[1]) +
                (rep.stayed_in_protected_set ? "" : "; left the protected set");
    result = std::move(r);
    output = mc_out;
  });

  // run
  std::string run_config;
  auto* run = app.add_subcommand("run", "run an experiment described by a JSON file");
  run->add_option("--config", run_config, "JSON run configuration")->required();
  int nested_status = 0;
  run->callback([&] {
    if (!allow_run) throw eit::ConfigError("run configs cannot nest");
    std::ifstream in(run_config);
    if (!in) throw eit::ConfigError("cannot open run config '" + run_config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw eit::ConfigError("run config: " + std::string(e.what()));
    }
    // Relative scheme paths are taken relative to the run config.
    if (j.contains("scheme") && j["scheme"].is_string()) {
      std::filesystem::path p = j["scheme"].get<std::string>();
      const auto presets = eit::preset_names();
      if (std::find(presets.begin(), presets.end(), p.string()) == presets.end() &&
          p.is_relative()) {
        j["scheme"] = (std::filesystem::path(run_config).parent_path() / p).string();
      }
    }
    nested_status = dispatch(args_from_json(j), false);
  });

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (run->parsed()) return nested_status;
  if (result) emit(*result, output);
  return 0;
}

int dispatch(std::vector<std::string> args, bool allow_run) {
  try {
    return run_app(std::move(args), allow_run);
  } catch (const eit::ConfigError& e) {
    std::cerr << "eitsim: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const eit::NumericalError& e) {
    std::cerr << "eitsim: numerical failure: " << e.what() << " (diagnostic " << e.diagnostic()
              << ")\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    std::cerr << "eitsim: invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "eitsim: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args), true);
}
