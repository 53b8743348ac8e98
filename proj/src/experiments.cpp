#include "eit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "eit/errors.hpp"
#include "eit/parallel.hpp"

namespace eit {

namespace {

FieldSpec detection_field(Manifold intermediate, StateLabel lower, StateLabel upper,
                          Polarization pol) {
  return {Manifold::S1_2_6, intermediate, lower, upper, 0.0, kDetectionIntensity, pol,
          FieldRole::Detection};
}

FieldSpec protection_field(Manifold intermediate, StateLabel lower, StateLabel upper,
                           Polarization pol) {
  return {intermediate, Manifold::S1_2_7, lower, upper, 0.0, kDefaultProtectionIntensity, pol,
          FieldRole::Protection};
}

int dominant_component(const Polarization& p) {
  int best = -1;
  for (int q = 0; q <= 1; ++q) {
    if (std::norm(p.amplitude(q)) > std::norm(p.amplitude(best))) best = q;
  }
  return best;
}

}  // namespace

SchemeConfig scheme1() {
  SchemeConfig c{
      .name = "scheme1",
      .registry = cesium_registry(Manifold::P3_2_6),
      .detection = detection_field(Manifold::P3_2_6, ground(4, 4), d2(5, 5),
                                   Polarization::sigma_plus()),
      .protection = protection_field(Manifold::P3_2_6, d2(5, 1), seven_s(4, 1),
                                     Polarization::pi()),
      .magnetic_field = 0.0,
      .protected_states = {ground(4, 0)},
      .detected_state = ground(4, 4),
      .watch_states = {ground(3, 0), ground(3, 1), ground(3, 2), ground(4, 1), ground(4, 2)},
      .detected_rate_mode = RateMode::Constant,
  };
  c.validate();
  return c;
}

SchemeConfig scheme2() {
  SchemeConfig c{
      .name = "scheme2",
      .registry = cesium_registry(Manifold::P1_2_6),
      .detection = detection_field(Manifold::P1_2_6, ground(3, 3), d1(4, 4),
                                   Polarization::sigma_plus()),
      .protection = protection_field(Manifold::P1_2_6, d1(4, 1), seven_s(4, 2),
                                     Polarization::sigma_plus()),
      .magnetic_field = 0.0,
      .protected_states = {ground(3, 0)},
      .detected_state = ground(3, 3),
      .watch_states = {ground(4, 3), ground(4, 4), ground(3, 2)},
      .detected_rate_mode = RateMode::Exponential,
  };
  c.validate();
  return c;
}

SchemeConfig scheme3() {
  SchemeConfig c{
      .name = "scheme3",
      .registry = cesium_registry(Manifold::P1_2_6),
      .detection = detection_field(Manifold::P1_2_6, ground(4, 4), d1(4, 4), Polarization::pi()),
      .protection = protection_field(Manifold::P1_2_6, d1(4, 1), seven_s(4, 2),
                                     Polarization::sigma_plus()),
      .magnetic_field = 0.0,
      .protected_states = {ground(4, 0)},
      .detected_state = ground(4, 4),
      .watch_states = {ground(4, 3)},
      .detected_rate_mode = RateMode::Exponential,
  };
  c.validate();
  return c;
}

SchemeConfig toy_model(int n_levels) {
  std::vector<StateLabel> states{ground(4, 0), d2(5, 1), seven_s(4, 1)};
  if (n_levels < 3 || n_levels > 6) {
    throw std::domain_error("toy model needs 3 to 6 levels, got " + std::to_string(n_levels));
  }
  if (n_levels >= 4) states.push_back(d2(4, 1));
  if (n_levels >= 5) states.push_back(seven_s(3, 1));
  if (n_levels >= 6) states.push_back(d2(3, 1));
  states.push_back(ground(4, 4));
  states.push_back(d2(5, 5));
  SchemeConfig c = scheme1();
  c.name = "toy" + std::to_string(n_levels);
  c.registry = c.registry.restricted_to(states);
  c.watch_states.clear();
  c.validate();
  return c;
}

SchemeConfig scheme_preset(std::string_view name) {
  if (name == "scheme1") return scheme1();
  if (name == "scheme2") return scheme2();
  if (name == "scheme3") return scheme3();
  if (name.size() == 4 && name.substr(0, 3) == "toy" && name[3] >= '3' && name[3] <= '6') {
    return toy_model(name[3] - '0');
  }
  throw ConfigError("unknown scheme preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names() {
  return {"scheme1", "scheme2", "scheme3", "toy3", "toy4", "toy5", "toy6"};
}

std::vector<SuppressionPoint> suppression_curve(const SchemeConfig& config,
                                                const std::vector<double>& intensities,
                                                const SuppressionOptions& options,
                                                unsigned threads,
                                                const std::optional<StateLabel>& target) {
  std::vector<SuppressionPoint> out(intensities.size());
  parallel_for(intensities.size(), threads, [&](std::size_t i) {
    out[i].intensity = intensities[i];
    out[i].result = suppression_factor(config, intensities[i], options, target);
  });
  return out;
}

double saturated_r(const std::vector<SuppressionPoint>& curve, double threshold) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : curve) {
    if (p.intensity >= threshold) best = std::min(best, p.result.r);
  }
  if (!std::isfinite(best)) {
    throw std::domain_error("no curve point at or above the saturation threshold");
  }
  return best;
}

double default_tau(const SchemeConfig& config, double photons, const SuppressionOptions& options) {
  if (!(photons > 0.0)) throw std::domain_error("photon count must be positive");
  const double rate = detected_state_rate(config, options);
  if (!(rate > 0.0)) throw NumericalError("detected state does not scatter", rate);
  return photons / rate;
}

// ---------------------------------------------------------------------------

void ImagingLoopConfig::validate() const {
  if (tau < 0.0 || !std::isfinite(tau)) throw ConfigError("tau must be non-negative");
  if (inner_repeats < 1 || outer_cycles < 1) throw ConfigError("loop counts must be >= 1");
  if (!(pulse_fidelity >= 0.0 && pulse_fidelity <= 1.0)) {
    throw ConfigError("pulse fidelity must lie in [0, 1]");
  }
  if (!(sample_every > 0.0)) throw ConfigError("sample interval must be positive");
}

ImagingLoopReport imaging_loop(const SchemeConfig& config, const ImagingLoopConfig& loop) {
  config.validate();
  loop.validate();
  const auto& reg = config.registry;
  const StateLabel s33 = ground(3, 3), s43 = ground(4, 3), s44 = ground(4, 4);
  for (const auto& s : {s33, s43, s44}) {
    if (!reg.contains(s)) throw ConfigError(config.name + ": imaging loop needs " + s.to_string());
  }
  ImagingLoopReport report;
  report.tau = loop.tau > 0.0 ? loop.tau : default_tau(config);

  const auto h = build_rwa_hamiltonian(config);
  const auto decay = collapse_operators(reg);
  const std::size_t i33 = reg.index(s33), i43 = reg.index(s43), i44 = reg.index(s44);

  DensityMatrix rho = DensityMatrix::pure(reg, s33);
  double photons = 0.0;
  auto image = [&] {
    auto trace = evolve(rho, h, decay, report.tau, std::min(loop.sample_every, report.tau),
                        loop.evolve);
    photons += trace.photons();
    rho = trace.final_state;
  };
  auto pulse = [&](std::size_t a, std::size_t b) {
    const double f = loop.pulse_fidelity;
    rho = DensityMatrix::unchecked(f * rho.swapped(a, b).matrix() + (1.0 - f) * rho.matrix());
  };

  for (int c = 0; c < loop.outer_cycles; ++c) {
    photons = 0.0;
    image();
    for (int r = 0; r < loop.inner_repeats; ++r) {
      pulse(i43, i33);
      image();
    }
    ImagingCycle cyc;
    cyc.cycle = c + 1;
    cyc.photons = photons;
    cyc.p33 = rho.population(i33);
    cyc.p43 = rho.population(i43);
    cyc.p44 = rho.population(i44);
    cyc.trace = rho.trace();
    cyc.leaked = cyc.trace - cyc.p33 - cyc.p43 - cyc.p44;
    const double retained = cyc.p33 + cyc.p43 + cyc.p44;
    cyc.pumped_fraction = retained > 0.0 ? cyc.p44 / retained : 0.0;
    report.cycles.push_back(cyc);
    report.total_photons += photons;
    pulse(i44, i33);
  }
  report.final_state = rho;
  return report;
}

// ---------------------------------------------------------------------------

namespace {

SweepPoint sweep_point(SchemeConfig cfg, const StateLabel& error_state,
                       const SweepOptions& options, double x) {
  const auto h = build_rwa_hamiltonian(cfg);
  const auto decay = collapse_operators(cfg.registry);
  const auto trace = evolve(DensityMatrix::pure(cfg.registry, cfg.detected_state), h, decay,
                            options.duration, options.sample_every, options.evolve);
  SweepPoint p;
  p.x = x;
  p.transferred = std::max(0.0, trace.final_state.population(cfg.registry.index(error_state)));
  p.photons_scattered = trace.photons();
  p.unprotected_population = trace.final_state.population(cfg.registry.index(cfg.detected_state));
  if (!(p.photons_scattered > 0.0)) {
    throw NumericalError(cfg.name + ": no photons scattered in sweep point", p.photons_scattered);
  }
  p.error_per_detection = p.transferred / p.photons_scattered * options.photons;
  return p;
}

void apply_impurity(SchemeConfig& cfg, ImpureBeam beam, int wrong_q, double fraction) {
  if (!(fraction >= 0.0 && fraction <= 0.1)) {
    throw std::domain_error("wrong-polarization fraction must lie in [0, 0.1]");
  }
  FieldSpec& f = beam == ImpureBeam::Protection ? cfg.protection : cfg.detection;
  const int nominal = dominant_component(f.polarization);
  if (wrong_q == nominal) throw ConfigError("wrong component equals the nominal one");
  f.polarization = Polarization::admixed(nominal, wrong_q, fraction);
}

// Keeps the detection laser on the Zeeman-shifted reference transition.
void follow_zeeman(SchemeConfig& cfg, double field) {
  if (field < 0.0 || !std::isfinite(field)) throw std::domain_error("field must be >= 0");
  cfg.magnetic_field = field;
  cfg.detection.detuning = zeeman_shift(cfg.detection.reference_upper, field, cfg.registry) -
                           zeeman_shift(cfg.detection.reference_lower, field, cfg.registry);
}

}  // namespace

SweepResult polarization_sweep(const SchemeConfig& config, ImpureBeam beam, int wrong_q,
                               const std::vector<double>& fractions, double magnetic_field,
                               const StateLabel& error_state, const SweepOptions& options,
                               unsigned threads) {
  if (!config.registry.contains(error_state)) {
    throw ConfigError("error state " + error_state.to_string() + " not in basis");
  }
  SweepResult out{"wrong_fraction", std::vector<SweepPoint>(fractions.size())};
  parallel_for(fractions.size(), threads, [&](std::size_t i) {
    SchemeConfig cfg = config;
    apply_impurity(cfg, beam, wrong_q, fractions[i]);
    follow_zeeman(cfg, magnetic_field);
    out.points[i] = sweep_point(std::move(cfg), error_state, options, fractions[i]);
  });
  return out;
}

SweepResult field_sweep(const SchemeConfig& config, ImpureBeam beam, int wrong_q,
                        double fraction, const std::vector<double>& fields,
                        const StateLabel& error_state, const SweepOptions& options,
                        unsigned threads) {
  if (!config.registry.contains(error_state)) {
    throw ConfigError("error state " + error_state.to_string() + " not in basis");
  }
  SweepResult out{"magnetic_field_T", std::vector<SweepPoint>(fields.size())};
  parallel_for(fields.size(), threads, [&](std::size_t i) {
    SchemeConfig cfg = config;
    apply_impurity(cfg, beam, wrong_q, fraction);
    follow_zeeman(cfg, fields[i]);
    out.points[i] = sweep_point(std::move(cfg), error_state, options, fields[i]);
  });
  return out;
}

// ---------------------------------------------------------------------------

std::vector<Scheme3Point> scheme3_analysis(const std::vector<double>& intensities,
                                           const Scheme3Options& options, unsigned threads) {
  if (!(options.sigma_plus_share >= 0.0 && options.sigma_plus_share <= 1.0)) {
    throw ConfigError("sigma+ share must lie in [0, 1]");
  }
  const SchemeConfig base = scheme3();
  const double tau = options.tau > 0.0 ? options.tau : default_tau(base, 10.0, options.suppression);
  const auto& sup = options.suppression;

  std::vector<Scheme3Point> out(intensities.size());
  parallel_for(intensities.size(), threads, [&](std::size_t i) {
    Scheme3Point& p = out[i];
    p.intensity = intensities[i];
    SchemeConfig cfg = base;
    cfg.protection.intensity = intensities[i];

    const auto pi = suppression_factor(cfg, p.intensity, sup, ground(4, 0));
    p.r_pi = pi.r;

    SchemeConfig mixed = cfg;
    const double s = options.sigma_plus_share;
    mixed.detection.polarization = Polarization(std::sqrt(1.0 - s), 0.0, std::sqrt(s));
    const auto h_mixed = build_rwa_hamiltonian(mixed);
    const auto decay = collapse_operators(cfg.registry);
    const auto trace_mixed = evolve(DensityMatrix::pure(cfg.registry, ground(4, 0)), h_mixed,
                                    decay, sup.duration, sup.sample_every, sup.evolve);
    p.r_sigma = steady_rate(trace_mixed, sup.settle_window) / pi.detected_rate;

    const auto h = build_rwa_hamiltonian(cfg);
    const double dt = std::min(sup.sample_every * 5.0, tau);
    const auto leak = evolve(DensityMatrix::pure(cfg.registry, ground(4, 3)), h, decay, tau, dt,
                             sup.evolve);
    for (std::size_t k = 0; k < cfg.registry.dimension(); ++k) {
      const auto& s_k = cfg.registry.label(k);
      if (manifold_tier(s_k.manifold) == Tier::Ground && s_k.mF.twice() < 6) {
        p.leaked += leak.final_state.population(k);
      }
    }
    const auto detected = evolve(DensityMatrix::pure(cfg.registry, ground(4, 4)), h, decay, tau,
                                 dt, sup.evolve);
    p.photons = detected.photons();
    p.leakage_error = p.leaked / p.photons * options.photons;
  });
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::pair<StateLabel, StateLabel>> mapping_swaps() {
  return {
      {ground(4, 0), ground(4, 1)}, {ground(3, 0), ground(3, 1)},  // site-selective step
      {ground(4, 1), ground(3, 2)}, {ground(3, 1), ground(4, 2)},
      {ground(3, 2), ground(4, 3)}, {ground(4, 2), ground(3, 3)},
      {ground(3, 3), ground(4, 4)},
      {ground(4, 3), ground(3, 2)},
  };
}

MappingReport mapping_sequence_check(std::array<double, 2> populations) {
  if (populations[0] < 0.0 || populations[1] < 0.0 ||
      std::abs(populations[0] + populations[1] - 1.0) > 1e-12) {
    throw std::domain_error("qubit populations must be non-negative and sum to 1");
  }
  MappingReport report;
  report.initial = populations;
  std::map<StateLabel, double> pops{{ground(3, 0), populations[0]}, {ground(4, 0), populations[1]}};

  // Swaps sharing a step act simultaneously on disjoint pairs.
  const auto swaps = mapping_swaps();
  const std::vector<std::pair<std::string, std::vector<std::size_t>>> steps{
      {"site_selective", {0, 1}}, {"pulse_a", {2, 3}}, {"pulse_b", {4, 5}},
      {"to_detected", {6}}, {"to_protected", {7}},
  };
  std::vector<StateLabel> allowed;
  for (int f = 3; f <= 4; ++f) {
    for (int m = 0; m <= f; ++m) allowed.push_back(ground(f, m));
  }
  auto apply = [&](const std::vector<std::size_t>& idx) {
    std::map<StateLabel, double> next = pops;
    for (std::size_t i : idx) {
      const auto& [a, b] = swaps[i];
      next[a] = pops.count(b) ? pops.at(b) : 0.0;
      next[b] = pops.count(a) ? pops.at(a) : 0.0;
    }
    pops.clear();
    for (const auto& [s, p] : next) {
      if (p != 0.0) pops[s] = p;
    }
  };
  auto snapshot = [&](const std::string& name) {
    MappingReport::Stage st{name, {}};
    for (const auto& [s, p] : pops) {
      st.populations.emplace_back(s, p);
      if (std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
        report.stayed_in_protected_set = false;
      }
    }
    report.stages.push_back(std::move(st));
  };

  snapshot("initial");
  for (const auto& [name, idx] : steps) {
    apply(idx);
    snapshot(name);
  }
  // Second readout: exchange the detected |4,4> with the parked |3,2>.
  std::swap(pops[ground(4, 4)], pops[ground(3, 2)]);
  std::erase_if(pops, [](const auto& kv) { return kv.second == 0.0; });
  snapshot("exchange");
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    apply(it->second);
    snapshot("reverse_" + it->first);
  }
  report.round_trip = {pops.count(ground(3, 0)) ? pops.at(ground(3, 0)) : 0.0,
                       pops.count(ground(4, 0)) ? pops.at(ground(4, 0)) : 0.0};
  return report;
}

}  // namespace eit
