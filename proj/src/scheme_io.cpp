#include "eit/scheme_io.hpp"

#include <fstream>
#include <sstream>

#include "eit/errors.hpp"
#include "eit/experiments.hpp"
#include "eit/units.hpp"

namespace eit {

namespace {

using nlohmann::json;

StateLabel state_from(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + ": expected a \"manifold:F:mF\" string");
  try {
    return StateLabel::parse(j.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::vector<StateLabel> states_from(const json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of states");
  std::vector<StateLabel> out;
  for (const auto& s : j) out.push_back(state_from(s, what));
  return out;
}

double number_from(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + ": expected a number");
  return j.get<double>();
}

void read_field(const json& j, FieldSpec& f, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (key == "reference") {
      if (!value.is_array() || value.size() != 2) {
        throw ConfigError(what + ".reference: expected [lower, upper]");
      }
      f.reference_lower = state_from(value[0], what + ".reference");
      f.reference_upper = state_from(value[1], what + ".reference");
      f.lower_manifold = f.reference_lower.manifold;
      f.upper_manifold = f.reference_upper.manifold;
    } else if (key == "detuning_MHz") {
      f.detuning = units::mhz_to_angular(number_from(value, what + ".detuning_MHz"));
    } else if (key == "intensity_W_cm2") {
      f.intensity = number_from(value, what + ".intensity_W_cm2");
    } else if (key == "polarization") {
      f.polarization = polarization_from_json(value);
    } else {
      throw ConfigError(what + ": unknown key '" + key + "'");
    }
  }
}

json field_to_json(const FieldSpec& f) {
  return {
      {"reference", {f.reference_lower.to_string(), f.reference_upper.to_string()}},
      {"detuning_MHz", units::angular_to_mhz(f.detuning)},
      {"intensity_W_cm2", f.intensity},
      {"polarization", polarization_to_json(f.polarization)},
  };
}

const std::vector<std::string> kRequired{"intermediate", "detection", "protection", "protected",
                                         "detected", "detected_rate_mode"};

}  // namespace

json polarization_to_json(const Polarization& p) {
  json out = json::array();
  for (int q = -1; q <= 1; ++q) out.push_back({p.amplitude(q).real(), p.amplitude(q).imag()});
  return out;
}

Polarization polarization_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "sigma+") return Polarization::sigma_plus();
    if (s == "sigma-") return Polarization::sigma_minus();
    if (s == "pi") return Polarization::pi();
    throw ConfigError("polarization: unknown name '" + s + "'");
  }
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError("polarization: expected [[re,im],[re,im],[re,im]] for q = -1, 0, +1");
  }
  std::array<complex, 3> a;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& c = j[i];
    if (!c.is_array() || c.size() != 2 || !c[0].is_number() || !c[1].is_number()) {
      throw ConfigError("polarization: each component must be [re, im]");
    }
    a[i] = {c[0].get<double>(), c[1].get<double>()};
  }
  return Polarization(a[0], a[1], a[2]);
}

SchemeConfig scheme_from_json(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw ConfigError("scheme: expected a JSON object");
  std::optional<SchemeConfig> cfg;
  if (j.contains("base")) {
    if (!j["base"].is_string()) throw ConfigError("scheme.base: expected a preset name");
    cfg = scheme_preset(j["base"].get<std::string>());
  } else {
    for (const auto& k : kRequired) {
      if (!j.contains(k)) throw ConfigError("scheme: missing key '" + k + "'");
    }
  }

  std::optional<AtomData> data;
  if (j.contains("atom_data")) {
    if (!j["atom_data"].is_string()) throw ConfigError("scheme.atom_data: expected a path");
    std::filesystem::path p = j["atom_data"].get<std::string>();
    if (p.is_relative()) p = base_dir / p;
    data = load_atom_data(p.string());
  }
  if (j.contains("intermediate") || data) {
    Manifold inter = cfg ? cfg->detection.upper_manifold : Manifold::P3_2_6;
    if (j.contains("intermediate")) {
      try {
        inter = parse_manifold(j["intermediate"].get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError(std::string("scheme.intermediate: ") + e.what());
      }
      if (manifold_tier(inter) != Tier::Intermediate) {
        throw ConfigError("scheme.intermediate must be 6P1/2 or 6P3/2");
      }
    }
    LevelRegistry reg = data ? LevelRegistry(*data, {Manifold::S1_2_6, inter, Manifold::S1_2_7})
                             : cesium_registry(inter);
    if (cfg) {
      cfg->registry = std::move(reg);
    } else {
      cfg.emplace(SchemeConfig{.name = "custom",
                               .registry = std::move(reg),
                               .detection = {},
                               .protection = {},
                               .protected_states = {},
                               .detected_state = {},
                               .watch_states = {}});
    }
  }

  for (const auto& [key, value] : j.items()) {
    if (key == "base" || key == "atom_data" || key == "intermediate") continue;
    if (key == "name") {
      if (!value.is_string()) throw ConfigError("scheme.name: expected a string");
      cfg->name = value.get<std::string>();
    } else if (key == "basis") {
      const auto states = states_from(value, "scheme.basis");
      try {
        cfg->registry = cfg->registry.restricted_to(states);
      } catch (const std::exception& e) {
        throw ConfigError(std::string("scheme.basis: ") + e.what());
      }
    } else if (key == "detection") {
      cfg->detection.role = FieldRole::Detection;
      read_field(value, cfg->detection, "scheme.detection");
    } else if (key == "protection") {
      cfg->protection.role = FieldRole::Protection;
      read_field(value, cfg->protection, "scheme.protection");
    } else if (key == "magnetic_field_G") {
      cfg->magnetic_field = number_from(value, "scheme.magnetic_field_G") * units::kGauss;
    } else if (key == "protected") {
      cfg->protected_states = states_from(value, "scheme.protected");
    } else if (key == "detected") {
      cfg->detected_state = state_from(value, "scheme.detected");
    } else if (key == "watch") {
      cfg->watch_states = states_from(value, "scheme.watch");
    } else if (key == "detected_rate_mode") {
      const auto m = value.is_string() ? value.get<std::string>() : "";
      if (m == "constant") {
        cfg->detected_rate_mode = RateMode::Constant;
      } else if (m == "exponential") {
        cfg->detected_rate_mode = RateMode::Exponential;
      } else {
        throw ConfigError("scheme.detected_rate_mode: expected \"constant\" or \"exponential\"");
      }
    } else {
      throw ConfigError("scheme: unknown key '" + key + "'");
    }
  }
  try {
    cfg->validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(cfg->name + ": " + e.what());
  }
  return *cfg;
}

SchemeConfig load_scheme_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scheme file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scheme file '" + path.string() + "': " + e.what());
  }
  return scheme_from_json(j, path.parent_path());
}

json scheme_to_json(const SchemeConfig& c) {
  json j{
      {"name", c.name},
      {"intermediate", std::string(manifold_name(c.detection.upper_manifold))},
      {"detection", field_to_json(c.detection)},
      {"protection", field_to_json(c.protection)},
      {"magnetic_field_G", c.magnetic_field / units::kGauss},
      {"detected", c.detected_state.to_string()},
      {"detected_rate_mode",
       c.detected_rate_mode == RateMode::Constant ? "constant" : "exponential"},
  };
  auto labels = [](const std::vector<StateLabel>& v) {
    json a = json::array();
    for (const auto& s : v) a.push_back(s.to_string());
    return a;
  };
  j["protected"] = labels(c.protected_states);
  j["watch"] = labels(c.watch_states);
  if (!c.registry.is_complete()) j["basis"] = labels(c.registry.basis());
  return j;
}

SchemeConfig resolve_scheme(const std::string& name_or_path) {
  for (const auto& p : preset_names()) {
    if (p == name_or_path) return scheme_preset(p);
  }
  if (name_or_path.find('/') == std::string::npos &&
      name_or_path.find(".json") == std::string::npos) {
    throw ConfigError("unknown scheme preset '" + name_or_path + "'");
  }
  return load_scheme_file(name_or_path);
}

}  // namespace eit
