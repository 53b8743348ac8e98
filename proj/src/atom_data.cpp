#include "eit/atom_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "eit/errors.hpp"
#include "eit/units.hpp"

namespace eit {

namespace detail {
extern const std::string_view kCesiumDataJson;
}

namespace {

using nlohmann::json;

double hyperfine_energy(double a, double b, HalfInt nuclear, HalfInt j, HalfInt f) {
  const double I = nuclear.value(), J = j.value(), F = f.value();
  const double k = F * (F + 1) - I * (I + 1) - J * (J + 1);
  double e = 0.5 * a * k;
  if (j.twice() > 1 && nuclear.twice() > 1) {
    e += b * (1.5 * k * (k + 1) - 2.0 * I * (I + 1) * J * (J + 1)) /
         (2.0 * I * (2 * I - 1) * 2.0 * J * (2 * J - 1));
  }
  return e;
}

double lande_gf(double gj, double gi, HalfInt nuclear, HalfInt j, HalfInt f) {
  const double I = nuclear.value(), J = j.value(), F = f.value();
  if (F == 0.0) return 0.0;
  const double ff = F * (F + 1);
  return gj * (ff - I * (I + 1) + J * (J + 1)) / (2 * ff) +
         gi * (ff + I * (I + 1) - J * (J + 1)) / (2 * ff);
}

double number(const json& record, const char* key, const std::string& where) {
  if (!record.contains(key) || !record.at(key).is_number()) {
    throw ConfigError("atom data: missing numeric field '" + std::string(key) + "' in " + where);
  }
  return record.at(key).get<double>();
}

}  // namespace

double ManifoldData::total_decay_rate() const {
  double sum = 0.0;
  for (const auto& c : decay_channels) sum += c.partial_rate;
  return sum;
}

std::vector<HalfInt> ManifoldData::hyperfine_levels() const {
  std::vector<HalfInt> fs;
  for (const auto& [f, shift] : hyperfine_shifts) fs.push_back(f);
  return fs;
}

namespace {

AtomData parse_atom_data_unchecked(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("atom data: ") + e.what());
  }
  AtomData data;
  data.species = doc.value("species", "");
  data.nuclear_spin = HalfInt::parse(doc.at("nuclear_spin").get<std::string>());
  for (const auto& rec : doc.at("manifolds")) {
    const std::string name = rec.at("name").get<std::string>();
    ManifoldData m;
    m.id = parse_manifold(name);
    m.J = HalfInt::parse(rec.at("J").get<std::string>());
    if (m.J != manifold_j(m.id)) throw ConfigError("atom data: wrong J for " + name);
    m.fine_structure_energy = units::mhz_to_angular(number(rec, "energy_MHz", name));
    m.hyperfine_a = units::mhz_to_angular(number(rec, "hyperfine_A_MHz", name));
    m.hyperfine_b = units::mhz_to_angular(number(rec, "hyperfine_B_MHz", name));
    m.g_j = number(rec, "gJ", name);
    m.g_i = number(rec, "gI", name);
    const int fmin = std::abs(m.J.twice() - data.nuclear_spin.twice());
    const int fmax = m.J.twice() + data.nuclear_spin.twice();
    for (int tf = fmin; tf <= fmax; tf += 2) {
      const HalfInt f = HalfInt::from_twice(tf);
      m.hyperfine_shifts[f] =
          hyperfine_energy(m.hyperfine_a, m.hyperfine_b, data.nuclear_spin, m.J, f);
      m.lande_gf[f] = lande_gf(m.g_j, m.g_i, data.nuclear_spin, m.J, f);
    }
    for (const auto& ch : rec.at("decay_channels")) {
      DecayChannel c;
      c.target = parse_manifold(ch.at("target").get<std::string>());
      c.partial_rate = number(ch, "rate_MHz", name) * 1e6;
      c.wavelength = number(ch, "wavelength_nm", name) * 1e-9;
      c.reduced_element = number(ch, "reduced_dipole_au", name) * units::kAtomicDipole;
      m.decay_channels.push_back(c);
    }
    if (!rec.at("lifetime_ns").is_null()) {
      const double tau = number(rec, "lifetime_ns", name) * 1e-9;
      m.natural_linewidth = 1.0 / tau;
      const double total = m.total_decay_rate();
      if (std::abs(total * tau - 1.0) > 1e-6) {
        throw ConfigError("atom data: partial rates of " + name +
                          " do not sum to the inverse lifetime");
      }
    } else if (!m.decay_channels.empty()) {
      throw ConfigError("atom data: " + name + " has decay channels but no lifetime");
    }
    if (rec.contains("saturation_intensity_cycling_mW_cm2")) {
      // mW/cm^2 -> W/m^2
      m.cycling_saturation_intensity = number(rec, "saturation_intensity_cycling_mW_cm2", name) * 10.0;
    }
    data.manifolds[m.id] = std::move(m);
  }
  return data;
}

}  // namespace

AtomData parse_atom_data(std::string_view json_text) {
  try {
    return parse_atom_data_unchecked(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("atom data: ") + e.what());
  }
}

AtomData load_atom_data(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open atom data file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_atom_data(buffer.str());
}

const AtomData& cesium_data() {
  static const AtomData data = parse_atom_data(detail::kCesiumDataJson);
  return data;
}

LevelRegistry::LevelRegistry(AtomData data, std::vector<Manifold> included)
    : data_(std::move(data)), included_(std::move(included)) {
  std::sort(included_.begin(), included_.end(), [](Manifold a, Manifold b) {
    return std::pair(manifold_tier(a), a) < std::pair(manifold_tier(b), b);
  });
  included_.erase(std::unique(included_.begin(), included_.end()), included_.end());
  for (Manifold m : included_) {
    const auto it = data_.manifolds.find(m);
    if (it == data_.manifolds.end()) {
      throw ConfigError("atom data has no manifold " + std::string(manifold_name(m)));
    }
    for (const auto& [f, shift] : it->second.hyperfine_shifts) {
      for (int tm = -f.twice(); tm <= f.twice(); tm += 2) {
        basis_.push_back({m, f, HalfInt::from_twice(tm)});
      }
    }
  }
  build_index();
}

LevelRegistry::LevelRegistry(AtomData data, std::vector<Manifold> included,
                             std::vector<StateLabel> basis)
    : data_(std::move(data)), included_(std::move(included)), basis_(std::move(basis)) {
  build_index();
}

void LevelRegistry::build_index() {
  index_.clear();
  for (std::size_t i = 0; i < basis_.size(); ++i) index_.emplace(basis_[i], i);
  std::size_t full = 0;
  for (Manifold m : included_) {
    for (const auto& [f, shift] : manifold(m).hyperfine_shifts) full += f.twice() + 1;
  }
  complete_ = (full == basis_.size());
}

LevelRegistry LevelRegistry::restricted_to(std::span<const StateLabel> states) const {
  std::vector<StateLabel> kept;
  for (const auto& s : states) {
    if (!contains(s)) {
      throw ConfigError("state " + s.to_string() + " is not part of the registry");
    }
  }
  // Preserve the canonical ordering of the parent basis.
  for (const auto& s : basis_) {
    if (std::find(states.begin(), states.end(), s) != states.end()) kept.push_back(s);
  }
  return LevelRegistry(data_, included_, std::move(kept));
}

bool LevelRegistry::includes(Manifold m) const {
  return std::find(included_.begin(), included_.end(), m) != included_.end();
}

const ManifoldData& LevelRegistry::manifold(Manifold m) const {
  if (!includes(m)) {
    throw std::domain_error("manifold " + std::string(manifold_name(m)) +
                            " is not part of the registry");
  }
  return data_.manifolds.at(m);
}

bool LevelRegistry::contains(const StateLabel& s) const { return index_.count(s) > 0; }

std::optional<std::size_t> LevelRegistry::find(const StateLabel& s) const {
  const auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t LevelRegistry::index(const StateLabel& s) const {
  const auto it = index_.find(s);
  if (it == index_.end()) throw std::domain_error("state " + s.to_string() + " not in basis");
  return it->second;
}

Manifold LevelRegistry::tier_manifold(Tier t) const {
  for (Manifold m : included_) {
    if (manifold_tier(m) == t) return m;
  }
  throw ConfigError("registry has no manifold on the requested tier");
}

double LevelRegistry::reduced_element(Manifold lower, Manifold upper) const {
  for (const auto& c : manifold(upper).decay_channels) {
    if (c.target == lower) return c.reduced_element;
  }
  throw std::domain_error(std::string(manifold_name(lower)) + " and " +
                          std::string(manifold_name(upper)) + " are not dipole-connected");
}

double LevelRegistry::hyperfine_shift(const StateLabel& s) const {
  const auto& shifts = manifold(s.manifold).hyperfine_shifts;
  const auto it = shifts.find(s.F);
  if (it == shifts.end()) throw std::domain_error("no hyperfine level " + s.to_string());
  return it->second;
}

std::string LevelRegistry::serialize() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "species " << data_.species << " I=" << data_.nuclear_spin.to_string() << '\n';
  for (Manifold m : included_) {
    const auto& md = manifold(m);
    out << "manifold " << manifold_name(m) << " J=" << md.J.to_string()
        << " E=" << md.fine_structure_energy << " A=" << md.hyperfine_a
        << " B=" << md.hyperfine_b << " gamma=" << md.natural_linewidth << '\n';
    for (const auto& [f, shift] : md.hyperfine_shifts) {
      out << "  F=" << f.to_string() << " shift=" << shift << " gF=" << md.lande_gf.at(f) << '\n';
    }
    for (const auto& c : md.decay_channels) {
      out << "  decay " << manifold_name(c.target) << " rate=" << c.partial_rate
          << " lambda=" << c.wavelength << " d=" << c.reduced_element << '\n';
    }
  }
  for (std::size_t i = 0; i < basis_.size(); ++i) out << i << ' ' << basis_[i].to_string() << '\n';
  return out.str();
}

LevelRegistry cesium_registry(Manifold intermediate) {
  if (manifold_tier(intermediate) != Tier::Intermediate) {
    throw ConfigError("intermediate manifold must be 6P1/2 or 6P3/2");
  }
  return LevelRegistry(cesium_data(), {Manifold::S1_2_6, intermediate, Manifold::S1_2_7});
}

double zeeman_shift(const StateLabel& state, double magnetic_field,
                    const LevelRegistry& registry) {
  if (magnetic_field == 0.0 || state.mF.twice() == 0) return 0.0;
  const auto& gf = registry.manifold(state.manifold).lande_gf;
  const auto it = gf.find(state.F);
  if (it == gf.end()) throw std::domain_error("no hyperfine level " + state.to_string());
  return it->second * units::kBohrMagneton * state.mF.value() * magnetic_field / units::kHbar;
}

}  // namespace eit
