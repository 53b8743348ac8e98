#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eit/state.hpp"

namespace eit {

struct DecayChannel {
  Manifold target;
  double partial_rate = 0.0;     // s^-1
  double wavelength = 0.0;       // m
  double reduced_element = 0.0;  // C m, <J_this || d || J_target>
};

struct ManifoldData {
  Manifold id = Manifold::S1_2_6;
  HalfInt J;
  double fine_structure_energy = 0.0;  // rad/s above the ground centroid
  double hyperfine_a = 0.0;            // rad/s
  double hyperfine_b = 0.0;            // rad/s
  double g_j = 0.0;
  double g_i = 0.0;
  std::map<HalfInt, double> hyperfine_shifts;  // F -> rad/s from the centroid
  std::map<HalfInt, double> lande_gf;          // F -> g_F
  double natural_linewidth = 0.0;              // 1/lifetime [s^-1]; 0 if stable
  std::vector<DecayChannel> decay_channels;
  std::optional<double> cycling_saturation_intensity;  // W/m^2

  double total_decay_rate() const;
  std::vector<HalfInt> hyperfine_levels() const;
};

// Parsed contents of an atomic data file.
struct AtomData {
  std::string species;
  HalfInt nuclear_spin;
  std::map<Manifold, ManifoldData> manifolds;
};

AtomData parse_atom_data(std::string_view json_text);
AtomData load_atom_data(const std::string& path);
// Cesium table compiled into the library from data/cesium.json.
const AtomData& cesium_data();

// Immutable description of the simulated level structure: manifold data plus
// the ordered basis of |F, mF> sublevels. Ordering is ground tier first, then
// intermediate, then excited; within a manifold ascending F then mF.
class LevelRegistry {
 public:
  LevelRegistry(AtomData data, std::vector<Manifold> included);

  // Same manifold data, basis truncated to the listed sublevels (toy models).
  LevelRegistry restricted_to(std::span<const StateLabel> states) const;

  const AtomData& data() const { return data_; }
  HalfInt nuclear_spin() const { return data_.nuclear_spin; }
  const std::vector<Manifold>& included() const { return included_; }
  bool includes(Manifold m) const;
  const ManifoldData& manifold(Manifold m) const;

  std::size_t dimension() const { return basis_.size(); }
  const std::vector<StateLabel>& basis() const { return basis_; }
  const StateLabel& label(std::size_t i) const { return basis_.at(i); }
  bool contains(const StateLabel& s) const;
  // Throws std::domain_error if absent.
  std::size_t index(const StateLabel& s) const;
  std::optional<std::size_t> find(const StateLabel& s) const;

  // True when every sublevel of each included manifold is in the basis.
  bool is_complete() const { return complete_; }

  // Manifold included on the given tier; throws if none.
  Manifold tier_manifold(Tier t) const;

  // <J_upper || d || J_lower> [C m] from the upper manifold's decay table.
  double reduced_element(Manifold lower, Manifold upper) const;

  double hyperfine_shift(const StateLabel& s) const;

  // Deterministic text form used for reproducibility checks and output
  // provenance.
  std::string serialize() const;

 private:
  LevelRegistry(AtomData data, std::vector<Manifold> included,
                std::vector<StateLabel> basis);
  void build_index();

  AtomData data_;
  std::vector<Manifold> included_;
  std::vector<StateLabel> basis_;
  std::map<StateLabel, std::size_t> index_;
  bool complete_ = true;
};

// 6S1/2 + chosen 6P manifold + 7S1/2.
LevelRegistry cesium_registry(Manifold intermediate);

// Linear Zeeman shift g_F mu_B mF B / hbar [rad/s]; B in tesla.
double zeeman_shift(const StateLabel& state, double magnetic_field,
                    const LevelRegistry& registry);

}  // namespace eit
