#include "eit/lightfield.hpp"

#include <cmath>
#include <stdexcept>

#include "eit/angular.hpp"
#include "eit/errors.hpp"
#include "eit/units.hpp"

namespace eit {

Polarization::Polarization(complex minus, complex pi, complex plus) {
  const double norm = std::sqrt(std::norm(minus) + std::norm(pi) + std::norm(plus));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw ConfigError("polarization amplitudes must not all vanish");
  }
  amps_ = {minus / norm, pi / norm, plus / norm};
}

Polarization Polarization::admixed(int nominal_q, int wrong_q, double fraction) {
  if (nominal_q < -1 || nominal_q > 1 || wrong_q < -1 || wrong_q > 1 || nominal_q == wrong_q) {
    throw ConfigError("admixed polarization needs two distinct components in {-1,0,1}");
  }
  if (fraction < 0.0 || fraction > 1.0) throw ConfigError("power fraction must lie in [0,1]");
  std::array<complex, 3> a{};
  a[nominal_q + 1] = std::sqrt(1.0 - fraction);
  a[wrong_q + 1] = std::sqrt(fraction);
  return {a[0], a[1], a[2]};
}

double Polarization::wrong_fraction(int nominal_q) const {
  double sum = 0.0;
  for (int q = -1; q <= 1; ++q) {
    if (q != nominal_q) sum += std::norm(amplitude(q));
  }
  return sum;
}

void FieldSpec::validate() const {
  if (!(intensity >= 0.0) || !std::isfinite(intensity)) {
    throw ConfigError("field intensity must be finite and non-negative");
  }
  if (reference_lower.manifold != lower_manifold || reference_upper.manifold != upper_manifold) {
    throw ConfigError("reference transition " + reference_lower.to_string() + " -> " +
                      reference_upper.to_string() + " is outside the field's manifolds");
  }
  if (!std::isfinite(detuning)) throw ConfigError("field detuning must be finite");
}

double electric_field_amplitude(double intensity_w_cm2) {
  if (!(intensity_w_cm2 >= 0.0)) throw std::domain_error("intensity must be non-negative");
  const double si = units::w_per_cm2_to_si(intensity_w_cm2);
  return std::sqrt(2.0 * si / (units::kSpeedOfLight * units::kVacuumPermittivity));
}

double hyperfine_dipole_element(const StateLabel& lower, const StateLabel& upper, int q,
                                const LevelRegistry& registry) {
  const double reduced = registry.reduced_element(lower.manifold, upper.manifold);
  const HalfInt I = registry.nuclear_spin();
  return angular::dipole_element({manifold_j(lower.manifold), I, lower.F, lower.mF},
                                 {manifold_j(upper.manifold), I, upper.F, upper.mF}, q,
                                 reduced);
}

complex rabi_frequency(const FieldSpec& field, const StateLabel& lower, const StateLabel& upper,
                       const LevelRegistry& registry) {
  if (lower.manifold != field.lower_manifold || upper.manifold != field.upper_manifold) {
    throw std::domain_error("states " + lower.to_string() + ", " + upper.to_string() +
                            " are outside the field's manifolds");
  }
  const int twice_q = upper.mF.twice() - lower.mF.twice();
  if (twice_q % 2 != 0 || std::abs(twice_q) > 2) return 0.0;
  const int q = twice_q / 2;
  const complex a = field.polarization.amplitude(q);
  if (a == complex(0.0) || field.intensity == 0.0) return 0.0;
  const double d = hyperfine_dipole_element(lower, upper, q, registry);
  if (d == 0.0) return 0.0;
  return a * d * electric_field_amplitude(field.intensity) / units::kHbar;
}

}  // namespace eit
