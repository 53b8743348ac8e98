#pragma once

#include <array>
#include <complex>

#include "eit/atom_data.hpp"
#include "eit/state.hpp"

namespace eit {

using complex = std::complex<double>;

// Spherical-basis polarization amplitudes (a_-1, a_0, a_+1), normalized.
class Polarization {
 public:
  Polarization() = default;
  // Normalizes; throws ConfigError for the zero vector.
  Polarization(complex minus, complex pi, complex plus);

  static Polarization sigma_plus() { return {0.0, 0.0, 1.0}; }
  static Polarization sigma_minus() { return {1.0, 0.0, 0.0}; }
  static Polarization pi() { return {0.0, 1.0, 0.0}; }

  // Nominal polarization with power fraction `fraction` moved into the
  // spherical component `wrong_q`.
  static Polarization admixed(int nominal_q, int wrong_q, double fraction);

  complex amplitude(int q) const { return amps_.at(q + 1); }
  const std::array<complex, 3>& amplitudes() const { return amps_; }

  // Power outside the component nominal_q.
  double wrong_fraction(int nominal_q) const;

 private:
  std::array<complex, 3> amps_{0.0, 0.0, 1.0};
};

enum class FieldRole { Detection, Protection };

struct FieldSpec {
  Manifold lower_manifold = Manifold::S1_2_6;
  Manifold upper_manifold = Manifold::P3_2_6;
  // Zero of detuning: the bare lower -> upper hyperfine resonance. Only the
  // F values of the reference enter the rotating frame.
  StateLabel reference_lower;
  StateLabel reference_upper;
  double detuning = 0.0;   // rad/s, laser minus reference resonance
  double intensity = 0.0;  // W/cm^2
  Polarization polarization;
  FieldRole role = FieldRole::Detection;

  // Throws ConfigError on negative intensity or a reference outside the
  // declared manifolds.
  void validate() const;
};

// E = sqrt(2 I / (c eps0)); intensity in W/cm^2, result in V/m.
double electric_field_amplitude(double intensity_w_cm2);

// Omega = a_q <upper|d_q|lower> E / hbar with q = mF(upper) - mF(lower).
complex rabi_frequency(const FieldSpec& field, const StateLabel& lower,
                       const StateLabel& upper, const LevelRegistry& registry);

// <upper|d_q|lower> [C m] for registry sublevels; domain error if the
// manifolds are not dipole-connected.
double hyperfine_dipole_element(const StateLabel& lower, const StateLabel& upper, int q,
                                const LevelRegistry& registry);

}  // namespace eit
