#pragma once

#include <numbers>

// SI constants (CODATA 2018) and the unit conversions used at the edges of
// the library. Internally frequencies are angular [rad/s], fields [V/m],
// intensities [W/m^2] unless a name says otherwise.
namespace eit::units {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kSpeedOfLight = 299792458.0;          // m/s
inline constexpr double kPlanck = 6.62607015e-34;             // J s
inline constexpr double kHbar = kPlanck / kTwoPi;             // J s
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kBohrRadius = 5.29177210903e-11;      // m
inline constexpr double kBohrMagneton = 9.2740100783e-24;     // J/T
inline constexpr double kAtomicDipole = kElementaryCharge * kBohrRadius;  // C m

inline constexpr double kGauss = 1e-4;  // T

constexpr double mhz_to_angular(double mhz) { return kTwoPi * mhz * 1e6; }
constexpr double angular_to_mhz(double w) { return w / (kTwoPi * 1e6); }
constexpr double angular_to_hz(double w) { return w / kTwoPi; }
constexpr double w_per_cm2_to_si(double i) { return i * 1e4; }

}  // namespace eit::units
