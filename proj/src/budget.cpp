#include "eit/budget.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "eit/errors.hpp"

namespace eit::budget {

namespace {

constexpr double kPi = std::numbers::pi;

// Shell error coefficient: 2D shells carry lambda^2 R gamma / (4 pi L^2) / i,
// 3D shells lambda^2 R gamma / (2 pi L^2) each.
double coefficient(const BudgetInput& in) {
  const double base = in.wavelength * in.wavelength * in.suppression * in.photons /
                      (in.lattice_spacing * in.lattice_spacing);
  return in.dimensionality == 2 ? base / (4.0 * kPi) : base / (2.0 * kPi);
}

constexpr double kEulerGamma = 0.57721566490153286;
// Beyond this many shells sums use the asymptotic harmonic series and
// per-shell lists are not materialized.
constexpr double kEnumerationLimit = 1e7;

double harmonic_asymptotic(double n) {
  return std::log(n) + kEulerGamma + 1.0 / (2.0 * n) - 1.0 / (12.0 * n * n);
}

double cumulative(const BudgetInput& in, double n) {
  const double c = coefficient(in);
  if (in.dimensionality == 3) return c * n;
  if (n > kEnumerationLimit) return c * harmonic_asymptotic(n);
  const auto whole = static_cast<int>(std::floor(n));
  double sum = 0.0;
  for (int i = 1; i <= whole; ++i) sum += 1.0 / i;
  const double frac = n - whole;
  if (frac > 0.0) sum += frac / (whole + 1);
  return c * sum;
}

}  // namespace

void BudgetInput::validate() const {
  if (!(wavelength > 0.0) || !(lattice_spacing > 0.0) || !(photons > 0.0) ||
      !(suppression >= 0.0)) {
    throw ConfigError("budget inputs must be positive");
  }
  if (dimensionality != 2 && dimensionality != 3) {
    throw ConfigError("dimensionality must be 2 or 3");
  }
  if (n_shells.has_value() == error_target.has_value()) {
    throw ConfigError("give exactly one of shell count and error target");
  }
  if (n_shells && !(*n_shells >= 1.0)) throw ConfigError("shell count must be >= 1");
  if (error_target && !(*error_target > 0.0)) throw ConfigError("error target must be positive");
}

double resonant_cross_section(double wavelength) {
  if (!(wavelength >= 0.0)) throw std::domain_error("wavelength must be non-negative");
  return wavelength * wavelength / (2.0 * kPi);
}

double rescatter_probability(double wavelength, double distance) {
  if (!(distance > 0.0)) throw std::domain_error("distance must be positive");
  return resonant_cross_section(wavelength) / (4.0 * kPi * distance * distance);
}

double shell_error(const BudgetInput& in, int shell) {
  if (shell < 1) throw std::domain_error("shells are numbered from 1");
  const double c = coefficient(in);
  return in.dimensionality == 2 ? c / shell : c;
}

long long atoms_for_shells(double n_shells, int dimensionality) {
  const double side = std::floor(2.0 * n_shells);
  const double atoms = std::pow(side, dimensionality);
  if (atoms >= 9.2e18) return std::numeric_limits<long long>::max();
  const auto s = static_cast<long long>(side);
  return dimensionality == 2 ? s * s : s * s * s;
}

BudgetResult total_error(const BudgetInput& in) {
  in.validate();
  if (!in.n_shells) throw ConfigError("total_error needs a shell count");
  BudgetResult r;
  r.n_shells = *in.n_shells;
  if (r.n_shells > kEnumerationLimit) {
    throw ConfigError("shell count too large to enumerate per shell");
  }
  const auto whole = static_cast<int>(std::floor(r.n_shells));
  for (int i = 1; i <= whole; ++i) r.per_shell_errors.push_back(shell_error(in, i));
  const double frac = r.n_shells - whole;
  if (frac > 0.0) r.per_shell_errors.push_back(frac * shell_error(in, whole + 1));
  for (double e : r.per_shell_errors) r.total_error += e;
  r.atoms = atoms_for_shells(r.n_shells, in.dimensionality);
  return r;
}

BudgetResult max_array(const BudgetInput& in) {
  in.validate();
  if (!in.error_target) throw ConfigError("max_array needs an error target");
  const double target = *in.error_target;
  BudgetResult r;
  if (cumulative(in, 1.0) > target) {
    // Not even the first shell fits.
    r.n_shells = 0.0;
    return r;
  }
  if (coefficient(in) == 0.0) throw ConfigError("zero shell error never reaches the target");
  double n = 0.0;
  if (in.dimensionality == 3) {
    n = target / coefficient(in);
  } else {
    // Whole shells first, then the fraction of the next one that still fits.
    const double c = coefficient(in);
    double sum = 0.0;
    int i = 0;
    if (cumulative(in, kEnumerationLimit) < target) {
      // Invert the asymptotic series by bisection on log n.
      double lo = std::log(kEnumerationLimit), hi = lo;
      while (cumulative(in, std::exp(hi)) < target) hi *= 2.0;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (cumulative(in, std::exp(mid)) <= target ? lo : hi) = mid;
      }
      r.n_shells = std::exp(lo);
      r.total_error = cumulative(in, r.n_shells);
      r.atoms = atoms_for_shells(r.n_shells, 2);
      return r;
    }
    while (sum + c / (i + 1) <= target) {
      sum += c / (i + 1);
      ++i;
    }
    n = i + (target - sum) / (c / (i + 1));
  }
  BudgetInput with_n = in;
  with_n.error_target.reset();
  with_n.n_shells = n;
  r = total_error(with_n);
  return r;
}

}  // namespace eit::budget
