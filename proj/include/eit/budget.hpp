#pragma once

#include <optional>
#include <vector>

namespace eit::budget {

struct BudgetInput {
  double wavelength = 852.35e-9;  // m
  double lattice_spacing = 5e-6;  // m
  double photons = 100.0;
  double suppression = 8e-5;
  int dimensionality = 3;
  // Exactly one of these is set. Shell counts may be fractional; the last
  // shell then contributes its fraction of a full shell.
  std::optional<double> n_shells;
  std::optional<double> error_target;

  // Throws ConfigError on non-positive values, wrong dimensionality, or
  // not exactly one of n_shells / error_target.
  void validate() const;
};

struct BudgetResult {
  std::vector<double> per_shell_errors;  // shells 1..ceil(n)
  double total_error = 0.0;
  double n_shells = 0.0;
  long long atoms = 0;  // floor(2 n)^d
};

// sigma = lambda^2 / 2 pi.
double resonant_cross_section(double wavelength);
// sigma / (4 pi r^2).
double rescatter_probability(double wavelength, double distance);

// Error contributed by shell i (1-based) at radius i L.
double shell_error(const BudgetInput& in, int shell);

BudgetResult total_error(const BudgetInput& in);
BudgetResult max_array(const BudgetInput& in);

long long atoms_for_shells(double n_shells, int dimensionality);

}  // namespace eit::budget
