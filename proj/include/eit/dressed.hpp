#pragma once

#include <vector>

#include <Eigen/Dense>

#include "eit/hamiltonian.hpp"

namespace eit {

// Eigenvalues ascending [rad/s]; eigenvectors are the matching columns.
struct Eigensystem {
  Eigen::VectorXd values;
  MatrixXc vectors;
};

Eigensystem eigensystem(const HermitianOperator& h);
// Checks Hermiticity first (std::domain_error otherwise).
Eigensystem eigensystem(const MatrixXc& h);

// 1 - max_i |<psi_i|target>|^2 over the dressed states psi_i. Near-ties
// (within 1e-9) resolve to the eigenvector with the least population outside
// the ground tier.
double nonground_population(const HermitianOperator& h, const LevelRegistry& registry,
                            const StateLabel& target);

struct ProtectionMap {
  std::vector<double> detuning_axis;   // rad/s
  std::vector<double> intensity_axis;  // W/cm^2
  Eigen::MatrixXd values;              // (intensity index, detuning index)
};

// Scans detection detuning and protection intensity, rebuilding the
// Hamiltonian at each point.
ProtectionMap protection_map(const SchemeConfig& config, const std::vector<double>& detunings,
                             const std::vector<double>& intensities, const StateLabel& target,
                             unsigned threads = 1);

// Default axes: +-2pi*300 MHz in 121 steps; 1e-1..1e4 W/cm^2 in 61 log steps.
std::vector<double> default_detuning_grid();
std::vector<double> default_intensity_grid();

}  // namespace eit
