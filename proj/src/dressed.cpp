#include "eit/dressed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "eit/errors.hpp"
#include "eit/parallel.hpp"
#include "eit/units.hpp"

namespace eit {

Eigensystem eigensystem(const HermitianOperator& h) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("Hermitian eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigensystem eigensystem(const MatrixXc& h) { return eigensystem(HermitianOperator(h)); }

double nonground_population(const HermitianOperator& h, const LevelRegistry& registry,
                            const StateLabel& target) {
  if (!registry.contains(target)) {
    throw std::domain_error("target " + target.to_string() + " not in basis");
  }
  if (h.dimension() != registry.dimension()) {
    throw std::domain_error("operator dimension does not match the registry");
  }
  const auto t = static_cast<Eigen::Index>(registry.index(target));
  const Eigensystem es = eigensystem(h);
  const auto n = es.vectors.cols();

  std::vector<Eigen::Index> ground;
  for (std::size_t i = 0; i < registry.dimension(); ++i) {
    if (manifold_tier(registry.label(i).manifold) == Tier::Ground) {
      ground.push_back(static_cast<Eigen::Index>(i));
    }
  }
  double best = -1.0;
  for (Eigen::Index k = 0; k < n; ++k) best = std::max(best, std::norm(es.vectors(t, k)));

  double chosen = best;
  double least_excited = 2.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double overlap = std::norm(es.vectors(t, k));
    if (overlap < best - 1e-9) continue;
    double in_ground = 0.0;
    for (auto g : ground) in_ground += std::norm(es.vectors(g, k));
    const double outside = 1.0 - in_ground;
    if (outside < least_excited) {
      least_excited = outside;
      chosen = overlap;
    }
  }
  return std::clamp(1.0 - chosen, 0.0, 1.0);
}

ProtectionMap protection_map(const SchemeConfig& config, const std::vector<double>& detunings,
                             const std::vector<double>& intensities, const StateLabel& target,
                             unsigned threads) {
  if (detunings.empty() || intensities.empty()) throw ConfigError("protection map grids are empty");
  auto increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
  };
  if (!increasing(detunings) || !increasing(intensities)) {
    throw ConfigError("protection map axes must be strictly increasing");
  }
  ProtectionMap map{detunings, intensities,
                    Eigen::MatrixXd(static_cast<Eigen::Index>(intensities.size()),
                                    static_cast<Eigen::Index>(detunings.size()))};
  const std::size_t nd = detunings.size();
  parallel_for(intensities.size() * nd, threads, [&](std::size_t k) {
    const std::size_t i = k / nd, j = k % nd;
    SchemeConfig point = config;
    point.detection.detuning = detunings[j];
    point.protection.intensity = intensities[i];
    map.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
        nonground_population(build_rwa_hamiltonian(point), point.registry, target);
  });
  return map;
}

std::vector<double> default_detuning_grid() {
  std::vector<double> grid(121);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = units::mhz_to_angular(-300.0 + 5.0 * static_cast<double>(i));
  }
  return grid;
}

std::vector<double> default_intensity_grid() {
  std::vector<double> grid(61);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = std::pow(10.0, -1.0 + 5.0 * static_cast<double>(i) / 60.0);
  }
  return grid;
}

}  // namespace eit
