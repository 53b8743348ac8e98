#include "eit/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "eit/errors.hpp"

namespace eit {

void SchemeConfig::validate() const {
  detection.validate();
  protection.validate();
  if (manifold_tier(detection.lower_manifold) != Tier::Ground ||
      manifold_tier(detection.upper_manifold) != Tier::Intermediate) {
    throw ConfigError(name + ": detection must couple the ground and intermediate manifolds");
  }
  if (protection.lower_manifold != detection.upper_manifold ||
      manifold_tier(protection.upper_manifold) != Tier::Excited) {
    throw ConfigError(name + ": protection must couple the detection upper manifold to the "
                             "excited manifold (ladder configuration)");
  }
  for (Manifold m : {detection.lower_manifold, detection.upper_manifold,
                     protection.upper_manifold}) {
    if (!registry.includes(m)) {
      throw ConfigError(name + ": registry lacks manifold " + std::string(manifold_name(m)));
    }
  }
  if (detection.role != FieldRole::Detection || protection.role != FieldRole::Protection) {
    throw ConfigError(name + ": field roles are swapped");
  }
  if (manifold_tier(detected_state.manifold) != Tier::Ground || !registry.contains(detected_state)) {
    throw ConfigError(name + ": detected state " + detected_state.to_string() +
                      " must be a ground sublevel in the basis");
  }
  for (const auto& s : protected_states) {
    if (!registry.contains(s)) {
      throw ConfigError(name + ": protected state " + s.to_string() + " not in basis");
    }
  }
  for (const auto& s : watch_states) {
    if (!registry.contains(s)) {
      throw ConfigError(name + ": watch state " + s.to_string() + " not in basis");
    }
  }
  if (!std::isfinite(magnetic_field)) throw ConfigError(name + ": magnetic field not finite");
}

HermitianOperator::HermitianOperator(MatrixXc m, double tol) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::domain_error("operator is not square");
  const double scale = std::max(1.0, m_.norm());
  const double asym = (m_ - m_.adjoint()).norm();
  if (!(asym <= tol * scale)) {
    throw std::domain_error("operator is not Hermitian (||H - H^dagger|| = " +
                            std::to_string(asym) + ")");
  }
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
}

double rotating_frame_energy(const SchemeConfig& config, const StateLabel& s) {
  const auto& reg = config.registry;
  const auto& det = config.detection;
  const auto& pro = config.protection;
  double e = 0.0;
  switch (manifold_tier(s.manifold)) {
    case Tier::Ground:
      e = reg.hyperfine_shift(s) - reg.hyperfine_shift(det.reference_lower);
      break;
    case Tier::Intermediate:
      e = reg.hyperfine_shift(s) - reg.hyperfine_shift(det.reference_upper) - det.detuning;
      break;
    case Tier::Excited:
      e = reg.hyperfine_shift(s) - reg.hyperfine_shift(pro.reference_upper) +
          reg.hyperfine_shift(pro.reference_lower) - reg.hyperfine_shift(det.reference_upper) -
          det.detuning - pro.detuning;
      break;
  }
  return e + zeeman_shift(s, config.magnetic_field, reg);
}

namespace {

void add_couplings(const FieldSpec& field, const LevelRegistry& reg, MatrixXc& h) {
  if (field.intensity == 0.0) return;
  const auto& basis = reg.basis();
  for (std::size_t l = 0; l < basis.size(); ++l) {
    if (basis[l].manifold != field.lower_manifold) continue;
    for (std::size_t u = 0; u < basis.size(); ++u) {
      if (basis[u].manifold != field.upper_manifold) continue;
      if (std::abs(basis[u].mF.twice() - basis[l].mF.twice()) > 2) continue;
      const complex omega = rabi_frequency(field, basis[l], basis[u], reg);
      if (omega == complex(0.0)) continue;
      h(u, l) += 0.5 * omega;
      h(l, u) += 0.5 * std::conj(omega);
    }
  }
}

}  // namespace

HermitianOperator build_rwa_hamiltonian(const SchemeConfig& config) {
  config.validate();
  const auto& reg = config.registry;
  const auto n = static_cast<Eigen::Index>(reg.dimension());
  MatrixXc h = MatrixXc::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = rotating_frame_energy(config, reg.label(static_cast<std::size_t>(i)));
  }
  add_couplings(config.detection, reg, h);
  add_couplings(config.protection, reg, h);
  return HermitianOperator(std::move(h));
}

}  // namespace eit
