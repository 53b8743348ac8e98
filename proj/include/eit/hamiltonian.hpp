#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "eit/atom_data.hpp"
#include "eit/lightfield.hpp"

namespace eit {

using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

// How the unprotected (detected) state's scattering rate is summarized: a
// plateau mean for closed cycling transitions, or the extrapolated initial
// rate of an exponential decay for open transitions that pump away.
enum class RateMode { Constant, Exponential };

struct SchemeConfig {
  std::string name;
  LevelRegistry registry;
  FieldSpec detection;
  FieldSpec protection;
  double magnetic_field = 0.0;  // T
  std::vector<StateLabel> protected_states;
  StateLabel detected_state;
  std::vector<StateLabel> watch_states;
  RateMode detected_rate_mode = RateMode::Constant;

  // Ladder structure, state membership and field sanity. Throws ConfigError.
  void validate() const;
};

// Dense complex matrix checked to be Hermitian on construction.
class HermitianOperator {
 public:
  // Throws std::domain_error if ||M - M^dagger|| > tol * max(1, ||M||).
  explicit HermitianOperator(MatrixXc m, double tol = 1e-12);

  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  const MatrixXc& matrix() const { return m_; }

 private:
  MatrixXc m_;
};

// Time-independent rotating-frame Hamiltonian divided by hbar [rad/s].
//
// Frame: ground tier static, intermediate tier rotating at the detection
// frequency, excited tier at detection + protection. Diagonal entries are
// hyperfine offsets from the reference levels minus the accumulated
// detunings, plus linear Zeeman shifts; each field couples only its own
// manifold pair with Omega/2 (counter-rotating and cross terms dropped).
HermitianOperator build_rwa_hamiltonian(const SchemeConfig& config);

// Bare rotating-frame energy of one basis state (diagonal entry).
double rotating_frame_energy(const SchemeConfig& config, const StateLabel& s);

}  // namespace eit
