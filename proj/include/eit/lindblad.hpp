#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "eit/hamiltonian.hpp"
#include "eit/ode.hpp"

namespace eit {

using SparseC = Eigen::SparseMatrix<complex>;

// One spontaneous-emission channel: decay from `from` to `to` emitting a
// photon of spherical polarization q.
struct JumpOperator {
  SparseC op;
  Manifold from;
  Manifold to;
  int q = 0;
};

struct DecayModel {
  std::vector<JumpOperator> jumps;
  // Decay of truncated-basis states into sublevels outside the basis; enters
  // only the anticommutator, so the trace is not conserved when nonzero.
  Eigen::VectorXd loss_rates;
  // Per-state weights turning populations into photon rates: total decay rate
  // of intermediate-tier states (detection wavelength) and of excited-tier
  // states (upper leg).
  Eigen::VectorXd detection_weights;
  Eigen::VectorXd upper_weights;

  // sum_k L_k^dagger L_k + diag(loss_rates).
  MatrixXc decay_operator() const;
};

// Jump operators from the registry's decay tables. Amplitudes are
// sqrt(rate) times the dipole element normalized by |<J'||d||J>|/sqrt(2J'+1),
// so each complete upper manifold decays at its full rate. The excited
// manifold's decay into the simulated intermediate manifold is scaled up to
// the full inverse lifetime.
DecayModel collapse_operators(const LevelRegistry& registry);

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace (1e-8) and positivity (-1e-8).
  explicit DensityMatrix(MatrixXc m);
  static DensityMatrix pure(const LevelRegistry& registry, const StateLabel& s);
  // Diagonal state with the given populations (must sum to 1).
  static DensityMatrix mixture(const LevelRegistry& registry,
                               const std::vector<std::pair<StateLabel, double>>& populations);
  // Evolution output; only Hermiticity is enforced (trace may be < 1 for
  // truncated bases).
  static DensityMatrix unchecked(MatrixXc m);

  const MatrixXc& matrix() const { return m_; }
  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  double trace() const { return m_.trace().real(); }
  double population(std::size_t i) const { return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real(); }
  double min_eigenvalue() const;

  // Exchanges the roles of basis states a and b (ideal population swap).
  DensityMatrix swapped(std::size_t a, std::size_t b) const;

 private:
  struct Unchecked {};
  DensityMatrix(MatrixXc m, Unchecked) : m_(std::move(m)) {}
  MatrixXc m_;
};

enum class EvolveMethod {
  // exp(L dt) on the coherence subspace reachable from rho0.
  Propagator,
  // Dormand-Prince 5(4) on the full density matrix.
  AdaptiveRK,
};

struct EvolveOptions {
  EvolveMethod method = EvolveMethod::Propagator;
  ode::Tolerances tolerances{};
  // Record trace / Hermiticity / min-eigenvalue at every sample.
  bool track_invariants = false;
};

struct RateTrace {
  std::vector<double> times;        // s
  std::vector<double> rates;        // detection-leg photons/s
  std::vector<double> upper_rates;  // excited-tier emission photons/s
  Eigen::MatrixXd populations;      // (sample, basis state)
  DensityMatrix final_state = DensityMatrix::unchecked(MatrixXc());

  // Invariant diagnostics (filled when tracked).
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t subspace_dimension = 0;

  // Detection photons emitted between the first and last sample
  // (trapezoid rule).
  double photons() const;
};

// Integrates d rho/dt = -i[H, rho] + sum_k (L rho L^dag - {L^dag L, rho}/2)
// with H in rad/s. Samples at t = 0, dt, 2 dt, ... and at `duration`.
RateTrace evolve(const DensityMatrix& rho0, const HermitianOperator& h, const DecayModel& decay,
                 double duration, double sample_every, const EvolveOptions& options = {});

enum class SteadyMode {
  // Mean over the final settle window.
  WindowMean,
  // Exponential fit after the first settle window, extrapolated back to the
  // start of the trace.
  ExponentialInitial,
};

double steady_rate(const RateTrace& trace, double settle_window,
                   SteadyMode mode = SteadyMode::WindowMean);

struct SuppressionOptions {
  double duration = 3e-6;
  double sample_every = 2e-9;
  double settle_window = 500e-9;
  EvolveOptions evolve{};
};

struct SuppressionResult {
  double r = 0.0;                     // window-mean protected rate / detected rate
  double r_final = 0.0;               // last-sample protected rate / detected rate
  double protected_rate = 0.0;        // photons/s
  double protected_rate_final = 0.0;  // photons/s
  double protected_upper_rate = 0.0;  // excited-tier emission, photons/s
  double detected_rate = 0.0;         // photons/s
};

// Protected-state rate over the detected-state rate under the same detection
// field, with the protection beam at `protection_intensity` [W/cm^2].
// `target` overrides the protected state (defaults to the first one).
SuppressionResult suppression_factor(const SchemeConfig& config, double protection_intensity,
                                     const SuppressionOptions& options = {},
                                     const std::optional<StateLabel>& target = std::nullopt);

// Steady rate of the detected state alone (its mode follows the config).
double detected_state_rate(const SchemeConfig& config, const SuppressionOptions& options = {});

}  // namespace eit
