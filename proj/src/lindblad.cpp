#include "eit/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "eit/errors.hpp"
#include "eit/lightfield.hpp"

namespace eit {

namespace {

constexpr complex kI{0.0, 1.0};

using Triplet = Eigen::Triplet<complex>;

}  // namespace

MatrixXc DecayModel::decay_operator() const {
  const auto n = loss_rates.size();
  MatrixXc lambda = MatrixXc::Zero(n, n);
  for (const auto& j : jumps) lambda += MatrixXc(j.op.adjoint() * j.op);
  lambda.diagonal() += loss_rates.cast<complex>();
  return lambda;
}

DecayModel collapse_operators(const LevelRegistry& registry) {
  const auto n = static_cast<Eigen::Index>(registry.dimension());
  DecayModel model;
  model.loss_rates = Eigen::VectorXd::Zero(n);
  model.detection_weights = Eigen::VectorXd::Zero(n);
  model.upper_weights = Eigen::VectorXd::Zero(n);
  const auto& basis = registry.basis();

  for (Manifold upper : registry.included()) {
    const auto& md = registry.manifold(upper);
    if (md.decay_channels.empty()) continue;
    double simulated = 0.0;
    for (const auto& c : md.decay_channels) {
      if (registry.includes(c.target)) simulated += c.partial_rate;
    }
    if (simulated == 0.0) continue;
    // Decay into manifolds outside the model is folded into the simulated
    // channels so the manifold keeps its measured lifetime.
    const double rescale = md.natural_linewidth / simulated;
    const double norm = std::sqrt(md.J.twice() + 1.0);

    for (const auto& c : md.decay_channels) {
      if (!registry.includes(c.target)) continue;
      const double amp = std::sqrt(c.partial_rate * rescale) * norm / std::abs(c.reduced_element);
      for (int q = -1; q <= 1; ++q) {
        std::vector<Triplet> entries;
        for (Eigen::Index u = 0; u < n; ++u) {
          if (basis[u].manifold != upper) continue;
          for (Eigen::Index l = 0; l < n; ++l) {
            if (basis[l].manifold != c.target) continue;
            if (basis[u].mF.twice() != basis[l].mF.twice() + 2 * q) continue;
            const double d = hyperfine_dipole_element(basis[l], basis[u], q, registry);
            if (d != 0.0) entries.emplace_back(l, u, amp * d);
          }
        }
        if (entries.empty()) continue;
        JumpOperator j{SparseC(n, n), upper, c.target, q};
        j.op.setFromTriplets(entries.begin(), entries.end());
        j.op.makeCompressed();
        model.jumps.push_back(std::move(j));
      }
    }
  }

  Eigen::VectorXd captured = Eigen::VectorXd::Zero(n);
  for (const auto& j : model.jumps) {
    for (Eigen::Index col = 0; col < j.op.outerSize(); ++col) {
      for (SparseC::InnerIterator it(j.op, col); it; ++it) captured(col) += std::norm(it.value());
    }
  }
  for (Eigen::Index u = 0; u < n; ++u) {
    const auto& md = registry.manifold(basis[u].manifold);
    const double gamma = md.natural_linewidth;
    if (gamma == 0.0) continue;
    const double missing = gamma - captured(u);
    if (missing > 1e-12 * gamma) model.loss_rates(u) = missing;
    switch (manifold_tier(basis[u].manifold)) {
      case Tier::Intermediate: model.detection_weights(u) = gamma; break;
      case Tier::Excited: model.upper_weights(u) = gamma; break;
      case Tier::Ground: break;
    }
  }
  return model;
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(MatrixXc m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw std::domain_error("density matrix must be square");
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::domain_error("density matrix is not Hermitian");
  }
  m_ = 0.5 * (m_ + m_.adjoint()).eval();
  if (std::abs(trace() - 1.0) > 1e-8) throw std::domain_error("density matrix trace is not 1");
  if (min_eigenvalue() < -1e-8) throw std::domain_error("density matrix is not positive");
}

DensityMatrix DensityMatrix::pure(const LevelRegistry& registry, const StateLabel& s) {
  const auto n = static_cast<Eigen::Index>(registry.dimension());
  MatrixXc m = MatrixXc::Zero(n, n);
  const auto i = static_cast<Eigen::Index>(registry.index(s));
  m(i, i) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::mixture(const LevelRegistry& registry,
                                     const std::vector<std::pair<StateLabel, double>>& populations) {
  const auto n = static_cast<Eigen::Index>(registry.dimension());
  MatrixXc m = MatrixXc::Zero(n, n);
  for (const auto& [s, p] : populations) {
    if (p < 0.0) throw std::domain_error("negative population for " + s.to_string());
    const auto i = static_cast<Eigen::Index>(registry.index(s));
    m(i, i) += p;
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::unchecked(MatrixXc m) {
  if (m.size() > 0) m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m), Unchecked{});
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<MatrixXc> solver(m_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::swapped(std::size_t a, std::size_t b) const {
  MatrixXc m = m_;
  const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
  m.row(ia).swap(m.row(ib));
  m.col(ia).swap(m.col(ib));
  return DensityMatrix(std::move(m), Unchecked{});
}

double RateTrace::photons() const {
  double sum = 0.0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    sum += 0.5 * (times[k] - times[k - 1]) * (rates[k] + rates[k - 1]);
  }
  return sum;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> sample_times(double duration, double dt) {
  std::vector<double> t{0.0};
  const auto full = static_cast<std::size_t>(std::floor(duration / dt * (1.0 + 1e-12)));
  for (std::size_t k = 1; k <= full; ++k) t.push_back(static_cast<double>(k) * dt);
  if (duration - t.back() > 1e-9 * duration) t.push_back(duration);
  else t.back() = duration;
  return t;
}

struct Generator {
  SparseC k;  // H - (i/2) Lambda
  std::vector<SparseC> jumps;
};

Generator make_generator(const HermitianOperator& h, const DecayModel& decay) {
  MatrixXc k = h.matrix() - 0.5 * kI * decay.decay_operator();
  Generator g;
  g.k = k.sparseView(0.0, 0.0);
  g.k.makeCompressed();
  for (const auto& j : decay.jumps) g.jumps.push_back(j.op);
  return g;
}

// Invokes emit(i, j, value) for every entry of L(E_ab) scaled by v.
template <class Emit>
void liouvillian_of_unit(const Generator& g, Eigen::Index a, Eigen::Index b, complex v,
                         Emit&& emit) {
  for (SparseC::InnerIterator it(g.k, a); it; ++it) emit(it.row(), b, -kI * it.value() * v);
  for (SparseC::InnerIterator it(g.k, b); it; ++it) emit(a, it.row(), kI * v * std::conj(it.value()));
  for (const auto& l : g.jumps) {
    for (SparseC::InnerIterator ia(l, a); ia; ++ia) {
      for (SparseC::InnerIterator ib(l, b); ib; ++ib) {
        emit(ia.row(), ib.row(), ia.value() * v * std::conj(ib.value()));
      }
    }
  }
}

// Real parameterization of the Hermitian density matrix restricted to the
// unordered index pairs reachable from the initial support.
struct Subspace {
  Eigen::Index n = 0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;  // i <= j, sorted
  std::vector<Eigen::Index> first_param;                     // per pair
  std::vector<Eigen::Index> pair_of;                         // n*n -> pair index or -1
  Eigen::Index parameters = 0;

  Eigen::Index key(Eigen::Index i, Eigen::Index j) const { return i <= j ? i * n + j : j * n + i; }
  Eigen::Index find(Eigen::Index i, Eigen::Index j) const { return pair_of[key(i, j)]; }
};

Subspace reachable_subspace(const Generator& g, const MatrixXc& rho0) {
  Subspace s;
  s.n = rho0.rows();
  const Eigen::Index n = s.n;
  std::vector<char> seen(static_cast<std::size_t>(n * n), 0);
  std::deque<std::pair<Eigen::Index, Eigen::Index>> queue;
  auto visit = [&](Eigen::Index i, Eigen::Index j, complex) {
    if (i > j) std::swap(i, j);
    auto& flag = seen[static_cast<std::size_t>(i * n + j)];
    if (!flag) {
      flag = 1;
      queue.emplace_back(i, j);
    }
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (rho0(i, j) != complex(0.0)) visit(i, j, 0.0);
    }
  }
  while (!queue.empty()) {
    const auto [a, b] = queue.front();
    queue.pop_front();
    liouvillian_of_unit(g, a, b, 1.0, visit);
    if (a != b) liouvillian_of_unit(g, b, a, 1.0, visit);
  }
  s.pair_of.assign(static_cast<std::size_t>(n * n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      if (!seen[static_cast<std::size_t>(i * n + j)]) continue;
      s.pair_of[static_cast<std::size_t>(i * n + j)] = static_cast<Eigen::Index>(s.pairs.size());
      s.pairs.emplace_back(i, j);
      s.first_param.push_back(s.parameters);
      s.parameters += (i == j) ? 1 : 2;
    }
  }
  return s;
}

Eigen::MatrixXd real_generator(const Generator& g, const Subspace& s) {
  const Eigen::Index p = s.parameters;
  Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(p, p);
  MatrixXc scratch = MatrixXc::Zero(s.n, s.n);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> touched;
  auto accumulate = [&](Eigen::Index i, Eigen::Index j, complex v) {
    if (i > j) return;  // lower triangle mirrors the upper one
    if (scratch(i, j) == complex(0.0)) touched.emplace_back(i, j);
    scratch(i, j) += v;
    if (scratch(i, j) == complex(0.0)) scratch(i, j) = complex(0.0, 1e-300);
  };
  auto flush = [&](Eigen::Index column) {
    for (const auto& [i, j] : touched) {
      const complex v = scratch(i, j);
      scratch(i, j) = 0.0;
      const Eigen::Index pair = s.find(i, j);
      if (pair < 0) throw std::logic_error("Liouvillian leaves the reachable subspace");
      const Eigen::Index row = s.first_param[static_cast<std::size_t>(pair)];
      gen(row, column) += v.real();
      if (i != j) gen(row + 1, column) += v.imag();
    }
    touched.clear();
  };
  for (std::size_t k = 0; k < s.pairs.size(); ++k) {
    const auto [a, b] = s.pairs[k];
    const Eigen::Index col = s.first_param[k];
    if (a == b) {
      liouvillian_of_unit(g, a, a, 1.0, accumulate);
      flush(col);
    } else {
      // Re part: E_ab + E_ba; Im part: i E_ab - i E_ba.
      liouvillian_of_unit(g, a, b, 1.0, accumulate);
      liouvillian_of_unit(g, b, a, 1.0, accumulate);
      flush(col);
      liouvillian_of_unit(g, a, b, kI, accumulate);
      liouvillian_of_unit(g, b, a, -kI, accumulate);
      flush(col + 1);
    }
  }
  return gen;
}

Eigen::VectorXd pack(const Subspace& s, const MatrixXc& rho) {
  Eigen::VectorXd x(s.parameters);
  for (std::size_t k = 0; k < s.pairs.size(); ++k) {
    const auto [i, j] = s.pairs[k];
    const Eigen::Index p = s.first_param[k];
    if (i == j) {
      x(p) = rho(i, i).real();
    } else {
      x(p) = rho(i, j).real();
      x(p + 1) = rho(i, j).imag();
    }
  }
  return x;
}

MatrixXc unpack(const Subspace& s, const Eigen::VectorXd& x) {
  MatrixXc rho = MatrixXc::Zero(s.n, s.n);
  for (std::size_t k = 0; k < s.pairs.size(); ++k) {
    const auto [i, j] = s.pairs[k];
    const Eigen::Index p = s.first_param[k];
    if (i == j) {
      rho(i, i) = x(p);
    } else {
      rho(i, j) = complex(x(p), x(p + 1));
      rho(j, i) = std::conj(rho(i, j));
    }
  }
  return rho;
}

class TraceRecorder {
 public:
  TraceRecorder(RateTrace& trace, const DecayModel& decay, std::size_t samples, bool invariants)
      : trace_(trace), decay_(decay), invariants_(invariants) {
    trace_.populations.resize(static_cast<Eigen::Index>(samples), decay.loss_rates.size());
    trace_.min_eigenvalue = 0.0;
  }

  void record(std::size_t k, double t, const Eigen::VectorXd& pops, const MatrixXc* rho) {
    trace_.times.push_back(t);
    trace_.populations.row(static_cast<Eigen::Index>(k)) = pops.transpose();
    trace_.rates.push_back(std::max(0.0, decay_.detection_weights.dot(pops)));
    trace_.upper_rates.push_back(std::max(0.0, decay_.upper_weights.dot(pops)));
    if (invariants_ && rho != nullptr) {
      const double tr = rho->trace().real();
      trace_.max_trace_error = std::max(trace_.max_trace_error, std::abs(tr - 1.0));
      trace_.max_hermiticity_error = std::max(
          trace_.max_hermiticity_error, (*rho - rho->adjoint()).cwiseAbs().maxCoeff());
      Eigen::SelfAdjointEigenSolver<MatrixXc> es(*rho, Eigen::EigenvaluesOnly);
      trace_.min_eigenvalue = std::min(trace_.min_eigenvalue, es.eigenvalues().minCoeff());
    }
  }

 private:
  RateTrace& trace_;
  const DecayModel& decay_;
  bool invariants_;
};

void evolve_propagator(const MatrixXc& rho0, const Generator& g, const std::vector<double>& times,
                       const EvolveOptions& options, const DecayModel& decay, RateTrace& trace) {
  const Subspace s = reachable_subspace(g, rho0);
  trace.subspace_dimension = static_cast<std::size_t>(s.parameters);
  const Eigen::MatrixXd gen = real_generator(g, s);
  const Eigen::Index n = s.n;

  std::vector<Eigen::Index> diag_param(static_cast<std::size_t>(n), -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index pair = s.find(i, i);
    if (pair >= 0) diag_param[i] = s.first_param[static_cast<std::size_t>(pair)];
  }
  auto populations = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (diag_param[i] >= 0) p(i) = x(diag_param[i]);
    }
    return p;
  };

  TraceRecorder rec(trace, decay, times.size(), options.track_invariants);
  Eigen::VectorXd x = pack(s, rho0);
  auto record = [&](std::size_t k) {
    if (options.track_invariants) {
      const MatrixXc rho = unpack(s, x);
      rec.record(k, times[k], populations(x), &rho);
    } else {
      rec.record(k, times[k], populations(x), nullptr);
    }
  };
  record(0);

  double cached_dt = -1.0;
  Eigen::MatrixXd step;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double dt = times[k] - times[k - 1];
    if (std::abs(dt - cached_dt) > 1e-12 * dt) {
      step = (gen * dt).exp();
      if (!step.allFinite()) throw NumericalError("propagator is not finite");
      cached_dt = dt;
    }
    x = step * x;
    record(k);
  }
  trace.final_state = DensityMatrix::unchecked(unpack(s, x));
}

void evolve_rk(const MatrixXc& rho0, const Generator& g, const std::vector<double>& times,
               const EvolveOptions& options, const DecayModel& decay, RateTrace& trace) {
  auto rhs = [&g](const MatrixXc& r) -> MatrixXc {
    const MatrixXc kr = g.k * r;
    MatrixXc out = -kI * (kr - kr.adjoint());
    for (const auto& l : g.jumps) {
      const MatrixXc lr = l * r;
      out += lr * l.adjoint();
    }
    return out;
  };
  ode::DormandPrince45<MatrixXc, decltype(rhs)> solver(rhs, options.tolerances);
  ode::StepStats stats;
  TraceRecorder rec(trace, decay, times.size(), options.track_invariants);
  MatrixXc rho = rho0;
  auto record = [&](std::size_t k) {
    const Eigen::VectorXd p = rho.diagonal().real();
    rec.record(k, times[k], p, &rho);
  };
  record(0);
  const double norm = std::max(1.0, g.k.cwiseAbs().toDense().rowwise().sum().maxCoeff());
  double h = std::min(times.size() > 1 ? times[1] : 1.0, 0.5 / norm);
  for (std::size_t k = 1; k < times.size(); ++k) {
    solver.integrate(rho, times[k - 1], times[k], h, stats);
    record(k);
  }
  trace.subspace_dimension = static_cast<std::size_t>(rho0.size());
  trace.final_state = DensityMatrix::unchecked(rho);
}

}  // namespace

RateTrace evolve(const DensityMatrix& rho0, const HermitianOperator& h, const DecayModel& decay,
                 double duration, double sample_every, const EvolveOptions& options) {
  if (!(duration > 0.0)) throw std::domain_error("evolution duration must be positive");
  if (!(sample_every > 0.0)) throw std::domain_error("sample interval must be positive");
  if (rho0.dimension() != h.dimension() ||
      static_cast<Eigen::Index>(h.dimension()) != decay.loss_rates.size()) {
    throw std::domain_error("density matrix, Hamiltonian and decay model dimensions differ");
  }
  const Generator g = make_generator(h, decay);
  const auto times = sample_times(duration, std::min(sample_every, duration));
  RateTrace trace;
  trace.times.reserve(times.size());
  if (options.method == EvolveMethod::Propagator) {
    evolve_propagator(rho0.matrix(), g, times, options, decay, trace);
  } else {
    evolve_rk(rho0.matrix(), g, times, options, decay, trace);
  }
  return trace;
}

double steady_rate(const RateTrace& trace, double settle_window, SteadyMode mode) {
  if (!(settle_window > 0.0)) throw std::domain_error("settle window must be positive");
  if (trace.times.size() < 2) throw std::domain_error("trace has fewer than two samples");
  const double t0 = trace.times.front(), t1 = trace.times.back();
  if (t1 - t0 < 2.0 * settle_window * (1.0 - 1e-9)) {
    throw std::domain_error("trace shorter than twice the settle window");
  }
  const auto& t = trace.times;
  const auto& r = trace.rates;
  if (mode == SteadyMode::WindowMean) {
    const double start = t1 - settle_window;
    double area = 0.0;
    for (std::size_t k = 1; k < t.size(); ++k) {
      if (t[k] <= start) continue;
      double ta = t[k - 1], ra = r[k - 1];
      if (ta < start) {
        const double w = (start - ta) / (t[k] - ta);
        ra = ra + w * (r[k] - ra);
        ta = start;
      }
      area += 0.5 * (t[k] - ta) * (ra + r[k]);
    }
    return area / settle_window;
  }
  // Least squares on log(rate) after the transient.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] < t0 + settle_window * (1.0 - 1e-9) || !(r[k] > 0.0)) continue;
    const double x = t[k] - t0, y = std::log(r[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::domain_error("too few positive samples for an exponential fit");
  const double mm = static_cast<double>(m);
  const double denom = mm * sxx - sx * sx;
  if (denom <= 0.0) throw std::domain_error("degenerate exponential fit");
  const double slope = (mm * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / mm;
  return std::exp(intercept);
}

double detected_state_rate(const SchemeConfig& config, const SuppressionOptions& options) {
  const auto h = build_rwa_hamiltonian(config);
  const auto decay = collapse_operators(config.registry);
  const auto trace = evolve(DensityMatrix::pure(config.registry, config.detected_state), h, decay,
                            options.duration, options.sample_every, options.evolve);
  return steady_rate(trace, options.settle_window,
                     config.detected_rate_mode == RateMode::Constant
                         ? SteadyMode::WindowMean
                         : SteadyMode::ExponentialInitial);
}

SuppressionResult suppression_factor(const SchemeConfig& config, double protection_intensity,
                                     const SuppressionOptions& options,
                                     const std::optional<StateLabel>& target) {
  SchemeConfig cfg = config;
  cfg.protection.intensity = protection_intensity;
  cfg.validate();
  if (!target && cfg.protected_states.empty()) throw ConfigError(cfg.name + ": no protected state");
  const StateLabel protected_state = target.value_or(cfg.protected_states.front());

  const auto h = build_rwa_hamiltonian(cfg);
  const auto decay = collapse_operators(cfg.registry);
  const auto trace = evolve(DensityMatrix::pure(cfg.registry, protected_state), h, decay,
                            options.duration, options.sample_every, options.evolve);
  SuppressionResult out;
  out.protected_rate = steady_rate(trace, options.settle_window, SteadyMode::WindowMean);
  out.protected_rate_final = trace.rates.back();
  {
    RateTrace upper = trace;
    upper.rates = trace.upper_rates;
    out.protected_upper_rate = steady_rate(upper, options.settle_window, SteadyMode::WindowMean);
  }
  out.detected_rate = detected_state_rate(cfg, options);
  if (!(out.detected_rate > 0.0)) {
    throw NumericalError(cfg.name + ": detected-state scattering rate vanishes", out.detected_rate);
  }
  out.r = out.protected_rate / out.detected_rate;
  out.r_final = out.protected_rate_final / out.detected_rate;
  return out;
}

}  // namespace eit
