#include "spinbus/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "spinbus/effective.hpp"
#include "spinbus/errors.hpp"
#include "spinbus/observables.hpp"

namespace spinbus {

namespace {
using cplx = std::complex<double>;
}

KrylovPropagator::KrylovPropagator(const HamiltonianOperator& op, PropagatorOptions opts)
    : op_(op), opts_(opts) {
  if (!(opts_.tol > 0.0)) throw InvalidArgument("propagator tol must be > 0");
  if (opts_.max_krylov < 2) throw InvalidArgument("max_krylov must be >= 2");
}

bool KrylovPropagator::try_step(const ComplexState& psi, double h, ComplexState& out, int& used) {
  const double beta0 = psi.norm();
  if (beta0 == 0.0) {
    out = psi;
    used = 0;
    return true;
  }
  const int max_m = static_cast<int>(std::min<Eigen::Index>(opts_.max_krylov, op_.dim()));
  krylov_.resize(static_cast<std::size_t>(max_m) + 1);
  std::vector<double> alpha, beta;
  krylov_[0] = psi / beta0;
  ComplexVector w;

  auto small_exp = [&](int m) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::MatrixXd& q = es.eigenvectors();
    Eigen::VectorXcd phase(m);
    for (int i = 0; i < m; ++i) phase[i] = std::exp(cplx(0.0, -h * es.eigenvalues()[i])) * q(0, i);
    return Eigen::VectorXcd(q.cast<cplx>() * phase);
  };
  auto assemble = [&](const Eigen::VectorXcd& y) {
    out = ComplexVector::Zero(psi.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) out += y[i] * krylov_[static_cast<std::size_t>(i)];
    out *= beta0;
  };

  for (int j = 0; j < max_m; ++j) {
    op_.apply(krylov_[j], w);
    ++matvecs_;
    const double a = krylov_[j].dot(w).real();
    w -= a * krylov_[j];
    if (j > 0) w -= beta[j - 1] * krylov_[j - 1];
    // One local pass keeps the three-term recurrence honest.
    const cplx c = krylov_[j].dot(w);
    w -= c * krylov_[j];
    alpha.push_back(a + c.real());
    const double b = w.norm();
    beta.push_back(b);
    const int m = j + 1;

    const bool invariant = b <= 1e-13 * std::max(1.0, std::abs(alpha.back()));
    if (invariant || m == max_m || m % 3 == 0) {
      const Eigen::VectorXcd y = small_exp(m);
      const double err = beta0 * b * std::abs(y[m - 1]);
      if (invariant || err <= opts_.tol) {
        assemble(y);
        used = m;
        return true;
      }
    }
    if (m < max_m) krylov_[m] = w / b;
  }
  used = max_m;
  return false;
}

void KrylovPropagator::advance(ComplexState& psi, double dt) {
  if (psi.size() != op_.dim()) throw DimensionMismatch("state length does not match operator");
  if (dt == 0.0) return;
  const double sign = dt > 0 ? 1.0 : -1.0;
  const double total = std::abs(dt);
  if (step_ <= 0.0) step_ = total;
  const double smallest = total / std::ldexp(1.0, opts_.max_halvings);

  double done = 0.0;
  ComplexState next;
  while (done < total) {
    const double remaining = total - done;
    const bool clipped = step_ >= remaining;
    const double h = clipped ? remaining : step_;
    int used = 0;
    if (try_step(psi, sign * h, next, used)) {
      psi.swap(next);
      ++steps_;
      // Make the final clipped step land exactly on the target time.
      done = clipped ? total : done + h;
      if (!clipped && used < opts_.max_krylov / 2) step_ *= 1.5;
    } else {
      step_ = 0.5 * h;
      if (step_ < smallest)
        throw SolverError("Krylov propagator did not converge after " +
                              std::to_string(opts_.max_halvings) + " step halvings",
                          0.0);
    }
  }
}

ComplexState evolve(const HamiltonianOperator& op, const ComplexState& psi, double dt, double tol) {
  PropagatorOptions opts;
  opts.tol = tol;
  KrylovPropagator prop(op, opts);
  ComplexState out = psi;
  prop.advance(out, dt);
  return out;
}

double effective_transfer(double j_eff, double t) {
  const double s = std::sin(0.5 * j_eff * t);
  return s * s;
}

double characteristic_time(const LadderSpec& spec, const SolverOptions& opts) {
  spec.validate();
  if (spec.j_probe == 0.0) throw NoTransferChannel("no transfer channel: j_probe = 0");
  const double j_eff = jeff_gap_splitting(spec, opts).j_eff;
  if (std::abs(j_eff) < 1e-14) throw NoTransferChannel("no transfer channel: j_eff vanishes");
  return std::numbers::pi / std::abs(j_eff);
}

TransferCurve transfer_experiment(const LadderSpec& spec, double t_max, int n_samples,
                                  const SolverOptions& opts, const PropagatorOptions& prop) {
  spec.validate();
  if (n_samples < 2) throw InvalidArgument("n_samples must be >= 2");

  TransferCurve curve;
  if (spec.j_probe > 0.0) curve.j_eff_used = jeff_gap_splitting(spec, opts).j_eff;
  if (!(t_max > 0.0)) {
    if (std::abs(curve.j_eff_used) < 1e-14)
      throw NoTransferChannel("no transfer channel: cannot pick a default time window");
    t_max = 1.5 * std::numbers::pi / std::abs(curve.j_eff_used);
  }

  const CouplingGraph medium = medium_graph(spec);
  const HamiltonianOperator medium_op = make_operator(medium, 0);
  const SpectrumResult ground = lowest_eigenpairs(medium_op, 1, opts);
  const StateVector& g = ground.eigenvectors.front();

  const ProbeSites p = probe_sites(spec);
  const HamiltonianOperator op = make_operator(attach_qubits(spec), 0);
  const SectorBasis& basis = op.basis();
  ComplexState psi = ComplexState::Zero(op.dim());
  const BasisState up_a = BasisState{1} << p.qubit_a;
  for (std::size_t i = 0; i < medium_op.basis().size(); ++i)
    psi[static_cast<Eigen::Index>(basis.index_of(medium_op.basis()[i] | up_a))] =
        g[static_cast<Eigen::Index>(i)];

  auto energy = [&](const ComplexState& v) { return v.dot(op * v).real(); };
  curve.initial_energy = energy(psi);

  KrylovPropagator propagator(op, prop);
  const double dt = t_max / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    if (i > 0) propagator.advance(psi, dt);
    curve.times.push_back(i * dt);
    curve.fidelity_b.push_back(population_up(psi, basis, p.qubit_b));
    curve.max_norm_drift = std::max(curve.max_norm_drift, std::abs(psi.norm() - 1.0));
    curve.max_energy_drift =
        std::max(curve.max_energy_drift, std::abs(energy(psi) - curve.initial_energy));
  }
  const auto peak = std::max_element(curve.fidelity_b.begin(), curve.fidelity_b.end());
  curve.peak_fidelity = *peak;
  curve.t_star = curve.times[static_cast<std::size_t>(peak - curve.fidelity_b.begin())];
  curve.matvecs = propagator.matvecs() + ground.matvecs;
  return curve;
}

}  // namespace spinbus
