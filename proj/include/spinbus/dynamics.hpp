#pragma once

#include <vector>

#include "spinbus/eigensolve.hpp"
#include "spinbus/hamiltonian.hpp"
#include "spinbus/model.hpp"

namespace spinbus {

using ComplexState = ComplexVector;

struct PropagatorOptions {
  /// Bound on the Krylov a-posteriori error estimate per step.
  double tol = 1e-10;
  int max_krylov = 60;
  /// Give up once the step has been halved this many times below the request.
  int max_halvings = 20;
};

/// exp(-i H dt) by Lanczos-Krylov steps with adaptive step size. The step
/// length found for one call is reused by the next, so a long trajectory
/// sampled on a grid does not re-search it at every sample.
class KrylovPropagator {
 public:
  explicit KrylovPropagator(const HamiltonianOperator& op, PropagatorOptions opts = {});

  /// psi <- exp(-i H dt) psi.
  void advance(ComplexState& psi, double dt);

  int matvecs() const { return matvecs_; }
  int steps() const { return steps_; }

 private:
  bool try_step(const ComplexState& psi, double h, ComplexState& out, int& used);

  const HamiltonianOperator& op_;
  PropagatorOptions opts_;
  double step_ = 0.0;
  int matvecs_ = 0;
  int steps_ = 0;
  std::vector<ComplexVector> krylov_;
};

/// One-shot propagation exp(-i H dt) psi.
ComplexState evolve(const HamiltonianOperator& op, const ComplexState& psi, double dt,
                    double tol = 1e-10);

struct TransferCurve {
  std::vector<double> times;
  /// Population of |up> on qubit B.
  std::vector<double> fidelity_b;
  double j_eff_used = 0.0;
  double t_star = 0.0;
  double peak_fidelity = 0.0;
  double initial_energy = 0.0;
  double max_norm_drift = 0.0;
  double max_energy_drift = 0.0;
  int matvecs = 0;
};

/// Starts from |up>_A (x) |ladder ground> (x) |down>_B and records the
/// up-population of B on a uniform grid of n_samples points over [0, t_max].
/// t_max <= 0 selects 1.5 pi / |j_eff| with j_eff from the gap splitting.
TransferCurve transfer_experiment(const LadderSpec& spec, double t_max, int n_samples,
                                  const SolverOptions& opts = {},
                                  const PropagatorOptions& prop = {});

/// sin^2(j_eff t / 2): |ud> -> |du> probability under j_eff S_A . S_B.
double effective_transfer(double j_eff, double t);

/// pi / |j_eff| from the gap splitting; throws NoTransferChannel when the
/// qubits are decoupled.
double characteristic_time(const LadderSpec& spec, const SolverOptions& opts = {});

}  // namespace spinbus
