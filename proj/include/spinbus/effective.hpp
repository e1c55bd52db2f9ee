#pragma once

#include <string>

#include <Eigen/Core>

#include "spinbus/eigensolve.hpp"
#include "spinbus/model.hpp"

namespace spinbus {

enum class JeffMethod { SumOverStates, Resolvent, GapSplitting };

std::string to_string(JeffMethod m);

/// Effective qubit-qubit exchange j_eff and uniform shift epsilon.
///
/// The second-order routes also report the medium contractions
/// t_kk' = <g| S^z_k Q (E_g - H_M)^-1 Q S^z_k' |g>, from which
/// j_eff = 2 J0^2 t_lr and epsilon = (3 J0^2 / 4)(t_ll + t_rr).
struct PerturbationResult {
  double j_eff = 0.0;
  double epsilon = 0.0;
  double t_lr = 0.0;
  double t_ll = 0.0;
  double t_rr = 0.0;
  JeffMethod method = JeffMethod::SumOverStates;
  int iterations = 0;
  double residual = 0.0;
  int matvecs = 0;
};

/// 4x4 two-qubit Hamiltonian in the basis {|1,1>, |1,0>, |1,-1>, |0,0>}.
struct EffectiveHamiltonian {
  Eigen::Matrix4d matrix = Eigen::Matrix4d::Zero();
  double j_eff = 0.0;
  double epsilon = 0.0;
};

/// Dense diagonalization of the medium's lowest-|S^z| sector and an explicit
/// sum over every excited state. Requires sector dimension <= kDenseLimit.
PerturbationResult jeff_sum_over_states(const CouplingGraph& medium, int site_l, int site_r,
                                        double j_probe, double energy_scale);
PerturbationResult jeff_sum_over_states(const LadderSpec& spec);

/// Same quantities from two projected conjugate-gradient solves against the
/// Lanczos ground state, with the whole ground multiplet deflated.
PerturbationResult jeff_resolvent(const CouplingGraph& medium, int site_l, int site_r,
                                  double j_probe, double energy_scale, double solver_tol,
                                  const SolverOptions& eigen_opts, int max_iterations = 5000);
PerturbationResult jeff_resolvent(const LadderSpec& spec, double solver_tol = 1e-10,
                                  const SolverOptions& eigen_opts = {});

/// Triplet-minus-singlet splitting of the full system: E(S=1) - E(S=0).
PerturbationResult jeff_gap_splitting(const LadderSpec& spec, const SolverOptions& opts = {});

EffectiveHamiltonian build_effective_hamiltonian(double j_eff, double epsilon);

}  // namespace spinbus
