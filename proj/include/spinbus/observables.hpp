#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spinbus/eigensolve.hpp"
#include "spinbus/hamiltonian.hpp"
#include "spinbus/model.hpp"

namespace spinbus {

/// Two-qubit reduced density matrix in the order {|uu>, |ud>, |du>, |dd>}
/// (first label is site a).
template <typename Scalar>
using TwoQubitRDM = Eigen::Matrix<Scalar, 4, 4>;

/// Populations of the four two-qubit spin eigenstates
/// |1,1> = |uu>, |1,0> = (|ud> + |du>)/sqrt2, |1,-1> = |dd>, |0,0> = (|ud> - |du>)/sqrt2.
struct BellWeights {
  double c11_sq = 0.0;
  double c10_sq = 0.0;
  double c1m1_sq = 0.0;
  double c00_sq = 0.0;

  double sum() const { return c11_sq + c10_sq + c1m1_sq + c00_sq; }
};

/// Partial trace over every site except a and b.
TwoQubitRDM<double> reduce_to_qubits(const StateVector& v, const SectorBasis& basis, int site_a,
                                     int site_b);
TwoQubitRDM<std::complex<double>> reduce_to_qubits(const ComplexVector& v,
                                                   const SectorBasis& basis, int site_a,
                                                   int site_b);

/// Weights from two-spin correlators alone:
/// |c11|^2 = |c1-1|^2 = <1/4 + Sz_a Sz_b>, |c00|^2 = <1/4 - S_a.S_b>,
/// |c10|^2 = 1 - 2|c11|^2 - |c00|^2. Valid only in the global S^z = 0 sector.
BellWeights bell_weights_formula(const StateVector& v, const SectorBasis& basis, int site_a,
                                 int site_b);

/// Diagonal of the RDM in the two-qubit spin eigenbasis.
BellWeights bell_weights_projector(const TwoQubitRDM<double>& rdm);
BellWeights bell_weights_projector(const TwoQubitRDM<std::complex<double>>& rdm);

/// Probability that `site` is up.
double population_up(const ComplexVector& v, const SectorBasis& basis, int site);

struct FidelityRow {
  std::string state;  ///< "psi_g" or "psi_1"
  double j = 0.0;     ///< total two-qubit spin label of the full-system level
  int m = 0;
  double energy = 0.0;
  BellWeights formula;
  BellWeights projector;
  /// <P_uu> and <P_dd> separately; equal for S^z = 0 eigenstates.
  double p_up_up = 0.0;
  double p_down_down = 0.0;
};

/// Ground and first excited S^z = 0 eigenstates of the full system, labeled
/// by total spin and reduced onto the two qubits by both weight routes.
std::vector<FidelityRow> fidelity_report(const LadderSpec& spec, const SolverOptions& opts = {});

}  // namespace spinbus
