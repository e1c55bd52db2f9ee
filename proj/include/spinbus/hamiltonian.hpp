#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "spinbus/basis.hpp"
#include "spinbus/model.hpp"

namespace spinbus {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Real amplitudes over a SectorBasis; H is real symmetric in the product basis.
using StateVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Largest sector that may be materialized as a dense matrix.
inline constexpr Eigen::Index kDenseLimit = 4096;

/// Matrix-free H = sum_b J_b S_i . S_j restricted to one S^z sector.
///
/// Each bond contributes +J/4 on parallel pairs, -J/4 on antiparallel pairs
/// plus J/2 to the state with both bits flipped. The flip partners are cached
/// per basis state in bond order, so results are reproducible bit-for-bit.
class HamiltonianOperator {
 public:
  HamiltonianOperator(CouplingGraph graph, std::shared_ptr<const SectorBasis> basis);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_->size()); }
  const CouplingGraph& graph() const { return graph_; }
  const SectorBasis& basis() const { return *basis_; }
  const std::shared_ptr<const SectorBasis>& basis_ptr() const { return basis_; }

  /// y = H x. Throws DimensionMismatch when x has the wrong length.
  void apply(const StateVector& x, StateVector& y) const;
  void apply(const ComplexVector& x, ComplexVector& y) const;

  StateVector operator*(const StateVector& x) const;
  ComplexVector operator*(const ComplexVector& x) const;

  /// Dense materialization; only for dim() <= kDenseLimit.
  Eigen::MatrixXd dense() const;

  /// Number of apply() calls served so far (diagnostics).
  std::uint64_t applications() const { return applications_; }

 private:
  template <typename Scalar>
  void apply_impl(const Vector<Scalar>& x, Vector<Scalar>& y) const;

  CouplingGraph graph_;
  std::shared_ptr<const SectorBasis> basis_;
  Eigen::VectorXd diagonal_;
  std::vector<std::uint32_t> row_start_;
  std::vector<std::uint32_t> partner_;
  std::vector<double> half_coupling_;
  mutable std::uint64_t applications_ = 0;
};

/// Convenience: operator on a freshly enumerated sector.
HamiltonianOperator make_operator(const CouplingGraph& graph, int twice_sz);

/// <S^z_a S^z_b>. Throws NormalizationError if |<v|v> - 1| > 1e-10.
double expectation_szsz(const StateVector& v, const SectorBasis& basis, int site_a, int site_b);
double expectation_szsz(const ComplexVector& v, const SectorBasis& basis, int site_a, int site_b);

/// <S_a . S_b>, same bond rule as the Hamiltonian with J = 1.
double expectation_sdots(const StateVector& v, const SectorBasis& basis, int site_a, int site_b);
double expectation_sdots(const ComplexVector& v, const SectorBasis& basis, int site_a, int site_b);

/// <S^z_a>.
double expectation_sz(const StateVector& v, const SectorBasis& basis, int site);

/// <S_total^2> = M(M+1) + |S+ v|^2 with M the sector S^z.
double total_spin_squared(const StateVector& v, const SectorBasis& basis);

/// Total spin S solving S(S+1) = s2 (nearest non-negative root).
double spin_from_casimir(double s2);

}  // namespace spinbus
