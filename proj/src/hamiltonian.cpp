#include "spinbus/hamiltonian.hpp"

#include <cmath>
#include <string>

#include "spinbus/errors.hpp"

namespace spinbus {

namespace {

inline bool bit(BasisState s, int k) { return ((s >> k) & 1u) != 0; }

template <typename Scalar>
void require_normalized(const Vector<Scalar>& v, const SectorBasis& basis) {
  if (static_cast<std::size_t>(v.size()) != basis.size())
    throw DimensionMismatch("state length does not match basis size");
  const double n2 = v.squaredNorm();
  if (std::abs(n2 - 1.0) > 1e-10)
    throw NormalizationError("state is not normalized (|v|^2 = " + std::to_string(n2) + ")");
}

void require_sites(const SectorBasis& basis, int a, int b) {
  if (a < 0 || b < 0 || a >= basis.n_sites() || b >= basis.n_sites())
    throw InvalidArgument("site out of range");
}

template <typename Scalar>
double szsz_impl(const Vector<Scalar>& v, const SectorBasis& basis, int a, int b) {
  require_normalized(v, basis);
  require_sites(basis, a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const BasisState s = basis[i];
    const double sign = bit(s, a) == bit(s, b) ? 0.25 : -0.25;
    acc += sign * std::norm(v[static_cast<Eigen::Index>(i)]);
  }
  return acc;
}

template <typename Scalar>
double sdots_impl(const Vector<Scalar>& v, const SectorBasis& basis, int a, int b) {
  require_normalized(v, basis);
  require_sites(basis, a, b);
  if (a == b) return 0.75;
  const BasisState mask = (BasisState{1} << a) | (BasisState{1} << b);
  Scalar acc{0};
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const BasisState s = basis[i];
    const auto vi = v[static_cast<Eigen::Index>(i)];
    if (bit(s, a) == bit(s, b)) {
      acc += Scalar(0.25) * Eigen::numext::conj(vi) * vi;
    } else {
      acc += Scalar(-0.25) * Eigen::numext::conj(vi) * vi;
      const std::size_t j = basis.index_of(s ^ mask);
      acc += Scalar(0.5) * Eigen::numext::conj(vi) * v[static_cast<Eigen::Index>(j)];
    }
  }
  return std::real(acc);
}

}  // namespace

HamiltonianOperator::HamiltonianOperator(CouplingGraph graph,
                                         std::shared_ptr<const SectorBasis> basis)
    : graph_(std::move(graph)), basis_(std::move(basis)) {
  if (!basis_) throw InvalidArgument("null basis");
  if (basis_->n_sites() != graph_.n_sites())
    throw DimensionMismatch("graph and basis disagree on the number of sites");

  const std::size_t n = basis_->size();
  diagonal_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  row_start_.reserve(n + 1);
  row_start_.push_back(0);
  for (std::size_t i = 0; i < n; ++i) {
    const BasisState s = (*basis_)[i];
    double d = 0.0;
    for (const Bond& b : graph_.bonds()) {
      if (bit(s, b.i) == bit(s, b.j)) {
        d += 0.25 * b.strength;
      } else {
        d -= 0.25 * b.strength;
        const BasisState flipped = s ^ ((BasisState{1} << b.i) | (BasisState{1} << b.j));
        partner_.push_back(static_cast<std::uint32_t>(basis_->index_of(flipped)));
        half_coupling_.push_back(0.5 * b.strength);
      }
    }
    diagonal_[static_cast<Eigen::Index>(i)] = d;
    row_start_.push_back(static_cast<std::uint32_t>(partner_.size()));
  }
}

template <typename Scalar>
void HamiltonianOperator::apply_impl(const Vector<Scalar>& x, Vector<Scalar>& y) const {
  if (x.size() != dim())
    throw DimensionMismatch("vector length " + std::to_string(x.size()) +
                            " does not match sector dimension " + std::to_string(dim()));
  y.resize(dim());
  const Eigen::Index n = dim();
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc = diagonal_[i] * x[i];
    for (std::uint32_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
      acc += half_coupling_[k] * x[partner_[k]];
    y[i] = acc;
  }
  ++applications_;
}

void HamiltonianOperator::apply(const StateVector& x, StateVector& y) const { apply_impl(x, y); }
void HamiltonianOperator::apply(const ComplexVector& x, ComplexVector& y) const {
  apply_impl(x, y);
}

StateVector HamiltonianOperator::operator*(const StateVector& x) const {
  StateVector y;
  apply_impl(x, y);
  return y;
}

ComplexVector HamiltonianOperator::operator*(const ComplexVector& x) const {
  ComplexVector y;
  apply_impl(x, y);
  return y;
}

Eigen::MatrixXd HamiltonianOperator::dense() const {
  if (dim() > kDenseLimit)
    throw InvalidArgument("sector dimension " + std::to_string(dim()) +
                          " exceeds the dense limit " + std::to_string(kDenseLimit));
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim(), dim());
  for (Eigen::Index i = 0; i < dim(); ++i) {
    m(i, i) = diagonal_[i];
    for (std::uint32_t k = row_start_[i]; k < row_start_[i + 1]; ++k)
      m(i, partner_[k]) += half_coupling_[k];
  }
  return m;
}

HamiltonianOperator make_operator(const CouplingGraph& graph, int twice_sz) {
  const int twice_up = graph.n_sites() + twice_sz;
  if (twice_up % 2 != 0) throw InvalidArgument("S^z parity does not match the site count");
  return HamiltonianOperator(graph,
                             std::make_shared<const SectorBasis>(graph.n_sites(), twice_up / 2));
}

double expectation_szsz(const StateVector& v, const SectorBasis& basis, int a, int b) {
  return szsz_impl(v, basis, a, b);
}
double expectation_szsz(const ComplexVector& v, const SectorBasis& basis, int a, int b) {
  return szsz_impl(v, basis, a, b);
}
double expectation_sdots(const StateVector& v, const SectorBasis& basis, int a, int b) {
  return sdots_impl(v, basis, a, b);
}
double expectation_sdots(const ComplexVector& v, const SectorBasis& basis, int a, int b) {
  return sdots_impl(v, basis, a, b);
}

double expectation_sz(const StateVector& v, const SectorBasis& basis, int site) {
  require_normalized(v, basis);
  require_sites(basis, site, site);
  double acc = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    acc += (bit(basis[i], site) ? 0.5 : -0.5) * v[static_cast<Eigen::Index>(i)] *
           v[static_cast<Eigen::Index>(i)];
  return acc;
}

double total_spin_squared(const StateVector& v, const SectorBasis& basis) {
  require_normalized(v, basis);
  // S^2 = S^z (S^z + 1) + S^- S^+, and <S^- S^+> = |S^+ v|^2.
  const double m = basis.total_sz();
  double acc = m * (m + 1.0);
  if (basis.n_up() == basis.n_sites()) return acc;
  const SectorBasis raised(basis.n_sites(), basis.n_up() + 1);
  Eigen::VectorXd up = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(raised.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const BasisState s = basis[i];
    for (int k = 0; k < basis.n_sites(); ++k)
      if (!bit(s, k))
        up[static_cast<Eigen::Index>(raised.index_of(s | (BasisState{1} << k)))] +=
            v[static_cast<Eigen::Index>(i)];
  }
  return acc + up.squaredNorm();
}

double spin_from_casimir(double s2) {
  return std::max(0.0, 0.5 * (std::sqrt(1.0 + 4.0 * std::max(0.0, s2)) - 1.0));
}

}  // namespace spinbus
