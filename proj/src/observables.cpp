#include "spinbus/observables.hpp"

#include <cmath>
#include <type_traits>
#include <string>

#include "spinbus/errors.hpp"

namespace spinbus {

namespace {

template <typename Scalar>
TwoQubitRDM<Scalar> reduce_impl(const Vector<Scalar>& v, const SectorBasis& basis, int a, int b) {
  if (a < 0 || b < 0 || a >= basis.n_sites() || b >= basis.n_sites())
    throw InvalidArgument("qubit site out of range");
  if (a == b) throw InvalidArgument("qubit sites must differ");
  if (static_cast<std::size_t>(v.size()) != basis.size())
    throw DimensionMismatch("state length does not match basis size");
  if (std::abs(v.squaredNorm() - 1.0) > 1e-8) throw NormalizationError("state is not normalized");

  const BasisState bit_a = BasisState{1} << a;
  const BasisState bit_b = BasisState{1} << b;
  // Row index: 0 = uu, 1 = ud, 2 = du, 3 = dd.
  auto pattern = [&](int idx) {
    return ((idx & 2) ? 0 : bit_a) | ((idx & 1) ? 0 : bit_b);
  };
  auto index_of_pair = [&](BasisState s) {
    return ((s & bit_a) ? 0 : 2) + ((s & bit_b) ? 0 : 1);
  };

  TwoQubitRDM<Scalar> rho = TwoQubitRDM<Scalar>::Zero();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const BasisState s = basis[i];
    const BasisState env = s & ~(bit_a | bit_b);
    const int row = index_of_pair(s);
    const Scalar vi = v[static_cast<Eigen::Index>(i)];
    for (int col = 0; col < 4; ++col) {
      const auto j = basis.find(env | pattern(col));
      if (!j) continue;
      if constexpr (std::is_same_v<Scalar, double>)
        rho(row, col) += vi * v[static_cast<Eigen::Index>(*j)];
      else
        rho(row, col) += vi * Eigen::numext::conj(v[static_cast<Eigen::Index>(*j)]);
    }
  }
  return rho;
}

template <typename Scalar>
BellWeights projector_impl(const TwoQubitRDM<Scalar>& rho) {
  auto re = [](Scalar x) { return std::real(x); };
  BellWeights w;
  w.c11_sq = re(rho(0, 0));
  w.c1m1_sq = re(rho(3, 3));
  const double mid = 0.5 * (re(rho(1, 1)) + re(rho(2, 2)));
  const double cross = 0.5 * (re(rho(1, 2)) + re(rho(2, 1)));
  w.c10_sq = mid + cross;
  w.c00_sq = mid - cross;
  return w;
}

}  // namespace

TwoQubitRDM<double> reduce_to_qubits(const StateVector& v, const SectorBasis& basis, int a,
                                     int b) {
  return reduce_impl(v, basis, a, b);
}

TwoQubitRDM<std::complex<double>> reduce_to_qubits(const ComplexVector& v,
                                                   const SectorBasis& basis, int a, int b) {
  return reduce_impl(v, basis, a, b);
}

BellWeights bell_weights_formula(const StateVector& v, const SectorBasis& basis, int a, int b) {
  if (basis.twice_sz() != 0)
    throw InvalidArgument("Bell-weight formula needs a global S^z = 0 state");
  BellWeights w;
  w.c11_sq = 0.25 + expectation_szsz(v, basis, a, b);
  w.c1m1_sq = w.c11_sq;
  w.c00_sq = 0.25 - expectation_sdots(v, basis, a, b);
  w.c10_sq = 1.0 - 2.0 * w.c11_sq - w.c00_sq;
  return w;
}

BellWeights bell_weights_projector(const TwoQubitRDM<double>& rdm) { return projector_impl(rdm); }
BellWeights bell_weights_projector(const TwoQubitRDM<std::complex<double>>& rdm) {
  return projector_impl(rdm);
}

double population_up(const ComplexVector& v, const SectorBasis& basis, int site) {
  if (site < 0 || site >= basis.n_sites()) throw InvalidArgument("site out of range");
  double p = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if ((basis[i] >> site) & 1u) p += std::norm(v[static_cast<Eigen::Index>(i)]);
  return p;
}

std::vector<FidelityRow> fidelity_report(const LadderSpec& spec, const SolverOptions& opts) {
  const CouplingGraph graph = attach_qubits(spec);
  const MultipletAnalysis a = analyze_multiplets(graph, opts, spec.j_medium);
  const SpectrumResult& base = a.sectors.front();
  if (base.size() < 2) throw SolverError("fewer than two S^z = 0 states resolved", 0.0);
  const ProbeSites p = probe_sites(spec);

  std::vector<FidelityRow> rows;
  const char* names[2] = {"psi_g", "psi_1"};
  for (std::size_t i = 0; i < 2; ++i) {
    FidelityRow row;
    row.state = names[i];
    row.energy = base.eigenvalues[i];
    const auto spin = a.spin_at(row.energy);
    if (!spin)
      throw AmbiguousMultiplet("S^z = 0 state " + std::to_string(i) +
                               " has no unique total-spin label");
    row.j = *spin;
    const StateVector& v = base.eigenvectors[i];
    row.formula = bell_weights_formula(v, *a.base_basis, p.qubit_a, p.qubit_b);
    const auto rho = reduce_to_qubits(v, *a.base_basis, p.qubit_a, p.qubit_b);
    row.projector = bell_weights_projector(rho);
    row.p_up_up = rho(0, 0);
    row.p_down_down = rho(3, 3);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace spinbus
