#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "spinbus/errors.hpp"
#include "spinbus/observables.hpp"

using namespace spinbus;

namespace {

/// (|ud> + sign |du>)/sqrt2 on sites 0, 1 times |up> on site 2 (3 spins, S^z = 1/2).
StateVector pair_times_up(double sign, const SectorBasis& b) {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(b.size()));
  v[static_cast<Eigen::Index>(b.index_of(0b101u))] = 1.0 / std::sqrt(2.0);
  v[static_cast<Eigen::Index>(b.index_of(0b110u))] = sign / std::sqrt(2.0);
  return v;
}

void check_close(const BellWeights& a, const BellWeights& b, double tol) {
  CHECK(std::abs(a.c11_sq - b.c11_sq) <= tol);
  CHECK(std::abs(a.c10_sq - b.c10_sq) <= tol);
  CHECK(std::abs(a.c1m1_sq - b.c1m1_sq) <= tol);
  CHECK(std::abs(a.c00_sq - b.c00_sq) <= tol);
}

}  // namespace

TEST_CASE("reduced density matrix of product and singlet states") {
  const SectorBasis b = enumerate_sector(4, 3);
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(b.size()));
  v[static_cast<Eigen::Index>(b.index_of(0b1011u))] = 1.0;
  const TwoQubitRDM<double> rho = reduce_to_qubits(v, b, 0, 1);
  CHECK(rho(0, 0) == doctest::Approx(1.0));
  CHECK(rho.sum() == doctest::Approx(1.0));

  const SectorBasis three = enumerate_sector(3, 2);
  // Sites 0 and 1 form a singlet; the ordering puts site a first.
  const StateVector s = pair_times_up(-1.0, three);
  const TwoQubitRDM<double> r = reduce_to_qubits(s, three, 1, 0);
  Eigen::Matrix4d expected = Eigen::Matrix4d::Zero();
  expected(1, 1) = expected(2, 2) = 0.5;
  expected(1, 2) = expected(2, 1) = -0.5;
  CHECK((r - expected).norm() < 1e-15);

  CHECK_THROWS_AS(reduce_to_qubits(s, three, 0, 0), InvalidArgument);
  CHECK_THROWS_AS(reduce_to_qubits(s, three, 0, 3), InvalidArgument);
  CHECK_THROWS_AS(reduce_to_qubits(StateVector(2.0 * s), three, 0, 1), NormalizationError);
}

TEST_CASE("partial trace agrees with the full-space oracle") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> gauss;
  const int n = 7;
  const SectorBasis b = enumerate_sector(n, 3);
  ComplexVector v(static_cast<Eigen::Index>(b.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = {gauss(rng), gauss(rng)};
  v.normalize();
  const ComplexVector full = oracle::embed(v, oracle::sector_indices(n, 3), n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c) {
      if (a == c) continue;
      const auto rho = reduce_to_qubits(v, b, a, c);
      CHECK((rho - oracle::qubit_rdm(full, n, a, c)).norm() < 1e-14);
      CHECK(std::abs(rho.trace() - 1.0) < 1e-10);
      CHECK((rho - rho.adjoint()).norm() < 1e-15);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10);
    }
}

TEST_CASE("Bell weights of textbook states") {
  const SectorBasis two = enumerate_sector(2, 1);
  StateVector singlet(2), triplet(2);
  singlet << 1.0, -1.0;
  triplet << 1.0, 1.0;
  singlet /= std::sqrt(2.0);
  triplet /= std::sqrt(2.0);
  check_close(bell_weights_formula(singlet, two, 0, 1), {0, 0, 0, 1}, 1e-15);
  check_close(bell_weights_formula(triplet, two, 0, 1), {0, 1, 0, 0}, 1e-15);
  check_close(bell_weights_projector(reduce_to_qubits(singlet, two, 0, 1)), {0, 0, 0, 1}, 1e-15);
  check_close(bell_weights_projector(TwoQubitRDM<double>(Eigen::Matrix4d::Identity() / 4.0)),
              {0.25, 0.25, 0.25, 0.25}, 1e-15);

  const SectorBasis three = enumerate_sector(3, 2);
  CHECK_THROWS_AS(bell_weights_formula(pair_times_up(-1.0, three), three, 0, 1), InvalidArgument);
}

TEST_CASE("formula and projector routes agree on S^z = 0 eigenstates") {
  for (int n = 1; n <= 4; ++n)
    for (Connection c : {Connection::TypeA, Connection::TypeB}) {
      const LadderSpec spec{n, 10.0, 1.0, c};
      const ProbeSites p = probe_sites(spec);
      const HamiltonianOperator op = make_operator(attach_qubits(spec), 0);
      const SpectrumResult s = lowest_eigenpairs(op, 6, {});
      for (const StateVector& v : s.eigenvectors) {
        const BellWeights f = bell_weights_formula(v, op.basis(), p.qubit_a, p.qubit_b);
        const BellWeights q =
            bell_weights_projector(reduce_to_qubits(v, op.basis(), p.qubit_a, p.qubit_b));
        check_close(f, q, 1e-10);
        CHECK(std::abs(f.sum() - 1.0) <= 1e-8);
        CHECK(std::abs(q.sum() - 1.0) <= 1e-8);
      }
    }
}

TEST_CASE("fidelity report rows") {
  const std::vector<FidelityRow> rows = fidelity_report({3, 10.0, 1.0, Connection::TypeA});
  REQUIRE(rows.size() == 2);
  const FidelityRow& g = rows[0];
  CHECK(g.state == "psi_g");
  CHECK(g.j == 1.0);
  CHECK(g.m == 0);
  CHECK(std::abs(g.formula.c10_sq - 0.9952) <= 2e-3);
  CHECK(std::abs(g.formula.c00_sq - 4.2e-4) <= 2e-3);
  CHECK(std::abs(g.formula.c11_sq - 2.2e-3) <= 2e-3);
  // Frozen values from an independent numpy diagonalization.
  CHECK(g.formula.c10_sq == doctest::Approx(0.995227265445636).epsilon(1e-9));
  CHECK(g.formula.c00_sq == doctest::Approx(4.2086408216432392e-4).epsilon(1e-6));
  CHECK(std::abs(g.p_up_up - g.p_down_down) <= 1e-9);
  const FidelityRow& e = rows[1];
  CHECK(e.state == "psi_1");
  CHECK(e.j == 0.0);
  CHECK(std::abs(e.projector.c00_sq - 0.9989) <= 2e-3);
  CHECK(e.energy > g.energy);
}

TEST_CASE("golden fidelity weights at stronger ladder couplings") {
  const auto j20 = fidelity_report({3, 20.0, 1.0, Connection::TypeA});
  CHECK(std::abs(j20[0].formula.c10_sq - 0.9989) <= 2e-3);
  CHECK(std::abs(j20[1].formula.c00_sq - 0.9997) <= 2e-3);
  const auto j40 = fidelity_report({3, 40.0, 1.0, Connection::TypeA});
  CHECK(std::abs(j40[0].formula.c10_sq - 0.9997) <= 2e-3);
  CHECK(std::abs(j40[1].projector.c00_sq - 0.9999) <= 2e-3);
}

TEST_CASE("dominant ground weight grows with the ladder coupling") {
  for (int n : {3, 5}) {
    const double weak = fidelity_report({n, 10.0, 1.0, Connection::TypeA})[0].formula.c10_sq;
    const double strong = fidelity_report({n, 40.0, 1.0, Connection::TypeA})[0].formula.c10_sq;
    CHECK(strong > weak);
  }
}

TEST_CASE("single-site population") {
  const SectorBasis b = enumerate_sector(3, 2);
  const ComplexVector v = pair_times_up(1.0, b).cast<std::complex<double>>();
  CHECK(population_up(v, b, 2) == doctest::Approx(1.0));
  CHECK(population_up(v, b, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(population_up(v, b, 3), InvalidArgument);
}
