#include <doctest.h>

#include "oracle.hpp"
#include "spinbus/eigensolve.hpp"
#include "spinbus/errors.hpp"

using namespace spinbus;

namespace {

CouplingGraph open_chain(int n, double j) {
  CouplingGraph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_bond(i, i + 1, j);
  return g;
}

std::vector<std::pair<CouplingGraph, int>> dense_reachable_sectors() {
  std::vector<std::pair<CouplingGraph, int>> out;
  for (int n = 1; n <= 5; ++n) out.emplace_back(build_ladder(n, 1.0), 0);
  out.emplace_back(build_ladder(6, 1.0), 2);
  for (int n = 1; n <= 4; ++n)
    for (Connection c : {Connection::TypeA, Connection::TypeB})
      for (int twice_sz : {0, 2, 4}) out.emplace_back(attach_qubits({n, 10.0, 1.0, c}), twice_sz);
  return out;
}

}  // namespace

TEST_CASE("dense spectra of textbook systems") {
  CouplingGraph d(2);
  d.add_bond(0, 1, 1.0);
  const SpectrumResult two = dense_spectrum(make_operator(d, 0));
  REQUIRE(two.size() == 2);
  CHECK(two.eigenvalues[0] == doctest::Approx(-0.75));
  CHECK(two.eigenvalues[1] == doctest::Approx(0.25));
  CHECK(two.complete);

  // S_2.(S_1 + S_3): two doublets at -1 and 0, one quartet at +1/2.
  const CouplingGraph chain = open_chain(3, 1.0);
  const SpectrumResult half = dense_spectrum(make_operator(chain, 1));
  REQUIRE(half.size() == 3);
  CHECK(half.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(half.eigenvalues[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(half.eigenvalues[2] == doctest::Approx(0.5));
  const SpectrumResult top = dense_spectrum(make_operator(chain, 3));
  CHECK(top.eigenvalues[0] == doctest::Approx(0.5));

  CHECK(dense_spectrum(make_operator(build_ladder(2, 1.0), 0)).eigenvalues[0] ==
        doctest::Approx(-2.0));
}

TEST_CASE("dense spectra match the full-space oracle") {
  for (const auto& [g, twice_sz] : dense_reachable_sectors()) {
    if (g.n_sites() > 10) continue;
    const Eigen::VectorXd all = oracle::full_spectrum(g);
    const int n_up = (g.n_sites() + twice_sz) / 2;
    const Eigen::MatrixXd h = oracle::restrict_to(oracle::hamiltonian(g),
                                                  oracle::sector_indices(g.n_sites(), n_up));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h, Eigen::EigenvaluesOnly);
    const SpectrumResult s = dense_spectrum(make_operator(g, twice_sz));
    for (std::size_t k = 0; k < s.size(); ++k)
      CHECK(std::abs(s.eigenvalues[k] - es.eigenvalues()[static_cast<Eigen::Index>(k)]) < 1e-12);
    if (twice_sz == g.n_sites() % 2) CHECK(s.eigenvalues[0] == doctest::Approx(all[0]));
  }
}

TEST_CASE("Lanczos agrees with dense on every dense-reachable sector") {
  for (const auto& [g, twice_sz] : dense_reachable_sectors()) {
    const HamiltonianOperator op = make_operator(g, twice_sz);
    const int k = static_cast<int>(std::min<Eigen::Index>(op.dim(), 6));
    const SpectrumResult dense = dense_spectrum(op);
    const SpectrumResult lan = lanczos_lowest(op, k, 1e-10, 20040101, 5000);
    REQUIRE(lan.size() == static_cast<std::size_t>(k));
    CHECK(lan.method == "lanczos");
    for (int i = 0; i < k; ++i) {
      CHECK(std::abs(lan.eigenvalues[i] - dense.eigenvalues[i]) <= 1e-10);
      CHECK(lan.residuals[i] <= 1e-10 * std::max(1.0, std::abs(lan.eigenvalues[i])));
      CHECK(lan.eigenvalues[0] >= dense.eigenvalues[0] - 1e-10);
      if (i > 0) CHECK(lan.eigenvalues[i - 1] <= lan.eigenvalues[i]);
    }
    Eigen::MatrixXd v(op.dim(), k);
    for (int i = 0; i < k; ++i) v.col(i) = lan.eigenvectors[i];
    CHECK((v.transpose() * v - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("Lanczos resolves degenerate levels") {
  // Two disconnected copies of a 2x3 ladder: every mixed product level is
  // exactly twofold degenerate inside the sector.
  const CouplingGraph ladder = build_ladder(3, 1.0);
  CouplingGraph g(12);
  for (int copy = 0; copy < 2; ++copy)
    for (const Bond& b : ladder.bonds())
      g.add_bond(b.i + 6 * copy, b.j + 6 * copy, b.strength);
  const HamiltonianOperator op = make_operator(g, 0);
  const SpectrumResult dense = dense_spectrum(op);
  CHECK(dense.eigenvalues[2] - dense.eigenvalues[1] < 1e-12);
  const SpectrumResult lan = lanczos_lowest(op, 12, 1e-10, 1, 5000);
  for (int i = 0; i < 12; ++i) CHECK(std::abs(lan.eigenvalues[i] - dense.eigenvalues[i]) <= 1e-10);
}

TEST_CASE("Lanczos converges from above as the budget grows") {
  const HamiltonianOperator op = make_operator(build_ladder(6, 1.0), 0);
  const double exact = dense_spectrum(op).eigenvalues[0];
  double previous = std::numeric_limits<double>::infinity();
  for (int budget : {5, 10, 20, 40}) {
    try {
      lanczos_lowest(op, 1, 1e-10, 2, budget);
    } catch (const SolverError& e) {
      CHECK(e.best_residual() > 0.0);
      CHECK(e.best_residual() < previous);
      previous = e.best_residual();
    }
  }
  const SpectrumResult done = lanczos_lowest(op, 1, 1e-10, 2, 5000);
  CHECK(done.eigenvalues[0] >= exact - 1e-10);
}

TEST_CASE("Lanczos argument checks and failure reporting") {
  const HamiltonianOperator op = make_operator(build_ladder(3, 1.0), 0);
  CHECK_THROWS_AS(lanczos_lowest(op, 0, 1e-10, 1, 5000), InvalidArgument);
  CHECK_THROWS_AS(lanczos_lowest(op, 21, 1e-10, 1, 5000), InvalidArgument);
  CHECK_THROWS_AS(lanczos_lowest(op, 2, 0.0, 1, 5000), InvalidArgument);
  CHECK_THROWS_AS(lanczos_lowest(make_operator(build_ladder(1, 1.0), 0), 3, 1e-10, 1, 5000),
                  InvalidArgument);
  CHECK_THROWS_AS(lanczos_lowest(make_operator(build_ladder(6, 1.0), 0), 1, 1e-10, 1, 3),
                  SolverError);
}

TEST_CASE("Lanczos is deterministic for a fixed seed") {
  const HamiltonianOperator op = make_operator(build_ladder(6, 1.0), 0);
  const SpectrumResult a = lanczos_lowest(op, 3, 1e-10, 42, 5000);
  const SpectrumResult b = lanczos_lowest(op, 3, 1e-10, 42, 5000);
  CHECK(a.seed == 42);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.eigenvalues[i] == b.eigenvalues[i]);
    CHECK((a.eigenvectors[i].array() == b.eigenvectors[i].array()).all());
  }
}

TEST_CASE("lowest_eigenpairs picks the backend by dimension") {
  SolverOptions opts;
  const HamiltonianOperator small = make_operator(build_ladder(3, 1.0), 0);
  CHECK(lowest_eigenpairs(small, 3, opts).method == "dense");
  opts.dense_limit = 4;
  const SpectrumResult lan = lowest_eigenpairs(small, 3, opts);
  CHECK(lan.method == "lanczos");
  CHECK(lan.eigenvalues[0] == doctest::Approx(dense_spectrum(small).eigenvalues[0]));
}

TEST_CASE("isolated ladder ground multiplet") {
  const MultipletReport r = ground_multiplet(build_ladder(6, 1.0), {}, 1.0);
  CHECK(r.ground_spin == 0);
  CHECK(r.first_excited_spin == 1);
  CHECK(r.gap > 0.0);
  CHECK(r.gap == doctest::Approx(0.6802).epsilon(1e-3));
  for (const Level& l : r.levels) CHECK(l.degeneracy == static_cast<int>(2 * l.spin + 1));
}

TEST_CASE("SU(2): lowest S^z = 1 level is the first triplet of S^z = 0") {
  const CouplingGraph g = build_ladder(5, 1.0);
  const SpectrumResult zero = dense_spectrum(make_operator(g, 0));
  const SpectrumResult one = dense_spectrum(make_operator(g, 2));
  CHECK(std::abs(one.eigenvalues[0] - zero.eigenvalues[1]) <= 1e-10);
}

TEST_CASE("triplet ground of N=3 TypeA is threefold across S^z = -1, 0, 1") {
  const CouplingGraph g = attach_qubits({3, 10.0, 1.0, Connection::TypeA});
  const double e_minus = dense_spectrum(make_operator(g, -2)).eigenvalues[0];
  const double e_zero = dense_spectrum(make_operator(g, 0)).eigenvalues[0];
  const double e_plus = lanczos_lowest(make_operator(g, 2), 1, 1e-10, 3, 5000).eigenvalues[0];
  CHECK(std::abs(e_minus - e_zero) <= 1e-9);
  CHECK(std::abs(e_plus - e_zero) <= 1e-9);
  CHECK(ground_multiplet({3, 10.0, 1.0, Connection::TypeA}).ground_spin == 1);
}

TEST_CASE("ground spin follows sublattice parity") {
  CHECK(ground_multiplet({2, 10.0, 1.0, Connection::TypeB}).ground_spin == 1);
  CHECK(ground_multiplet({2, 10.0, 1.0, Connection::TypeA}).ground_spin == 0);
  for (double j : {10.0, 40.0})
    for (int n = 1; n <= 4; ++n)
      for (Connection c : {Connection::TypeA, Connection::TypeB}) {
        const LadderSpec spec{n, j, 1.0, c};
        const MultipletReport r = ground_multiplet(spec);
        CHECK(r.ground_spin == predicted_ground_spin(spec));
        CHECK(r.gap >= 0.0);
        // Dense oracle: the ground level in S^z = S is absent from S^z = S + 1.
        const CouplingGraph g = attach_qubits(spec);
        const int s = predicted_ground_spin(spec);
        const double e_s = dense_spectrum(make_operator(g, 2 * s)).eigenvalues[0];
        const double e_up = dense_spectrum(make_operator(g, 2 * s + 2)).eigenvalues[0];
        CHECK(e_s == doctest::Approx(r.ground_energy).epsilon(1e-12));
        CHECK(e_up - e_s > 1e-8 * j);
      }
}

TEST_CASE("labelled levels carry 2S+1 degeneracy and integral Casimir") {
  const MultipletAnalysis a =
      analyze_multiplets(attach_qubits({4, 10.0, 1.0, Connection::TypeB}), {}, 10.0);
  REQUIRE(!a.report.levels.empty());
  for (const Level& l : a.report.levels) {
    CHECK(l.degeneracy == static_cast<int>(2 * l.spin + 1));
    CHECK(a.spin_at(l.energy).value() == l.spin);
  }
  CHECK_FALSE(a.spin_at(1e6).has_value());
}

TEST_CASE("decoupled qubits: singlet and triplet share the ground level") {
  const LadderSpec spec{2, 1.0, 0.0, Connection::TypeA};
  const MultipletAnalysis a = analyze_multiplets(attach_qubits(spec), {}, 1.0);
  REQUIRE(a.report.levels.size() >= 2);
  CHECK(a.report.ground_energy == doctest::Approx(-2.0));
  CHECK(a.report.levels[0].energy == doctest::Approx(-2.0));
  CHECK(a.report.levels[1].energy == doctest::Approx(-2.0));
  CHECK(a.report.levels[0].spin + a.report.levels[1].spin == 1.0);
  CHECK_FALSE(a.spin_at(-2.0).has_value());
}
