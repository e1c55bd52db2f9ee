// Large-system checks; minutes rather than seconds.
#include <doctest.h>

#include "spinbus/effective.hpp"
#include "spinbus/experiments.hpp"
#include "spinbus/observables.hpp"

using namespace spinbus;

TEST_CASE("2x8 ladder ground energy at the dense boundary") {
  const HamiltonianOperator op = make_operator(build_ladder(8, 1.0), 0);
  CHECK(op.dim() == 12870);
  const SpectrumResult s = lanczos_lowest(op, 2, 1e-10, 20040101, 5000);
  // Reference from an independent scipy ARPACK run on a separately built
  // sparse matrix.
  CHECK(std::abs(s.eigenvalues[0] - (-8.915471123555818)) <= 1e-9);
  CHECK(std::abs(s.eigenvalues[1] - (-8.28445957919504)) <= 1e-9);
}

TEST_CASE("resolvent route at twenty sites tracks the gap splitting") {
  const LadderSpec spec{9, 10.0, 1.0, Connection::TypeA};
  const PerturbationResult res = jeff_resolvent(spec);
  const PerturbationResult gap = jeff_gap_splitting(spec);
  CHECK(std::isfinite(res.j_eff));
  CHECK(res.j_eff * gap.j_eff > 0.0);
  CHECK(std::abs(res.j_eff - gap.j_eff) <= 0.25 * std::abs(gap.j_eff));
}

TEST_CASE("golden fidelity weights at twenty sites") {
  const auto rows = fidelity_report({9, 40.0, 1.0, Connection::TypeA});
  CHECK(rows[0].j == 1.0);
  CHECK(std::abs(rows[0].formula.c10_sq - 0.9996) <= 2e-3);
  CHECK(std::abs(rows[1].projector.c00_sq - 0.9997) <= 2e-3);
  CHECK(std::abs(rows[0].formula.c10_sq - rows[0].projector.c10_sq) <= 1e-10);
}

TEST_CASE("default scaling grid") {
  cli::ExperimentConfig c;
  c.experiment = cli::Experiment::Scaling;
  const cli::RunResult r = cli::run_experiment(c);
  CHECK(r.records.size() == 18);
  CHECK_FALSE(r.solver_failure);
  for (const auto& rec : r.records) {
    CHECK(rec["status"] == "ok");
    CHECK(std::isfinite(rec["j_eff_gap"].get<double>()));
  }
}
