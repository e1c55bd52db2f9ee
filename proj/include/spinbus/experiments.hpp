#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "spinbus/dynamics.hpp"
#include "spinbus/eigensolve.hpp"
#include "spinbus/model.hpp"

namespace spinbus::cli {

inline constexpr std::string_view kVersion = "spinbus 1.0.0";

enum class Experiment { Gap, Jeff, FidelityTable, Scaling, Transfer, Validate };
enum class OutputFormat { Csv, Json };

std::string to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// One batch run. Empty grids fall back to the experiment's default grid.
struct ExperimentConfig {
  Experiment experiment = Experiment::Gap;
  std::vector<int> n_rungs;
  std::vector<double> j_medium;
  double j_probe = 1.0;
  /// "A", "B" or "auto-triplet" (TypeA for odd N, TypeB for even N).
  std::string connection = "auto-triplet";
  SolverOptions solver;
  double resolvent_tol = 1e-10;
  double t_max = 0.0;
  int n_samples = 200;
  std::string out_path;
  OutputFormat format = OutputFormat::Json;
  int threads = 1;
  /// Test hook for `validate`: negate every bond before running the checks.
  bool mutate_bond_sign = false;

  /// Throws ConfigError on empty/invalid grids or non-positive tolerances.
  void validate() const;
  std::vector<int> resolved_n_rungs() const;
  std::vector<double> resolved_j_medium() const;
  Connection connection_for(int n_rungs) const;
};

/// Flat key-value JSON. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);

using ResultRecord = nlohmann::ordered_json;

struct RunResult {
  Experiment experiment = Experiment::Gap;
  std::vector<std::string> columns;
  std::vector<ResultRecord> records;
  /// Some grid point raised a solver error (recorded with status "error").
  bool solver_failure = false;
  /// `validate` only: some check did not pass.
  bool validation_failure = false;
};

RunResult run_gap(const ExperimentConfig& config);
RunResult run_jeff(const ExperimentConfig& config);
RunResult run_fidelity_table(const ExperimentConfig& config);
RunResult run_scaling(const ExperimentConfig& config);
RunResult run_transfer(const ExperimentConfig& config);
RunResult run_validate(const ExperimentConfig& config);
RunResult run_experiment(const ExperimentConfig& config);

/// Header row plus one line per record, columns fixed per experiment.
std::string to_csv(const RunResult& result);
/// Array of flat records.
std::string to_json(const RunResult& result);

}  // namespace spinbus::cli
