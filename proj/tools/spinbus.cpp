// spinbus: batch driver for the spin-ladder data-bus experiments.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinbus/errors.hpp"
#include "spinbus/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kSolver = 2, kValidation = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace spinbus;
  CLI::App app{"Two qubits coupled through an antiferromagnetic spin ladder"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::vector<int> n_rungs, distance;
  std::vector<double> j_medium;
  double j_probe = -1.0, tol = -1.0, t_max = -1.0;
  long long seed = -1;
  int threads = 0, n_samples = 0, max_iter = 0;
  std::string connection, out, format;
  bool mutate = false;

  for (const char* name :
       {"gap", "jeff", "fidelity-table", "scaling", "transfer", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key-value JSON config");
    sub->add_option("--n-rungs", n_rungs, "ladder rung count(s) N");
    sub->add_option("--distance", distance, "qubit separation(s) L = N + 1");
    sub->add_option("--j", j_medium, "ladder exchange J (one or more)");
    sub->add_option("--j0", j_probe, "qubit-ladder exchange J0");
    sub->add_option("--connection", connection, "A, B or auto-triplet");
    sub->add_option("--tol", tol, "eigensolver residual tolerance");
    sub->add_option("--max-iter", max_iter, "matrix applications per eigensolve");
    sub->add_option("--seed", seed, "Lanczos start-vector seed");
    sub->add_option("--t-max", t_max, "transfer: time window (default 1.5 pi/|j_eff|)");
    sub->add_option("--n-samples", n_samples, "transfer: number of time samples");
    sub->add_option("--threads", threads, "worker threads for grid points");
    sub->add_option("--out", out, "output file (default stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    if (std::string(name) == "validate")
      sub->add_flag("--mutate-bond-sign", mutate, "negate every bond (self-test of the gate)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  cli::ExperimentConfig config;
  try {
    nlohmann::json j = nlohmann::json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot open config file " + config_path);
      try {
        in >> j;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
      }
    }
    const std::string experiment = app.get_subcommands().front()->get_name();
    if (j.contains("experiment") && j["experiment"] != experiment)
      throw ConfigError("config experiment does not match subcommand '" + experiment + "'");
    j["experiment"] = experiment;
    if (!n_rungs.empty()) j["n_rungs"] = n_rungs;
    if (!distance.empty()) {
      j.erase("n_rungs");
      j["distance"] = distance;
    }
    if (!j_medium.empty()) {
      j.erase("j");
      j["j_medium"] = j_medium;
    }
    if (j_probe >= 0) {
      j.erase("j0");
      j["j_probe"] = j_probe;
    }
    if (!connection.empty()) j["connection"] = connection;
    if (tol > 0) j["tol"] = tol;
    if (max_iter > 0) j["max_iter"] = max_iter;
    if (seed >= 0) j["seed"] = static_cast<std::uint64_t>(seed);
    if (t_max > 0) j["t_max"] = t_max;
    if (n_samples > 0) j["n_samples"] = n_samples;
    if (threads > 0) j["threads"] = threads;
    if (!out.empty()) j["out"] = out;
    if (!format.empty()) j["format"] = format;
    if (mutate) j["mutate_bond_sign"] = true;
    config = cli::config_from_json(j);
  } catch (const Error& e) {
    std::cerr << "spinbus: " << e.what() << "\n";
    return kUsage;
  }

  cli::RunResult result;
  try {
    result = cli::run_experiment(config);
  } catch (const SolverError& e) {
    std::cerr << "spinbus: solver failure: " << e.what() << "\n";
    return kSolver;
  } catch (const Error& e) {
    std::cerr << "spinbus: " << e.what() << "\n";
    return kUsage;
  }

  const std::string text = config.format == cli::OutputFormat::Csv ? cli::to_csv(result)
                                                                    : cli::to_json(result);
  if (config.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream file(config.out_path);
    if (!file) {
      std::cerr << "spinbus: cannot write " << config.out_path << "\n";
      return kUsage;
    }
    file << text;
  }

  if (result.validation_failure) {
    for (const auto& r : result.records)
      if (!r["passed"].get<bool>())
        std::cerr << "FAILED " << r["check"].get<std::string>() << ": measured "
                  << r["measured"].dump() << " > " << r["tolerance"].dump() << " "
                  << r["detail"].get<std::string>() << "\n";
    return kValidation;
  }
  if (result.solver_failure) return kSolver;
  return kOk;
}
