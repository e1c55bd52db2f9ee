#include "spinbus/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <thread>

#include "spinbus/effective.hpp"
#include "spinbus/errors.hpp"
#include "spinbus/observables.hpp"

namespace spinbus::cli {

namespace {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

const std::vector<std::string> kCommonColumns = {
    "experiment", "n_rungs", "distance", "j_medium", "j_probe", "connection",
    "tol",        "max_iter", "seed",    "version",  "status",  "error"};

std::vector<std::string> with_common(std::initializer_list<std::string> extra) {
  std::vector<std::string> cols = kCommonColumns;
  cols.insert(cols.end(), extra.begin(), extra.end());
  return cols;
}

struct GridPoint {
  LadderSpec spec;
};

std::vector<GridPoint> grid(const ExperimentConfig& c) {
  std::vector<GridPoint> points;
  for (int n : c.resolved_n_rungs())
    for (double j : c.resolved_j_medium())
      points.push_back({LadderSpec{n, j, c.j_probe, c.connection_for(n)}});
  return points;
}

ResultRecord echo(const ExperimentConfig& c, const LadderSpec& s) {
  ResultRecord r;
  r["experiment"] = to_string(c.experiment);
  r["n_rungs"] = s.n_rungs;
  r["distance"] = s.distance();
  r["j_medium"] = s.j_medium;
  r["j_probe"] = s.j_probe;
  r["connection"] = to_string(s.connection);
  r["tol"] = c.solver.tol;
  r["max_iter"] = c.solver.max_matvecs;
  r["seed"] = c.solver.seed;
  r["version"] = std::string(kVersion);
  r["status"] = "ok";
  r["error"] = "";
  return r;
}

/// Runs `work` for every point on a bounded pool; output keeps grid order.
RunResult run_grid(const ExperimentConfig& c, std::vector<std::string> columns,
                   const std::function<std::vector<ResultRecord>(const LadderSpec&)>& work) {
  c.validate();
  const std::vector<GridPoint> points = grid(c);
  std::vector<std::vector<ResultRecord>> slots(points.size());
  std::vector<char> failed(points.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      try {
        slots[i] = work(points[i].spec);
      } catch (const Error& e) {
        ResultRecord r = echo(c, points[i].spec);
        r["status"] = "error";
        r["error"] = e.what();
        slots[i] = {r};
        failed[i] = 1;
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(c.threads, static_cast<int>(points.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  RunResult out;
  out.experiment = c.experiment;
  out.columns = std::move(columns);
  for (auto& s : slots)
    for (auto& r : s) out.records.push_back(std::move(r));
  out.solver_failure = std::any_of(failed.begin(), failed.end(), [](char f) { return f != 0; });
  return out;
}

template <typename T>
std::vector<T> scalar_or_list(const json& v, const char* key) {
  if (v.is_array()) {
    if (v.empty()) throw ConfigError(std::string(key) + " must not be an empty list");
    return v.get<std::vector<T>>();
  }
  return {v.get<T>()};
}

std::string csv_cell(const ojson& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
  }
  if (v.is_number_float()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

ojson finite_or_null(double x) { return std::isfinite(x) ? ojson(x) : ojson(nullptr); }

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Gap: return "gap";
    case Experiment::Jeff: return "jeff";
    case Experiment::FidelityTable: return "fidelity-table";
    case Experiment::Scaling: return "scaling";
    case Experiment::Transfer: return "transfer";
    case Experiment::Validate: return "validate";
  }
  return "unknown";
}

Experiment parse_experiment(std::string_view name) {
  for (Experiment e : {Experiment::Gap, Experiment::Jeff, Experiment::FidelityTable,
                       Experiment::Scaling, Experiment::Transfer, Experiment::Validate})
    if (to_string(e) == name) return e;
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
  for (int n : resolved_n_rungs())
    if (n < 1) throw ConfigError("n_rungs entries must be >= 1");
  for (double j : resolved_j_medium())
    if (!(j > 0.0)) throw ConfigError("j_medium entries must be > 0");
  if (!(j_probe >= 0.0)) throw ConfigError("j_probe must be >= 0");
  if (!(solver.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (solver.max_matvecs < 1) throw ConfigError("max_iter must be >= 1");
  if (!(resolvent_tol > 0.0)) throw ConfigError("resolvent_tol must be > 0");
  if (n_samples < 2) throw ConfigError("n_samples must be >= 2");
  if (threads < 1) throw ConfigError("threads must be >= 1");
  if (connection != "auto-triplet") {
    try {
      parse_connection(connection);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
}

std::vector<int> ExperimentConfig::resolved_n_rungs() const {
  if (!n_rungs.empty()) return n_rungs;
  switch (experiment) {
    case Experiment::Scaling:
    case Experiment::FidelityTable: return {3, 4, 5, 6, 7, 9};
    case Experiment::Transfer: return {2};
    default: return {3};
  }
}

std::vector<double> ExperimentConfig::resolved_j_medium() const {
  if (!j_medium.empty()) return j_medium;
  switch (experiment) {
    case Experiment::Scaling:
    case Experiment::FidelityTable: return {10.0, 20.0, 40.0};
    default: return {10.0};
  }
}

Connection ExperimentConfig::connection_for(int n) const {
  if (connection == "auto-triplet") return auto_triplet_connection(n);
  return parse_connection(connection);
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "experiment") c.experiment = parse_experiment(v.get<std::string>());
      else if (key == "n_rungs") c.n_rungs = scalar_or_list<int>(v, "n_rungs");
      else if (key == "distance") {
        c.n_rungs.clear();
        for (int l : scalar_or_list<int>(v, "distance")) c.n_rungs.push_back(l - 1);
      } else if (key == "j_medium" || key == "j") c.j_medium = scalar_or_list<double>(v, "j_medium");
      else if (key == "j_probe" || key == "j0") c.j_probe = v.get<double>();
      else if (key == "connection") c.connection = v.get<std::string>();
      else if (key == "tol") c.solver.tol = v.get<double>();
      else if (key == "max_iter") c.solver.max_matvecs = v.get<int>();
      else if (key == "seed") c.solver.seed = v.get<std::uint64_t>();
      else if (key == "resolvent_tol") c.resolvent_tol = v.get<double>();
      else if (key == "t_max") c.t_max = v.get<double>();
      else if (key == "n_samples") c.n_samples = v.get<int>();
      else if (key == "out") c.out_path = v.get<std::string>();
      else if (key == "format") {
        const auto f = v.get<std::string>();
        if (f == "csv") c.format = OutputFormat::Csv;
        else if (f == "json") c.format = OutputFormat::Json;
        else throw ConfigError("format must be csv or json");
      } else if (key == "threads") c.threads = v.get<int>();
      else if (key == "mutate_bond_sign") c.mutate_bond_sign = v.get<bool>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

RunResult run_gap(const ExperimentConfig& c) {
  auto cols = with_common({"ladder_ground_energy", "ladder_gap", "ladder_gap_over_j",
                           "ladder_ground_spin", "ground_energy", "ground_spin",
                           "first_excited_spin", "gap", "predicted_ground_spin",
                           "lieb_consistent", "matvecs"});
  return run_grid(c, cols, [&](const LadderSpec& s) {
    ResultRecord r = echo(c, s);
    const MultipletReport ladder = ground_multiplet(medium_graph(s), c.solver, s.j_medium);
    r["ladder_ground_energy"] = ladder.ground_energy;
    r["ladder_gap"] = ladder.gap;
    r["ladder_gap_over_j"] = ladder.gap / s.j_medium;
    r["ladder_ground_spin"] = ladder.ground_spin;
    const MultipletReport full = ground_multiplet(s, c.solver);
    r["ground_energy"] = full.ground_energy;
    r["ground_spin"] = full.ground_spin;
    r["first_excited_spin"] = full.first_excited_spin;
    r["gap"] = full.gap;
    const int predicted = predicted_ground_spin(s);
    r["predicted_ground_spin"] = predicted;
    r["lieb_consistent"] = (full.ground_spin == predicted);
    r["matvecs"] = ladder.matvecs + full.matvecs;
    return std::vector<ResultRecord>{r};
  });
}

RunResult run_jeff(const ExperimentConfig& c) {
  auto cols = with_common({"resolvent_tol", "j_eff_gap", "j_eff_resolvent", "epsilon_resolvent",
                           "t_lr", "t_ll", "t_rr", "j_eff_sum_over_states",
                           "epsilon_sum_over_states", "resolvent_iterations",
                           "resolvent_residual", "matvecs"});
  return run_grid(c, cols, [&](const LadderSpec& s) {
    ResultRecord r = echo(c, s);
    r["resolvent_tol"] = c.resolvent_tol;
    const PerturbationResult gap = jeff_gap_splitting(s, c.solver);
    const PerturbationResult res = jeff_resolvent(s, c.resolvent_tol, c.solver);
    r["j_eff_gap"] = gap.j_eff;
    r["j_eff_resolvent"] = res.j_eff;
    r["epsilon_resolvent"] = res.epsilon;
    r["t_lr"] = res.t_lr;
    r["t_ll"] = res.t_ll;
    r["t_rr"] = res.t_rr;
    if (make_operator(medium_graph(s), 0).dim() <= kDenseLimit) {
      const PerturbationResult sos = jeff_sum_over_states(s);
      r["j_eff_sum_over_states"] = sos.j_eff;
      r["epsilon_sum_over_states"] = sos.epsilon;
    } else {
      r["j_eff_sum_over_states"] = nullptr;
      r["epsilon_sum_over_states"] = nullptr;
    }
    r["resolvent_iterations"] = res.iterations;
    r["resolvent_residual"] = res.residual;
    r["matvecs"] = gap.matvecs + res.matvecs;
    return std::vector<ResultRecord>{r};
  });
}

RunResult run_scaling(const ExperimentConfig& c) {
  auto cols = with_common({"resolvent_tol", "j_eff_gap", "j_eff_resolvent", "j_eff_L_J",
                           "j_eff_L_J_resolvent", "matvecs"});
  return run_grid(c, cols, [&](const LadderSpec& s) {
    ResultRecord r = echo(c, s);
    r["resolvent_tol"] = c.resolvent_tol;
    const PerturbationResult gap = jeff_gap_splitting(s, c.solver);
    const PerturbationResult res = jeff_resolvent(s, c.resolvent_tol, c.solver);
    const double lj = s.distance() * s.j_medium;
    r["j_eff_gap"] = gap.j_eff;
    r["j_eff_resolvent"] = res.j_eff;
    r["j_eff_L_J"] = gap.j_eff * lj;
    r["j_eff_L_J_resolvent"] = res.j_eff * lj;
    r["matvecs"] = gap.matvecs + res.matvecs;
    return std::vector<ResultRecord>{r};
  });
}

RunResult run_fidelity_table(const ExperimentConfig& c) {
  auto cols = with_common({"state", "j", "m", "energy", "c00_sq", "c10_sq", "c11_sq", "c1m1_sq",
                           "proj_c00_sq", "proj_c10_sq", "proj_c11_sq", "proj_c1m1_sq",
                           "p_up_up", "p_down_down"});
  return run_grid(c, cols, [&](const LadderSpec& s) {
    std::vector<ResultRecord> rows;
    for (const FidelityRow& f : fidelity_report(s, c.solver)) {
      ResultRecord r = echo(c, s);
      r["state"] = f.state;
      r["j"] = f.j;
      r["m"] = f.m;
      r["energy"] = f.energy;
      r["c00_sq"] = f.formula.c00_sq;
      r["c10_sq"] = f.formula.c10_sq;
      r["c11_sq"] = f.formula.c11_sq;
      r["c1m1_sq"] = f.formula.c1m1_sq;
      r["proj_c00_sq"] = f.projector.c00_sq;
      r["proj_c10_sq"] = f.projector.c10_sq;
      r["proj_c11_sq"] = f.projector.c11_sq;
      r["proj_c1m1_sq"] = f.projector.c1m1_sq;
      r["p_up_up"] = f.p_up_up;
      r["p_down_down"] = f.p_down_down;
      rows.push_back(std::move(r));
    }
    return rows;
  });
}

RunResult run_transfer(const ExperimentConfig& c) {
  auto cols = with_common({"t_max", "n_samples", "j_eff_used", "t_star", "t_star_effective",
                           "peak_fidelity", "norm_drift", "energy_drift", "sample", "time",
                           "fidelity_b", "fidelity_effective"});
  return run_grid(c, cols, [&](const LadderSpec& s) {
    const TransferCurve curve = transfer_experiment(s, c.t_max, c.n_samples, c.solver);
    std::vector<ResultRecord> rows;
    for (std::size_t i = 0; i < curve.times.size(); ++i) {
      ResultRecord r = echo(c, s);
      r["t_max"] = c.t_max;
      r["n_samples"] = c.n_samples;
      r["j_eff_used"] = curve.j_eff_used;
      r["t_star"] = curve.t_star;
      r["t_star_effective"] = curve.j_eff_used != 0.0
                                  ? finite_or_null(std::numbers::pi / std::abs(curve.j_eff_used))
                                  : ojson(nullptr);
      r["peak_fidelity"] = curve.peak_fidelity;
      r["norm_drift"] = curve.max_norm_drift;
      r["energy_drift"] = curve.max_energy_drift;
      r["sample"] = i;
      r["time"] = curve.times[i];
      r["fidelity_b"] = curve.fidelity_b[i];
      r["fidelity_effective"] = effective_transfer(curve.j_eff_used, curve.times[i]);
      rows.push_back(std::move(r));
    }
    return rows;
  });
}

RunResult run_experiment(const ExperimentConfig& c) {
  switch (c.experiment) {
    case Experiment::Gap: return run_gap(c);
    case Experiment::Jeff: return run_jeff(c);
    case Experiment::FidelityTable: return run_fidelity_table(c);
    case Experiment::Scaling: return run_scaling(c);
    case Experiment::Transfer: return run_transfer(c);
    case Experiment::Validate: return run_validate(c);
  }
  throw ConfigError("unknown experiment");
}

std::string to_csv(const RunResult& result) {
  std::ostringstream os;
  for (std::size_t i = 0; i < result.columns.size(); ++i)
    os << (i ? "," : "") << result.columns[i];
  os << '\n';
  for (const ResultRecord& r : result.records) {
    for (std::size_t i = 0; i < result.columns.size(); ++i) {
      const auto it = r.find(result.columns[i]);
      os << (i ? "," : "") << (it == r.end() ? std::string() : csv_cell(*it));
    }
    os << '\n';
  }
  return os.str();
}

std::string to_json(const RunResult& result) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ResultRecord& r : result.records) arr.push_back(r);
  return arr.dump(2) + "\n";
}

}  // namespace spinbus::cli
