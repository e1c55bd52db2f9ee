#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spinbus {

/// How the two probe qubits attach to the ladder ends.
///
/// TypeA: both on leg 0 (rung 0 and rung N-1). TypeB: diagonal corners
/// (leg 0 rung 0, leg 1 rung N-1). With TypeA an even number of rungs gives
/// a singlet ground state; TypeB flips the parity.
enum class Connection { TypeA, TypeB };

std::string to_string(Connection c);
Connection parse_connection(std::string_view name);

/// Connection that puts the triplet below the singlet for a given rung count.
Connection auto_triplet_connection(int n_rungs);

struct LadderSpec {
  int n_rungs = 2;
  double j_medium = 1.0;
  double j_probe = 0.0;
  Connection connection = Connection::TypeA;

  /// Qubit separation L = N + 1.
  int distance() const { return n_rungs + 1; }
  int total_sites() const { return 2 * n_rungs + 2; }

  /// Throws InvalidArgument on n_rungs < 1, j_medium <= 0 or j_probe < 0.
  void validate() const;
};

struct Bond {
  int i = 0;
  int j = 0;
  double strength = 0.0;
};

/// Sites plus isotropic Heisenberg bonds, H = sum_b J_b S_i . S_j.
class CouplingGraph {
 public:
  explicit CouplingGraph(int n_sites);

  /// Rejects self bonds, out-of-range sites and repeated unordered pairs.
  void add_bond(int i, int j, double strength);

  int n_sites() const { return n_sites_; }
  const std::vector<Bond>& bonds() const { return bonds_; }

  /// Copy with every bond strength multiplied by `factor`.
  CouplingGraph scaled(double factor) const;

 private:
  int n_sites_;
  std::vector<Bond> bonds_;
};

/// Leg-major site index: leg * n_rungs + rung.
constexpr int ladder_site(int n_rungs, int leg, int rung) { return leg * n_rungs + rung; }

/// Open two-leg ladder: n_rungs rung bonds followed by 2(n_rungs-1) leg bonds.
CouplingGraph build_ladder(int n_rungs, double j);

/// Where the qubits sit and which ladder sites they couple to.
struct ProbeSites {
  int qubit_a = 0;
  int qubit_b = 0;
  int site_l = 0;
  int site_r = 0;
};

ProbeSites probe_sites(const LadderSpec& spec);

/// Medium only (the isolated ladder of `spec`).
CouplingGraph medium_graph(const LadderSpec& spec);

/// Ladder plus qubit A = 2N, qubit B = 2N+1 and their two probe bonds.
CouplingGraph attach_qubits(const LadderSpec& spec);

/// Ground-state total spin |n_even - n_odd| / 2 from the sublattice imbalance.
int predicted_ground_spin(const LadderSpec& spec);

/// Two-coloring of the graph, or nullopt if some bond joins equal colors.
std::optional<std::vector<int>> bipartite_coloring(const CouplingGraph& graph);

}  // namespace spinbus
