#include "spinbus/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <queue>
#include <utility>

#include "spinbus/errors.hpp"

namespace spinbus {

std::string to_string(Connection c) { return c == Connection::TypeA ? "A" : "B"; }

Connection parse_connection(std::string_view name) {
  std::string key;
  for (char ch : name)
    if (ch != '-' && ch != '_') key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (key == "a" || key == "typea") return Connection::TypeA;
  if (key == "b" || key == "typeb") return Connection::TypeB;
  throw InvalidArgument("unknown connection type '" + std::string(name) + "'");
}

Connection auto_triplet_connection(int n_rungs) {
  return n_rungs % 2 == 1 ? Connection::TypeA : Connection::TypeB;
}

void LadderSpec::validate() const {
  if (n_rungs < 1) throw InvalidArgument("n_rungs must be >= 1");
  if (!(j_medium > 0.0) || !std::isfinite(j_medium)) throw InvalidArgument("j_medium must be > 0");
  if (!(j_probe >= 0.0) || !std::isfinite(j_probe)) throw InvalidArgument("j_probe must be >= 0");
}

CouplingGraph::CouplingGraph(int n_sites) : n_sites_(n_sites) {
  if (n_sites < 1) throw InvalidArgument("graph needs at least one site");
}

void CouplingGraph::add_bond(int i, int j, double strength) {
  if (i < 0 || j < 0 || i >= n_sites_ || j >= n_sites_)
    throw InvalidArgument("bond endpoint out of range");
  if (i == j) throw InvalidArgument("self bond");
  if (!std::isfinite(strength)) throw InvalidArgument("non-finite bond strength");
  auto same_pair = [&](const Bond& b) {
    return (b.i == i && b.j == j) || (b.i == j && b.j == i);
  };
  if (std::any_of(bonds_.begin(), bonds_.end(), same_pair))
    throw InvalidArgument("duplicate bond");
  bonds_.push_back({i, j, strength});
}

CouplingGraph CouplingGraph::scaled(double factor) const {
  CouplingGraph out = *this;
  for (auto& b : out.bonds_) b.strength *= factor;
  return out;
}

CouplingGraph build_ladder(int n_rungs, double j) {
  if (n_rungs < 1) throw InvalidArgument("n_rungs must be >= 1");
  if (!(j > 0.0) || !std::isfinite(j)) throw InvalidArgument("ladder coupling must be > 0");
  CouplingGraph g(2 * n_rungs);
  for (int r = 0; r < n_rungs; ++r)
    g.add_bond(ladder_site(n_rungs, 0, r), ladder_site(n_rungs, 1, r), j);
  for (int leg = 0; leg < 2; ++leg)
    for (int r = 0; r + 1 < n_rungs; ++r)
      g.add_bond(ladder_site(n_rungs, leg, r), ladder_site(n_rungs, leg, r + 1), j);
  return g;
}

ProbeSites probe_sites(const LadderSpec& spec) {
  const int n = spec.n_rungs;
  ProbeSites p;
  p.qubit_a = 2 * n;
  p.qubit_b = 2 * n + 1;
  p.site_l = ladder_site(n, 0, 0);
  p.site_r = spec.connection == Connection::TypeA ? ladder_site(n, 0, n - 1)
                                                  : ladder_site(n, 1, n - 1);
  return p;
}

CouplingGraph medium_graph(const LadderSpec& spec) {
  spec.validate();
  return build_ladder(spec.n_rungs, spec.j_medium);
}

CouplingGraph attach_qubits(const LadderSpec& spec) {
  spec.validate();
  const CouplingGraph ladder = build_ladder(spec.n_rungs, spec.j_medium);
  const ProbeSites p = probe_sites(spec);
  CouplingGraph g(spec.total_sites());
  for (const Bond& b : ladder.bonds()) g.add_bond(b.i, b.j, b.strength);
  g.add_bond(p.qubit_a, p.site_l, spec.j_probe);
  g.add_bond(p.qubit_b, p.site_r, spec.j_probe);
  return g;
}

int predicted_ground_spin(const LadderSpec& spec) {
  spec.validate();
  const int n = spec.n_rungs;
  const ProbeSites p = probe_sites(spec);
  auto color = [n](int site) {
    const int leg = site / n;
    const int rung = site % n;
    return (leg + rung) % 2;
  };
  int counts[2] = {0, 0};
  for (int s = 0; s < 2 * n; ++s) ++counts[color(s)];
  ++counts[1 - color(p.site_l)];
  ++counts[1 - color(p.site_r)];
  return std::abs(counts[0] - counts[1]) / 2;
}

std::optional<std::vector<int>> bipartite_coloring(const CouplingGraph& graph) {
  const int n = graph.n_sites();
  std::vector<std::vector<int>> adj(n);
  for (const Bond& b : graph.bonds()) {
    adj[b.i].push_back(b.j);
    adj[b.j].push_back(b.i);
  }
  std::vector<int> color(n, -1);
  for (int start = 0; start < n; ++start) {
    if (color[start] >= 0) continue;
    color[start] = 0;
    std::queue<int> frontier;
    frontier.push(start);
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : adj[u]) {
        if (color[v] < 0) {
          color[v] = 1 - color[u];
          frontier.push(v);
        } else if (color[v] == color[u]) {
          return std::nullopt;
        }
      }
    }
  }
  return color;
}

}  // namespace spinbus
