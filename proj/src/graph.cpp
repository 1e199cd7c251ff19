#include "dap/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace dap {

namespace {

void check_node(int node, int n) {
  if (node < 0 || node >= n) {
    throw std::out_of_range("node index " + std::to_string(node) +
                            " outside [0, " + std::to_string(n) + ")");
  }
}

}  // namespace

DigraphSequence DigraphSequence::static_graph(int node_count,
                                              const std::vector<Edge>& edges) {
  return periodic(node_count, {edges});
}

DigraphSequence DigraphSequence::periodic(
    int node_count, const std::vector<std::vector<Edge>>& phases) {
  if (node_count <= 0) throw std::invalid_argument("node_count must be positive");
  if (phases.empty()) throw std::invalid_argument("schedule needs at least one phase");

  DigraphSequence seq;
  seq.node_count_ = node_count;
  for (const auto& phase : phases) {
    std::set<Edge> uniq;
    for (const auto& [from, to] : phase) {
      check_node(from, node_count);
      check_node(to, node_count);
      if (from == to) continue;  // self-loops are implicit
      uniq.insert({from, to});
    }
    std::vector<std::vector<int>> in(node_count), out(node_count);
    for (int i = 0; i < node_count; ++i) {
      in[i].push_back(i);
      out[i].push_back(i);
    }
    bool symmetric = true;
    for (const auto& [from, to] : uniq) {
      in[to].push_back(from);
      out[from].push_back(to);
      if (!uniq.count({to, from})) symmetric = false;
    }
    for (int i = 0; i < node_count; ++i) {
      std::sort(in[i].begin(), in[i].end());
      std::sort(out[i].begin(), out[i].end());
    }
    seq.in_.push_back(std::move(in));
    seq.out_.push_back(std::move(out));
    seq.edges_.emplace_back(uniq.begin(), uniq.end());
    seq.symmetric_.push_back(symmetric);
  }
  return seq;
}

const std::vector<int>& DigraphSequence::in_neighbors(long round,
                                                      int node) const {
  check_node(node, node_count_);
  return in_[phase(round)][node];
}

const std::vector<int>& DigraphSequence::out_neighbors(long round,
                                                       int node) const {
  check_node(node, node_count_);
  return out_[phase(round)][node];
}

int DigraphSequence::in_degree(long round, int node) const {
  return static_cast<int>(in_neighbors(round, node).size());
}

const std::vector<DigraphSequence::Edge>& DigraphSequence::edges(
    long round) const {
  return edges_[phase(round)];
}

bool DigraphSequence::is_symmetric(long round) const {
  return symmetric_[phase(round)];
}

namespace {

// Reachability over an adjacency list; used forward and reversed.
std::vector<bool> reachable_from(const std::vector<std::vector<int>>& adj,
                                 int start) {
  std::vector<bool> seen(adj.size(), false);
  std::vector<int> stack{start};
  seen[start] = true;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adj[u]) {
      if (!seen[v]) {
        seen[v] = true;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

bool strongly_connected(const std::vector<std::vector<int>>& fwd,
                        const std::vector<std::vector<int>>& rev) {
  const auto down = reachable_from(fwd, 0);
  const auto up = reachable_from(rev, 0);
  for (size_t i = 0; i < fwd.size(); ++i) {
    if (!down[i] || !up[i]) return false;
  }
  return true;
}

}  // namespace

ConnectivityReport check_q_strong_connectivity(const DigraphSequence& seq,
                                               int q, long horizon) {
  if (q <= 0) throw std::invalid_argument("Q must be positive");
  if (horizon < q) throw std::invalid_argument("horizon shorter than Q");

  const int n = seq.node_count();
  ConnectivityReport report;
  report.pass = true;

  // Windows repeat with the schedule period; checking one period of window
  // starts covers every k >= 0 as long as horizon allows it.
  const long starts = std::min<long>(horizon - q + 1, seq.period());
  for (long k = 0; k < starts; ++k) {
    std::vector<std::set<int>> fwd(n), rev(n);
    for (long l = 0; l < q; ++l) {
      for (const auto& [from, to] : seq.edges(k + l)) {
        fwd[from].insert(to);
        rev[to].insert(from);
      }
    }
    std::vector<std::vector<int>> f(n), r(n);
    for (int i = 0; i < n; ++i) {
      f[i].assign(fwd[i].begin(), fwd[i].end());
      r[i].assign(rev[i].begin(), rev[i].end());
    }
    if (!strongly_connected(f, r)) {
      report.pass = false;
      report.first_failing_window = k;
      return report;
    }
  }
  return report;
}

Topology topology_from_string(const std::string& name) {
  if (name == "clique") return Topology::kClique;
  if (name == "cycle") return Topology::kCycle;
  if (name == "star") return Topology::kStar;
  if (name == "line") return Topology::kLine;
  throw std::invalid_argument("unknown topology: " + name);
}

std::string to_string(Topology kind) {
  switch (kind) {
    case Topology::kClique: return "clique";
    case Topology::kCycle: return "cycle";
    case Topology::kStar: return "star";
    case Topology::kLine: return "line";
  }
  return "?";
}

DigraphSequence builtin_topology(Topology kind, int node_count) {
  if (node_count <= 0) throw std::invalid_argument("node_count must be positive");
  std::vector<DigraphSequence::Edge> edges;
  auto undirected = [&edges](int a, int b) {
    edges.push_back({a, b});
    edges.push_back({b, a});
  };
  switch (kind) {
    case Topology::kClique:
      for (int i = 0; i < node_count; ++i)
        for (int j = i + 1; j < node_count; ++j) undirected(i, j);
      break;
    case Topology::kCycle:
      if (node_count == 2) {
        undirected(0, 1);
      } else {
        for (int i = 0; i < node_count; ++i) undirected(i, (i + 1) % node_count);
      }
      break;
    case Topology::kStar:
      for (int i = 1; i < node_count; ++i) undirected(0, i);
      break;
    case Topology::kLine:
      for (int i = 0; i + 1 < node_count; ++i) undirected(i, i + 1);
      break;
  }
  return DigraphSequence::static_graph(node_count, edges);
}

}  // namespace dap
