#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dap {

// Time-varying directed communication topology. Rounds map onto a periodic
// schedule of edge sets; a static graph is a schedule of period 1. Edges are
// ordered pairs (from, to): "from" may send to "to". Self-loops are implied
// for every node in every round and never stored.
class DigraphSequence {
 public:
  using Edge = std::pair<int, int>;

  static DigraphSequence static_graph(int node_count,
                                      const std::vector<Edge>& edges);
  static DigraphSequence periodic(int node_count,
                                  const std::vector<std::vector<Edge>>& phases);

  int node_count() const { return node_count_; }
  int period() const { return static_cast<int>(in_.size()); }
  bool is_static() const { return period() == 1; }

  // Neighbor sets at round k. Both always contain i itself.
  const std::vector<int>& in_neighbors(long round, int node) const;
  const std::vector<int>& out_neighbors(long round, int node) const;
  int in_degree(long round, int node) const;

  // Non-self directed edges of the round-k graph.
  const std::vector<Edge>& edges(long round) const;

  // j -> i present iff i -> j present, for the round-k graph.
  bool is_symmetric(long round) const;

 private:
  DigraphSequence() = default;
  int phase(long round) const {
    return static_cast<int>(round % static_cast<long>(in_.size()));
  }

  int node_count_ = 0;
  // per phase, per node, sorted with self included
  std::vector<std::vector<std::vector<int>>> in_;
  std::vector<std::vector<std::vector<int>>> out_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<bool> symmetric_;
};

struct ConnectivityReport {
  bool pass = false;
  long first_failing_window = -1;  // start round of the first bad window
};

// Assumption-5 style check: every window [k, k+Q-1] with k+Q <= horizon must
// have a strongly connected union graph.
ConnectivityReport check_q_strong_connectivity(const DigraphSequence& seq,
                                               int q, long horizon);

enum class Topology { kClique, kCycle, kStar, kLine };

Topology topology_from_string(const std::string& name);
std::string to_string(Topology kind);

// Static undirected topologies as symmetric digraphs. Star center is node 0.
DigraphSequence builtin_topology(Topology kind, int node_count);

}  // namespace dap
