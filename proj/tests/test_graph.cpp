#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "dap/graph.hpp"

using namespace dap;

namespace {

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST_CASE("in-neighborhood always contains the node itself") {
  const auto empty = DigraphSequence::static_graph(4, {});
  CHECK(empty.in_neighbors(0, 2) == std::vector<int>{2});
  CHECK(empty.in_degree(7, 2) == 1);

  const auto clique = builtin_topology(Topology::kClique, 4);
  CHECK(sorted(clique.in_neighbors(0, 0)) == std::vector<int>{0, 1, 2, 3});
  CHECK(clique.in_degree(0, 0) == 4);
}

TEST_CASE("directed cycle neighborhoods") {
  const auto cycle = DigraphSequence::static_graph(
      4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}});
  CHECK(sorted(cycle.in_neighbors(0, 1)) == std::vector<int>{0, 1});
  CHECK(sorted(cycle.out_neighbors(0, 1)) == std::vector<int>{1, 2});
  CHECK(sorted(cycle.out_neighbors(0, 2)) == std::vector<int>{2, 3});
}

TEST_CASE("out-neighbor of empty and complete graphs") {
  const auto empty = DigraphSequence::static_graph(4, {});
  CHECK(empty.out_neighbors(0, 2) == std::vector<int>{2});
  const auto clique = builtin_topology(Topology::kClique, 4);
  CHECK(sorted(clique.out_neighbors(0, 0)) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("star center degree counts all leaves") {
  const auto star = builtin_topology(Topology::kStar, 4);
  CHECK(star.in_degree(0, 0) == 4);
  CHECK(star.in_degree(0, 1) == 2);
}

TEST_CASE("node index out of range is rejected") {
  const auto g = DigraphSequence::static_graph(3, {});
  CHECK_THROWS_AS(g.in_neighbors(0, 3), std::out_of_range);
  CHECK_THROWS_AS(g.out_neighbors(0, -1), std::out_of_range);
}

TEST_CASE("duplicate and self edges are normalized away") {
  const auto g = DigraphSequence::static_graph(3, {{0, 1}, {0, 1}, {2, 2}});
  CHECK(g.edges(0).size() == 1);
  CHECK(g.in_degree(0, 1) == 2);
  CHECK(g.in_degree(0, 2) == 1);
}

TEST_CASE("in/out duality") {
  const auto g = DigraphSequence::static_graph(
      5, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 3}, {0, 3}});
  for (int i = 0; i < 5; ++i) {
    for (int j : g.in_neighbors(0, i)) {
      const auto& outs = g.out_neighbors(0, j);
      CHECK(std::find(outs.begin(), outs.end(), i) != outs.end());
    }
  }
}

TEST_CASE("builtin topology edge counts") {
  CHECK(builtin_topology(Topology::kClique, 4).edges(0).size() == 12);
  CHECK(builtin_topology(Topology::kCycle, 4).edges(0).size() == 8);
  CHECK(builtin_topology(Topology::kStar, 4).edges(0).size() == 6);
  CHECK(builtin_topology(Topology::kLine, 4).edges(0).size() == 6);
}

TEST_CASE("builtin topologies are 1-strongly connected") {
  for (Topology kind : {Topology::kClique, Topology::kCycle, Topology::kStar,
                        Topology::kLine}) {
    const auto g = builtin_topology(kind, 5);
    CHECK(check_q_strong_connectivity(g, 1, 1).pass);
    CHECK(g.is_symmetric(0));
  }
}

TEST_CASE("isolated node fails every connectivity window") {
  const auto g = DigraphSequence::static_graph(3, {{0, 1}, {1, 0}});
  const auto report = check_q_strong_connectivity(g, 3, 5);
  CHECK_FALSE(report.pass);
  CHECK(report.first_failing_window == 0);
}

TEST_CASE("periodic schedule connects exactly at the designed window") {
  // round 0: 0 <-> 1 only; round 1: 1 <-> 2 plus 2 <-> 0
  const auto seq = DigraphSequence::periodic(
      3, {{{0, 1}, {1, 0}}, {{1, 2}, {2, 1}, {2, 0}, {0, 2}}});
  CHECK(seq.period() == 2);
  CHECK(check_q_strong_connectivity(seq, 2, 4).pass);
  CHECK_FALSE(check_q_strong_connectivity(seq, 1, 4).pass);
}

TEST_CASE("single-edge rounds pass exactly at the designed window") {
  // every phase is one undirected edge of the 4-node line; only the union
  // of all three phases is connected
  const auto seq = DigraphSequence::periodic(
      4, {{{0, 1}, {1, 0}}, {{1, 2}, {2, 1}}, {{2, 3}, {3, 2}}});
  CHECK(check_q_strong_connectivity(seq, 3, 5).pass);
  CHECK_FALSE(check_q_strong_connectivity(seq, 2, 5).pass);
  CHECK_FALSE(check_q_strong_connectivity(seq, 1, 5).pass);
}

TEST_CASE("horizon shorter than Q is rejected") {
  const auto g = builtin_topology(Topology::kClique, 3);
  CHECK_THROWS_AS(check_q_strong_connectivity(g, 4, 2), std::invalid_argument);
}
