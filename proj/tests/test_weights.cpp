#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dap/weights.hpp"
#include "testing.hpp"

using namespace dap;

TEST_CASE("equal-neighbor weights on degenerate and complete graphs") {
  const auto empty = DigraphSequence::static_graph(3, {});
  CHECK(equal_neighbor_weights(empty, 0).entries.isApprox(
      Eigen::MatrixXd::Identity(3, 3)));

  const auto clique = builtin_topology(Topology::kClique, 4);
  const auto w = equal_neighbor_weights(clique, 0);
  CHECK(w.entries.isApproxToConstant(0.25));
  CHECK(w.nu == doctest::Approx(0.25));
  CHECK(w.kind == WeightKind::kRowStochastic);
}

TEST_CASE("equal-neighbor weights on the star are not column stochastic") {
  const auto star = builtin_topology(Topology::kStar, 4);
  const auto w = equal_neighbor_weights(star, 0);
  for (int j = 0; j < 4; ++j) CHECK(w.entries(0, j) == doctest::Approx(0.25));
  CHECK(w.entries(1, 0) == doctest::Approx(0.5));
  CHECK(w.entries(1, 1) == doctest::Approx(0.5));
  CHECK(w.entries(1, 2) == 0.0);

  const auto report = validate_assumption1(w, star, 0);
  CHECK(report.graph_respected);
  CHECK(report.nu_bound);
  CHECK(report.row_stochastic);
  CHECK_FALSE(report.column_stochastic);
}

TEST_CASE("metropolis weights on tiny graphs") {
  const auto empty = DigraphSequence::static_graph(3, {});
  CHECK(metropolis_weights(empty, 0).entries.isApprox(
      Eigen::MatrixXd::Identity(3, 3)));

  const auto pair = builtin_topology(Topology::kClique, 2);
  CHECK(metropolis_weights(pair, 0).entries.isApproxToConstant(0.5));
}

TEST_CASE("metropolis weights on the star balance rows and columns") {
  const auto star = builtin_topology(Topology::kStar, 4);
  const auto w = metropolis_weights(star, 0);
  CHECK(w.entries(0, 1) == doctest::Approx(0.25));
  CHECK(w.entries(1, 1) == doctest::Approx(0.75));
  CHECK(w.entries(0, 0) == doctest::Approx(0.25));

  const auto report = validate_assumption1(w, star, 0);
  CHECK(report.all());
  CHECK(report.worst_row_gap <= 1e-12);
  CHECK(report.worst_column_gap <= 1e-12);
}

TEST_CASE("metropolis rejects asymmetric graphs") {
  const auto directed = DigraphSequence::static_graph(3, {{0, 1}, {1, 2}, {2, 0}});
  CHECK_THROWS_AS(metropolis_weights(directed, 0), std::invalid_argument);
}

TEST_CASE("assumption-1 audit flags weights outside the topology") {
  const auto empty = DigraphSequence::static_graph(2, {});
  WeightMatrix w = equal_neighbor_weights(empty, 0);
  w.entries << 0.5, 0.5, 0.5, 0.5;  // edge (1,0)/(0,1) do not exist
  const auto report = validate_assumption1(w, empty, 0);
  CHECK_FALSE(report.graph_respected);
  CHECK(report.worst_offending_entry == doctest::Approx(0.5));
  CHECK(report.row_stochastic);
}

TEST_CASE("metropolis satisfies assumption 1 on every builtin topology") {
  for (Topology kind : {Topology::kClique, Topology::kCycle, Topology::kStar,
                        Topology::kLine}) {
    for (int n : {2, 4, 9}) {
      const auto g = builtin_topology(kind, n);
      const auto w = metropolis_weights(g, 0);
      CHECK(validate_assumption1(w, g, 0).all());
      CHECK(w.nu >= 1.0 / n - 1e-15);
    }
  }
}

TEST_CASE("equal-neighbor satisfies clauses a, b and row stochasticity") {
  RngStream rng(7, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + rng.next_int(6);
    std::vector<DigraphSequence::Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && rng.next_double() < 0.4) edges.push_back({i, j});
    const auto g = DigraphSequence::static_graph(n, edges);
    const auto report = validate_assumption1(equal_neighbor_weights(g, 0), g, 0);
    CHECK(report.graph_respected);
    CHECK(report.nu_bound);
    CHECK(report.row_stochastic);
  }
}

TEST_CASE("doubly stochastic averaging cannot increase a convex statistic") {
  RngStream rng(11, 0);
  const auto g = builtin_topology(Topology::kCycle, 6);
  const auto w = metropolis_weights(g, 0);
  const int dim = 3;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Eigen::VectorXd> x(6);
    for (auto& xi : x) xi = testing::random_vector(rng, dim, 2.0);
    const Eigen::VectorXd anchor = testing::random_vector(rng, dim);

    double before = 0.0, after = 0.0;
    Eigen::VectorXd mean_before = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd mean_after = Eigen::VectorXd::Zero(dim);
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
      for (int j = 0; j < 6; ++j) p += w.entries(i, j) * x[j];
      before += (x[i] - anchor).squaredNorm();
      after += (p - anchor).squaredNorm();
      mean_before += x[i] / 6.0;
      mean_after += p / 6.0;
    }
    CHECK(after <= before + 1e-12);
    CHECK((mean_after - mean_before).norm() <= 1e-12);
  }
}

TEST_CASE("stationary vector of a doubly stochastic matrix is uniform") {
  const auto g = builtin_topology(Topology::kCycle, 5);
  const auto pi = stationary_left_eigenvector(metropolis_weights(g, 0));
  CHECK(pi.isApproxToConstant(0.2, 1e-9));

  const auto pair = builtin_topology(Topology::kClique, 2);
  const auto pi2 = stationary_left_eigenvector(equal_neighbor_weights(pair, 0));
  CHECK(pi2.isApproxToConstant(0.5, 1e-9));
}

TEST_CASE("stationary vector of the equal-neighbor star") {
  const auto star = builtin_topology(Topology::kStar, 4);
  const auto pi = stationary_left_eigenvector(equal_neighbor_weights(star, 0));
  CHECK(pi[0] == doctest::Approx(0.4).epsilon(1e-8));
  for (int leaf = 1; leaf < 4; ++leaf) {
    CHECK(pi[leaf] == doctest::Approx(0.2).epsilon(1e-8));
  }
  // residual contract
  const auto w = equal_neighbor_weights(star, 0);
  CHECK((w.entries.transpose() * pi - pi).lpNorm<Eigen::Infinity>() <= 1e-10);
}

TEST_CASE("stationary vector rejects a matrix with an absorbing node") {
  WeightMatrix w;
  w.entries.resize(2, 2);
  w.entries << 1.0, 0.0, 1.0, 0.0;  // all mass drains into node 0
  CHECK_THROWS_AS(stationary_left_eigenvector(w), std::runtime_error);

  WeightMatrix not_stochastic;
  not_stochastic.entries = Eigen::MatrixXd::Constant(2, 2, 0.3);
  CHECK_THROWS_AS(stationary_left_eigenvector(not_stochastic),
                  std::invalid_argument);
}
