#pragma once

#include <Eigen/Dense>

#include "dap/problems.hpp"

namespace dap {

struct ReferenceSolution {
  Eigen::VectorXd x;
  double value = 0.0;
  double residual = 0.0;  // max constraint violation at x
  long iterations = 0;
  bool certified = false;  // objective stabilized within the budget
  std::string method;
};

// Single-agent reference solver: the same subgradient/Polyak updates with
// every agent's objective and constraint pooled, cycling deterministically
// over every component each iteration instead of sampling. Ends with
// feasibility-only sweeps so the reported point satisfies residual <= 1e-8.
// Intended for small instances only.
ReferenceSolution centralized_solve(const ProblemSpec& problem, long budget);

// Direct eigenvalue search for the gossip SDP over a gridded symmetric
// family of probability matrices. Cycles (including cliques and single
// edges) collapse to at most one free parameter; other graphs are searched
// on a full per-row simplex grid and must be small.
ReferenceSolution brute_force_gossip(const DigraphSequence& graph,
                                     int grid_resolution);

}  // namespace dap
