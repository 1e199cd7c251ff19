#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dap/algorithm.hpp"
#include "dap/constraints.hpp"
#include "dap/graph.hpp"

namespace dap {

// A separable problem instance: min sum_i f_i(x) over X0 intersected with
// every agent's sampled constraint family.
struct ProblemSpec {
  std::string name;
  int dimension = 0;
  SimpleSet x0 = SimpleSet::full_space(0);
  std::vector<std::shared_ptr<const ObjectiveOracle>> objectives;
  std::vector<ConstraintSet> constraint_sets;

  std::optional<Eigen::VectorXd> known_x;
  std::optional<double> known_value;
  bool linear_objective = false;
  // bookkeeping notes surfaced in run metadata (conventions, bound choices)
  std::vector<std::string> notes;

  int agent_count() const { return static_cast<int>(objectives.size()); }
  double objective_value(const Eigen::VectorXd& x) const;
  void validate() const;
};

struct BoundEstimates {
  double objective = 0.0;   // empirical C_f
  double constraint = 0.0;  // empirical C_g
};

// Sampled subgradient bounds over X0; meaningful when X0 is bounded.
BoundEstimates estimate_bounds(const ProblemSpec& problem, RngStream& rng,
                               int samples = 256);

// Epigraph form: variables (y, t), objective sum_i t_i split as f_i = t_i,
// and each agent gains the link constraint f_i(y) - t_i <= 0.
ProblemSpec epigraph_transform(const ProblemSpec& original);

// Pairwise gossip averaging matrix: identity except the (i, j) block, which
// becomes the 2x2 averaging block. Symmetric, doubly stochastic, idempotent.
Eigen::MatrixXd averaging_matrix(int i, int j, int node_count);

// The optimal-gossip-averaging SDP over a fixed undirected connected graph.
// Decision vector is (s, p_ij for each directed edge); every agent shares
// the spectral LMI and additionally owns the simplex constraint on its own
// outgoing probabilities.
ProblemSpec gossip_sdp_problem(const DigraphSequence& graph);

// Layout helper for the gossip decision vector: variable 0 is s, then one
// variable per directed edge in this order.
std::vector<std::pair<int, int>> gossip_edge_variables(const DigraphSequence& graph);

// Small instances with known optima, used as test fixtures:
//   "median"  - two-agent least absolute deviation to {0, 2}, f* = 2
//   "lp"      - min x1 + x2 with x >= 0 as per-agent halfspaces, f* = 0
//   "lmi"     - one-agent LMI feasibility, feasible iff x >= 1, f* = 0
std::vector<ProblemSpec> builtin_test_problems();
ProblemSpec builtin_test_problem(const std::string& name);

// n-agent variant of the builtin LP (agent i owns coordinate i); the
// canonical builtin uses n = 2.
ProblemSpec separable_lp_problem(int agents);

// Convenience wrapper over the low-level round.
void dap_round(std::vector<AgentState>& states, const WeightMatrix& weights,
               const DigraphSequence& topology, const StepSizeSchedule& schedule,
               long round, const ProblemSpec& problem);

}  // namespace dap
