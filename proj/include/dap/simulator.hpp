#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dap/problems.hpp"
#include "dap/weights.hpp"

namespace dap {

enum class WeightScheme { kMetropolis, kEqualNeighbor };

WeightScheme weight_scheme_from_string(const std::string& name);
std::string to_string(WeightScheme scheme);

// Convergence rule from the experiments: every agent within a relative
// consensus tolerance of the network average and the summed constraint
// violation below a threshold. The local-average mode compares each agent
// against the mean of its in-neighborhood instead of the global mean.
struct TerminationRule {
  double consensus_rel_tol = 1e-4;
  double feasibility_tol = 1e-3;
  bool local_average = false;
};

struct RunConfig {
  const ProblemSpec* problem = nullptr;
  DigraphSequence topology = builtin_topology(Topology::kClique, 1);
  WeightScheme scheme = WeightScheme::kMetropolis;
  StepSizeSchedule stepsize;
  std::uint64_t seed = 0;
  long max_rounds = 50000;
  TerminationRule termination;
  int metric_stride = 10;
};

struct MetricsRow {
  long round = 0;
  double consensus_error = 0.0;     // max_i ||x_i - xbar||
  double max_violation = 0.0;       // over agents and their families
  double total_violation = 0.0;
  double objective_gap = 0.0;       // NaN when no reference value is known
  double alpha = 0.0;
  double max_perturbation = 0.0;    // max_i ||x_i - p_i||
  double weighted_consensus_error = 0.0;  // against the pi-weighted mean
};

struct MetricsTrace {
  std::vector<MetricsRow> rows;
  // partial sums of alpha_k ||e_{i,k}||, one per agent (Lemma-6 diagnostic)
  Eigen::VectorXd alpha_e_partial_sums;
  // same sums restricted to the final tail of the run
  Eigen::VectorXd alpha_e_tail_increment;
};

struct RunResult {
  std::vector<AgentState> final_states;
  MetricsTrace trace;
  bool converged = false;
  long rounds = 0;  // rounds executed (= convergence round when converged)
  Eigen::VectorXd mean_final;
  std::vector<std::string> warnings;
  // measured wall time at each sampled row; kept outside MetricsTrace so the
  // trace itself stays a pure function of the config
  std::vector<double> wallclock_ms;
};

struct FeasibilityAudit {
  double max_violation = 0.0;
  double total_violation = 0.0;
  // (agent, omega index, violation) for every component
  std::vector<std::tuple<int, int, double>> per_constraint;
};

// Exhaustive violation audit: each agent's own family evaluated at its own
// iterate.
FeasibilityAudit feasibility_audit(const std::vector<Eigen::VectorXd>& iterates,
                                   const ProblemSpec& problem);
FeasibilityAudit feasibility_audit(const std::vector<AgentState>& states,
                                   const ProblemSpec& problem);

struct RegimeReport {
  // doubly stochastic weights + Q-strong connectivity
  bool prop1 = false;
  int prop1_connectivity_q = -1;  // smallest passing Q, -1 if none
  bool weights_doubly_stochastic = false;
  // equal-neighbor weights + 1-strong connectivity + linear objective
  bool prop2 = false;
  bool weights_row_stochastic = false;
  bool one_strong_connectivity = false;
  bool linear_objective = false;
  std::vector<std::string> warnings;

  bool selected_pass = false;  // the clause set matching config.scheme
};

// Checks the hypotheses of the convergence propositions for the configured
// weight scheme and topology.
RegimeReport regime_check(const RunConfig& config);

// Round-synchronous execution until termination or max_rounds. Throws
// std::runtime_error with a structured message when the configured regime's
// assumptions fail up front. Deterministic given the seed.
RunResult run(const RunConfig& config);

// CSV trace with the fixed column set; wallclock entries are measured and
// therefore excluded from determinism comparisons.
void write_trace_csv(std::ostream& out, const MetricsTrace& trace,
                     const std::vector<double>& wallclock_ms);
std::string trace_csv(const MetricsTrace& trace,
                      const std::vector<double>& wallclock_ms);

}  // namespace dap
