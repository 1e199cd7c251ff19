#include "dap/algorithm.hpp"

#include <stdexcept>

namespace dap {

void StepSizeSchedule::validate() const {
  if (a <= 0.0) throw std::invalid_argument("stepsize a must be positive");
  if (b < 0.0) throw std::invalid_argument("stepsize b must be nonnegative");
  if (gamma <= 0.5 || gamma > 1.0) {
    throw std::invalid_argument("stepsize gamma must lie in (0.5, 1]");
  }
}

Eigen::VectorXd consensus_step(
    const Eigen::VectorXd& weights_row,
    const std::vector<std::pair<int, Eigen::VectorXd>>& neighbor_states) {
  if (neighbor_states.empty()) {
    throw std::invalid_argument("consensus step without any messages");
  }
  const double row_sum = weights_row.sum();
  if (std::abs(row_sum - 1.0) > 1e-12) {
    throw std::invalid_argument("consensus weights row does not sum to 1");
  }

  Eigen::VectorXd p = Eigen::VectorXd::Zero(neighbor_states.front().second.size());
  double covered = 0.0;
  for (const auto& [node, x] : neighbor_states) {
    const double w = weights_row[node];
    if (w == 0.0) continue;
    p += w * x;
    covered += w;
  }
  if (std::abs(covered - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "consensus step missing a neighbor state for a nonzero weight");
  }
  return p;
}

Eigen::VectorXd objective_step(const Eigen::VectorXd& p,
                               const ObjectiveOracle& objective, double alpha,
                               const SimpleSet& x0) {
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
  if (objective.dimension() != p.size()) {
    throw std::invalid_argument("objective oracle dimension mismatch");
  }
  if (alpha == 0.0) return x0.project(p);
  return x0.project(p - alpha * objective.subgradient(p));
}

Eigen::VectorXd feasibility_step(const Eigen::VectorXd& v,
                                 const ConstraintComponent& constraint,
                                 const SimpleSet& x0) {
  const double g = constraint.violation(v);
  if (g <= kSatisfactionTol) return v;  // step omitted
  const Eigen::VectorXd d = constraint.subgradient(v);
  const double dd = d.squaredNorm();
  if (dd <= 0.0) {
    throw std::runtime_error(
        "constraint oracle returned a zero subgradient at a violated point");
  }
  return x0.project(v - (g / dd) * d);
}

void dap_round(std::vector<AgentState>& states, const WeightMatrix& weights,
               const DigraphSequence& topology, const StepSizeSchedule& schedule,
               long round, const SimpleSet& x0,
               std::span<const std::shared_ptr<const ObjectiveOracle>> objectives,
               std::span<const ConstraintSet> constraint_sets) {
  const int n = static_cast<int>(states.size());
  if (static_cast<int>(objectives.size()) != n ||
      static_cast<int>(constraint_sets.size()) != n) {
    throw std::invalid_argument("dap_round: per-agent data does not match state count");
  }

  // snapshot of the previous round; every agent reads only this
  std::vector<Eigen::VectorXd> previous(n);
  for (int i = 0; i < n; ++i) previous[i] = states[i].x;

  const double alpha = schedule.alpha(round);
  for (int i = 0; i < n; ++i) {
    AgentState& agent = states[i];
    std::vector<std::pair<int, Eigen::VectorXd>> received;
    for (int j : topology.in_neighbors(round, i)) {
      received.emplace_back(j, previous[j]);
    }
    agent.p = consensus_step(weights.entries.row(i), received);
    agent.v = objective_step(agent.p, *objectives[i], alpha, x0);
    if (constraint_sets[i].empty()) {
      agent.x = agent.v;
    } else {
      const int omega = sample_omega(constraint_sets[i], agent.rng);
      agent.x = feasibility_step(agent.v, *constraint_sets[i][omega], x0);
    }
  }
}

}  // namespace dap
