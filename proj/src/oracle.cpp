#include "dap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "dap/simulator.hpp"

namespace dap {

namespace {

class PooledObjective : public ObjectiveOracle {
 public:
  explicit PooledObjective(const ProblemSpec& problem) : problem_(problem) {}
  double value(const Eigen::VectorXd& x) const override {
    return problem_.objective_value(x);
  }
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(problem_.dimension);
    for (const auto& f : problem_.objectives) s += f->subgradient(x);
    return s;
  }
  int dimension() const override { return problem_.dimension; }

 private:
  const ProblemSpec& problem_;
};

// Everyone's constraints in deterministic order, shared components once.
ConstraintSet pooled_constraints(const ProblemSpec& problem) {
  ConstraintSet pooled;
  std::set<const ConstraintComponent*> seen;
  for (const auto& family : problem.constraint_sets) {
    for (const auto& component : family) {
      if (seen.insert(component.get()).second) pooled.push_back(component);
    }
  }
  return pooled;
}

double max_violation(const ConstraintSet& constraints,
                     const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (const auto& c : constraints) worst = std::max(worst, c->violation(x));
  return worst;
}

}  // namespace

ReferenceSolution centralized_solve(const ProblemSpec& problem, long budget) {
  problem.validate();
  if (budget < 10) throw std::invalid_argument("budget too small");

  const PooledObjective objective(problem);
  const ConstraintSet constraints = pooled_constraints(problem);
  const StepSizeSchedule schedule;  // 1/(k+1)

  Eigen::VectorXd x = problem.x0.project(Eigen::VectorXd::Zero(problem.dimension));
  std::vector<double> values;
  values.reserve(budget);
  for (long k = 1; k <= budget; ++k) {
    x = objective_step(x, objective, schedule.alpha(k), problem.x0);
    for (const auto& c : constraints) {
      x = feasibility_step(x, *c, problem.x0);
    }
    values.push_back(objective.value(x));
  }

  // feasibility-only sweeps until the iterate is essentially in X
  constexpr double kResidualTarget = 1e-9;
  constexpr int kMaxPolish = 20000;
  for (int sweep = 0; sweep < kMaxPolish; ++sweep) {
    if (max_violation(constraints, x) <= kResidualTarget) break;
    for (const auto& c : constraints) {
      x = feasibility_step(x, *c, problem.x0);
    }
  }

  ReferenceSolution solution;
  solution.x = x;
  solution.value = objective.value(x);
  solution.residual = max_violation(constraints, x);
  solution.iterations = budget;
  solution.method = "pooled subgradient + Polyak sweeps";
  const size_t tail = values.size() - values.size() / 10;
  double lo = values.back(), hi = values.back();
  for (size_t i = tail; i < values.size(); ++i) {
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  lo = std::min(lo, solution.value);
  hi = std::max(hi, solution.value);
  solution.certified = (hi - lo) < 1e-8 && solution.residual <= 1e-8;
  return solution;
}

namespace {

struct GossipLayout {
  std::vector<std::pair<int, int>> edge_vars;
  int dim = 0;
};

double spectral_objective(const Eigen::MatrixXd& p_matrix, int n) {
  Eigen::MatrixXd m = -Eigen::MatrixXd::Ones(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (p_matrix(i, j) > 0.0) {
        m += p_matrix(i, j) * averaging_matrix(i, j, n);
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

// Nodes of a cycle graph in traversal order; every node has degree 2.
std::vector<int> cycle_order(const DigraphSequence& graph) {
  const int n = graph.node_count();
  std::vector<int> order{0};
  int prev = -1, cur = 0;
  while (static_cast<int>(order.size()) < n) {
    int next = -1;
    for (int j : graph.out_neighbors(0, cur)) {
      if (j != cur && j != prev) {
        next = j;
        break;
      }
    }
    if (next < 0 || next == 0) break;
    order.push_back(next);
    prev = cur;
    cur = next;
  }
  if (static_cast<int>(order.size()) != n) {
    throw std::logic_error("cycle traversal failed");
  }
  return order;
}

// All ways to put `units` grid units into `slots` bins, appended to `out`.
void compositions(int units, int slots, std::vector<int>& prefix,
                  std::vector<std::vector<int>>& out) {
  if (slots == 1) {
    prefix.push_back(units);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int u = 0; u <= units; ++u) {
    prefix.push_back(u);
    compositions(units - u, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

ReferenceSolution brute_force_gossip(const DigraphSequence& graph,
                                     int grid_resolution) {
  if (grid_resolution < 2) throw std::invalid_argument("grid too coarse");
  const int n = graph.node_count();
  const auto edge_vars = gossip_edge_variables(graph);

  std::vector<int> degree(n, 0);
  for (const auto& [i, j] : edge_vars) {
    (void)j;
    degree[i]++;
  }
  for (int i = 0; i < n; ++i) {
    if (degree[i] == 0) throw std::invalid_argument("isolated node in gossip graph");
  }

  std::vector<Eigen::MatrixXd> candidates;
  const bool all_deg_one = std::all_of(degree.begin(), degree.end(),
                                       [](int d) { return d == 1; });
  const bool is_cycle = n >= 3 && std::all_of(degree.begin(), degree.end(),
                                              [](int d) { return d == 2; });
  const bool is_clique = std::all_of(degree.begin(), degree.end(),
                                     [n](int d) { return d == n - 1; });

  if (all_deg_one) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [i, j] : edge_vars) p(i, j) = 1.0;
    candidates.push_back(p);
  } else if (is_cycle) {
    // one free parameter: probability of gossiping with the next node along
    // the cycle; reflection symmetry restricts it to [0, 1/2]
    const auto order = cycle_order(graph);
    for (int g = 0; g < grid_resolution; ++g) {
      const double p = 0.5 * g / (grid_resolution - 1);
      Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
      for (int idx = 0; idx < n; ++idx) {
        const int cur = order[idx];
        const int next = order[(idx + 1) % n];
        const int prev = order[(idx + n - 1) % n];
        mat(cur, next) = p;
        mat(cur, prev) = 1.0 - p;
      }
      candidates.push_back(mat);
    }
  } else if (is_clique) {
    Eigen::MatrixXd p =
        Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n - 1));
    p.diagonal().setZero();
    candidates.push_back(p);
  } else {
    if (n > 4) {
      throw std::invalid_argument(
          "full grid search limited to N <= 4 for irregular graphs");
    }
    int free_dims = 0;
    for (int i = 0; i < n; ++i) free_dims += degree[i] - 1;
    if (free_dims > 6) throw std::invalid_argument("too many free parameters");

    std::vector<std::vector<std::vector<int>>> row_grids(n);
    for (int i = 0; i < n; ++i) {
      std::vector<int> prefix;
      compositions(grid_resolution - 1, degree[i], prefix, row_grids[i]);
    }
    // cartesian product over rows
    std::vector<size_t> pick(n, 0);
    while (true) {
      Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
      for (int i = 0; i < n; ++i) {
        const auto& weights = row_grids[i][pick[i]];
        int slot = 0;
        for (const auto& [from, to] : edge_vars) {
          if (from != i) continue;
          mat(i, to) = static_cast<double>(weights[slot]) /
                       static_cast<double>(grid_resolution - 1);
          ++slot;
        }
      }
      candidates.push_back(mat);
      int row = n - 1;
      while (row >= 0 && ++pick[row] == row_grids[row].size()) {
        pick[row] = 0;
        --row;
      }
      if (row < 0) break;
    }
  }

  double best_value = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_p;
  for (const auto& p : candidates) {
    const double s = spectral_objective(p, n);
    if (s < best_value) {
      best_value = s;
      best_p = p;
    }
  }

  ReferenceSolution solution;
  solution.x = Eigen::VectorXd::Zero(1 + static_cast<int>(edge_vars.size()));
  solution.x[0] = best_value;
  for (size_t q = 0; q < edge_vars.size(); ++q) {
    solution.x[1 + q] = best_p(edge_vars[q].first, edge_vars[q].second);
  }
  solution.value = best_value;
  solution.iterations = static_cast<long>(candidates.size());
  solution.method = "grid eigensolve";
  solution.certified = true;

  const ProblemSpec problem = gossip_sdp_problem(graph);
  const FeasibilityAudit audit = feasibility_audit(
      std::vector<Eigen::VectorXd>(problem.agent_count(), solution.x), problem);
  solution.residual = audit.max_violation;
  return solution;
}

}  // namespace dap
