#include "dap/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace dap {

double ProblemSpec::objective_value(const Eigen::VectorXd& x) const {
  double total = 0.0;
  for (const auto& f : objectives) total += f->value(x);
  return total;
}

void ProblemSpec::validate() const {
  if (dimension <= 0) throw std::invalid_argument(name + ": dimension must be positive");
  if (x0.dimension() != dimension) {
    throw std::invalid_argument(name + ": X0 dimension mismatch");
  }
  if (objectives.empty()) throw std::invalid_argument(name + ": no agents");
  if (constraint_sets.size() != objectives.size()) {
    throw std::invalid_argument(name + ": constraint families != agent count");
  }
  for (const auto& f : objectives) {
    if (f->dimension() != dimension) {
      throw std::invalid_argument(name + ": objective dimension mismatch");
    }
  }
  for (const auto& family : constraint_sets) {
    for (const auto& component : family) {
      if (component->dimension() != dimension) {
        throw std::invalid_argument(name + ": constraint dimension mismatch");
      }
    }
  }
}

BoundEstimates estimate_bounds(const ProblemSpec& problem, RngStream& rng,
                               int samples) {
  BoundEstimates est;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = problem.x0.sample(rng);
    for (const auto& f : problem.objectives) {
      est.objective = std::max(est.objective, f->subgradient(x).norm());
    }
    for (const auto& family : problem.constraint_sets) {
      for (const auto& component : family) {
        if (component->violation(x) > kSatisfactionTol) {
          est.constraint =
              std::max(est.constraint, component->subgradient(x).norm());
        }
      }
    }
  }
  return est;
}

namespace {

// f_i(y) - t_i <= 0 on the stacked vector (y, t).
class EpigraphLinkConstraint : public ConstraintComponent {
 public:
  EpigraphLinkConstraint(std::shared_ptr<const ObjectiveOracle> objective,
                         int agent, int base_dim, int agent_count)
      : objective_(std::move(objective)), agent_(agent), base_dim_(base_dim),
        full_dim_(base_dim + agent_count) {}

  double violation(const Eigen::VectorXd& x) const override {
    const double g = objective_->value(x.head(base_dim_)) - x[base_dim_ + agent_];
    return std::max(g, 0.0);
  }

  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override {
    if (violation(x) <= kSatisfactionTol) {
      throw std::domain_error("subgradient requested at a satisfied constraint");
    }
    Eigen::VectorXd d = Eigen::VectorXd::Zero(full_dim_);
    d.head(base_dim_) = objective_->subgradient(x.head(base_dim_));
    d[base_dim_ + agent_] = -1.0;
    return d;
  }

  int dimension() const override { return full_dim_; }

 private:
  std::shared_ptr<const ObjectiveOracle> objective_;
  int agent_;
  int base_dim_;
  int full_dim_;
};

}  // namespace

ProblemSpec epigraph_transform(const ProblemSpec& original) {
  original.validate();
  const int n = original.dimension;
  const int agents = original.agent_count();
  ProblemSpec out;
  out.name = original.name + "+epigraph";
  out.dimension = n + agents;
  out.linear_objective = true;

  switch (original.x0.kind()) {
    case SimpleSet::Kind::kFullSpace:
      out.x0 = SimpleSet::full_space(out.dimension);
      break;
    case SimpleSet::Kind::kBox: {
      const double inf = std::numeric_limits<double>::infinity();
      Eigen::VectorXd lower(out.dimension), upper(out.dimension);
      lower.head(n) = original.x0.lower();
      upper.head(n) = original.x0.upper();
      lower.tail(agents).setConstant(-inf);
      upper.tail(agents).setConstant(inf);
      out.x0 = SimpleSet::box(std::move(lower), std::move(upper));
      break;
    }
    default:
      throw std::invalid_argument(
          "epigraph transform supports full-space and box X0 only");
  }

  for (int i = 0; i < agents; ++i) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(out.dimension);
    grad[n + i] = 1.0;  // f_i(y, t) = t_i
    out.objectives.push_back(std::make_shared<LinearObjective>(std::move(grad)));

    ConstraintSet family;
    family.push_back(std::make_shared<EpigraphLinkConstraint>(
        original.objectives[i], i, n, agents));
    for (const auto& component : original.constraint_sets[i]) {
      family.push_back(std::make_shared<LiftedConstraint>(component, n,
                                                          out.dimension));
    }
    out.constraint_sets.push_back(std::move(family));
  }

  if (original.known_value) out.known_value = original.known_value;
  if (original.known_x) {
    Eigen::VectorXd x(out.dimension);
    x.head(n) = *original.known_x;
    for (int i = 0; i < agents; ++i) {
      x[n + i] = original.objectives[i]->value(*original.known_x);
    }
    out.known_x = std::move(x);
  }
  out.notes = original.notes;
  out.notes.push_back("epigraph variables t appended after the original coordinates");
  return out;
}

Eigen::MatrixXd averaging_matrix(int i, int j, int node_count) {
  if (i == j) throw std::invalid_argument("averaging matrix needs i != j");
  if (i < 0 || j < 0 || i >= node_count || j >= node_count) {
    throw std::out_of_range("averaging matrix node out of range");
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(node_count, node_count);
  a(i, i) = 0.5;
  a(j, j) = 0.5;
  a(i, j) = 0.5;
  a(j, i) = 0.5;
  return a;
}

std::vector<std::pair<int, int>> gossip_edge_variables(
    const DigraphSequence& graph) {
  std::vector<std::pair<int, int>> vars;
  for (int i = 0; i < graph.node_count(); ++i) {
    for (int j : graph.out_neighbors(0, i)) {
      if (j != i) vars.emplace_back(i, j);
    }
  }
  return vars;
}

ProblemSpec gossip_sdp_problem(const DigraphSequence& graph) {
  if (!graph.is_static()) {
    throw std::invalid_argument("gossip problem needs a time-invariant graph");
  }
  if (!graph.is_symmetric(0)) {
    throw std::invalid_argument("gossip problem needs an undirected graph");
  }
  if (!check_q_strong_connectivity(graph, 1, 1).pass) {
    throw std::invalid_argument("gossip problem needs a connected graph");
  }

  const int n = graph.node_count();
  const auto edge_vars = gossip_edge_variables(graph);
  const int dim = 1 + static_cast<int>(edge_vars.size());

  ProblemSpec problem;
  problem.name = "gossip";
  problem.dimension = dim;
  problem.linear_objective = true;

  // X0: s in [-N, N], probabilities in [0, 1]; compactness keeps the
  // subgradient bounds finite.
  Eigen::VectorXd lower = Eigen::VectorXd::Zero(dim);
  Eigen::VectorXd upper = Eigen::VectorXd::Ones(dim);
  lower[0] = -static_cast<double>(n);
  upper[0] = static_cast<double>(n);
  problem.x0 = SimpleSet::box(std::move(lower), std::move(upper));

  // Spectral LMI: sum p_ij A(i,j) - 11^T - s I <= 0, shared by every agent.
  std::vector<Eigen::MatrixXd> coeff(1 + dim);
  coeff[0] = -Eigen::MatrixXd::Ones(n, n);
  coeff[1] = -Eigen::MatrixXd::Identity(n, n);
  for (size_t q = 0; q < edge_vars.size(); ++q) {
    coeff[2 + q] = averaging_matrix(edge_vars[q].first, edge_vars[q].second, n);
  }
  auto lmi = std::make_shared<LmiConstraint>(std::move(coeff));

  for (int i = 0; i < n; ++i) {
    // f_i = s / N so the network objective sums to s
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
    grad[0] = 1.0 / n;
    problem.objectives.push_back(std::make_shared<LinearObjective>(std::move(grad)));

    ConstraintSet family;
    family.push_back(lmi);
    std::vector<int> row_vars;
    for (size_t q = 0; q < edge_vars.size(); ++q) {
      if (edge_vars[q].first == i) row_vars.push_back(1 + static_cast<int>(q));
    }
    if (!row_vars.empty()) {
      family.push_back(std::make_shared<DistanceConstraint>(
          SimpleSet::simplex(static_cast<int>(row_vars.size()), 1.0),
          std::move(row_vars), dim));
    }
    problem.constraint_sets.push_back(std::move(family));
  }

  problem.notes.push_back(
      "local objectives use f_i = s/N so that sum_i f_i equals the SDP objective s");
  problem.notes.push_back("X0 box bounds s in [-N, N], p in [0, 1]");
  return problem;
}

ProblemSpec separable_lp_problem(int agents) {
  if (agents <= 0) throw std::invalid_argument("agent count must be positive");
  ProblemSpec problem;
  problem.name = agents == 2 ? "lp" : "lp" + std::to_string(agents);
  problem.dimension = agents;
  problem.linear_objective = true;
  problem.x0 = SimpleSet::box(Eigen::VectorXd::Constant(agents, -1.0),
                              Eigen::VectorXd::Constant(agents, 1.0));
  for (int i = 0; i < agents; ++i) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(agents);
    grad[i] = 1.0;
    problem.objectives.push_back(std::make_shared<LinearObjective>(std::move(grad)));

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, agents);
    a(0, i) = -1.0;  // -x_i <= 0
    ConstraintSet family;
    family.push_back(std::make_shared<LinearBlockConstraint>(
        std::move(a), Eigen::VectorXd::Zero(1)));
    problem.constraint_sets.push_back(std::move(family));
  }
  problem.known_x = Eigen::VectorXd::Zero(agents);
  problem.known_value = 0.0;
  return problem;
}

std::vector<ProblemSpec> builtin_test_problems() {
  return {builtin_test_problem("median"), builtin_test_problem("lp"),
          builtin_test_problem("lmi")};
}

ProblemSpec builtin_test_problem(const std::string& name) {
  if (name == "median") {
    ProblemSpec problem;
    problem.name = "median";
    problem.dimension = 1;
    problem.x0 = SimpleSet::box(Eigen::VectorXd::Constant(1, -5.0),
                                Eigen::VectorXd::Constant(1, 5.0));
    for (double target : {0.0, 2.0}) {
      problem.objectives.push_back(std::make_shared<AbsDeviationObjective>(
          Eigen::VectorXd::Constant(1, target)));
      problem.constraint_sets.emplace_back();
    }
    problem.known_x = Eigen::VectorXd::Constant(1, 1.0);
    problem.known_value = 2.0;
    return problem;
  }
  if (name == "lp") return separable_lp_problem(2);
  if (name == "lmi") {
    // feasibility of diag(1, -1) - x I <= 0, i.e. x >= 1
    ProblemSpec problem;
    problem.name = "lmi";
    problem.dimension = 1;
    problem.linear_objective = true;
    problem.x0 = SimpleSet::box(Eigen::VectorXd::Constant(1, -3.0),
                                Eigen::VectorXd::Constant(1, 3.0));
    problem.objectives.push_back(std::make_shared<ZeroObjective>(1));
    Eigen::MatrixXd a0(2, 2), a1(2, 2);
    a0 << 1.0, 0.0, 0.0, -1.0;
    a1 = -Eigen::MatrixXd::Identity(2, 2);
    ConstraintSet family;
    family.push_back(std::make_shared<LmiConstraint>(
        std::vector<Eigen::MatrixXd>{a0, a1}));
    problem.constraint_sets.push_back(std::move(family));
    problem.known_x = Eigen::VectorXd::Constant(1, 1.0);
    problem.known_value = 0.0;
    return problem;
  }
  throw std::invalid_argument("unknown builtin problem: " + name);
}

void dap_round(std::vector<AgentState>& states, const WeightMatrix& weights,
               const DigraphSequence& topology, const StepSizeSchedule& schedule,
               long round, const ProblemSpec& problem) {
  dap_round(states, weights, topology, schedule, round, problem.x0,
            problem.objectives, problem.constraint_sets);
}

}  // namespace dap
