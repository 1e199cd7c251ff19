#include "dap/simulator.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dap {

WeightScheme weight_scheme_from_string(const std::string& name) {
  if (name == "metropolis") return WeightScheme::kMetropolis;
  if (name == "equal_neighbor") return WeightScheme::kEqualNeighbor;
  throw std::invalid_argument("unknown weight scheme: " + name);
}

std::string to_string(WeightScheme scheme) {
  return scheme == WeightScheme::kMetropolis ? "metropolis" : "equal_neighbor";
}

FeasibilityAudit feasibility_audit(const std::vector<Eigen::VectorXd>& iterates,
                                   const ProblemSpec& problem) {
  if (static_cast<int>(iterates.size()) != problem.agent_count()) {
    throw std::invalid_argument("audit: iterate count != agent count");
  }
  FeasibilityAudit audit;
  for (int i = 0; i < problem.agent_count(); ++i) {
    const auto& family = problem.constraint_sets[i];
    for (size_t w = 0; w < family.size(); ++w) {
      const double g = family[w]->violation(iterates[i]);
      audit.per_constraint.emplace_back(i, static_cast<int>(w), g);
      audit.total_violation += g;
      audit.max_violation = std::max(audit.max_violation, g);
    }
  }
  return audit;
}

FeasibilityAudit feasibility_audit(const std::vector<AgentState>& states,
                                   const ProblemSpec& problem) {
  std::vector<Eigen::VectorXd> iterates;
  iterates.reserve(states.size());
  for (const auto& s : states) iterates.push_back(s.x);
  return feasibility_audit(iterates, problem);
}

RegimeReport regime_check(const RunConfig& config) {
  if (config.problem == nullptr) throw std::invalid_argument("config has no problem");
  const DigraphSequence& topo = config.topology;
  const int period = topo.period();
  RegimeReport report;

  // Proposition 1 hypotheses: doubly stochastic weights, Q-strong connectivity.
  report.weights_doubly_stochastic = true;
  for (int p = 0; p < period && report.weights_doubly_stochastic; ++p) {
    try {
      const WeightMatrix w = metropolis_weights(topo, p);
      if (!validate_assumption1(w, topo, p).all()) {
        report.weights_doubly_stochastic = false;
      }
    } catch (const std::invalid_argument&) {
      report.weights_doubly_stochastic = false;
      report.warnings.push_back(
          "metropolis weights unavailable: graph not symmetric at phase " +
          std::to_string(p));
    }
  }
  const int q_cap = period * topo.node_count();
  for (int q = 1; q <= q_cap; ++q) {
    if (check_q_strong_connectivity(topo, q, period + q - 1).pass) {
      report.prop1_connectivity_q = q;
      break;
    }
  }
  report.prop1 =
      report.weights_doubly_stochastic && report.prop1_connectivity_q > 0;

  // Proposition 2 hypotheses: equal-neighbor weights (row stochastic by
  // construction), 1-strong connectivity, linear objective in epigraph form.
  {
    const WeightMatrix w = equal_neighbor_weights(topo, 0);
    const auto a1 = validate_assumption1(w, topo, 0);
    report.weights_row_stochastic =
        a1.graph_respected && a1.nu_bound && a1.row_stochastic;
  }
  report.one_strong_connectivity =
      check_q_strong_connectivity(topo, 1, period).pass;
  report.linear_objective = config.problem->linear_objective;
  report.prop2 = report.weights_row_stochastic &&
                 report.one_strong_connectivity && report.linear_objective;

  if (config.scheme == WeightScheme::kEqualNeighbor) {
    if (!report.linear_objective) {
      report.warnings.push_back(
          "equal-neighbor regime on a non-linear objective: Proposition 2 "
          "assumes the epigraph-form linear objective");
    }
    report.selected_pass =
        report.weights_row_stochastic && report.one_strong_connectivity;
  } else {
    report.selected_pass = report.prop1;
  }
  return report;
}

namespace {

std::string regime_failure_message(const RunConfig& config,
                                   const RegimeReport& report) {
  std::ostringstream msg;
  msg << "assumption validation failed for scheme "
      << to_string(config.scheme) << ":";
  if (config.scheme == WeightScheme::kMetropolis) {
    if (!report.weights_doubly_stochastic)
      msg << " weights not doubly stochastic on this topology;";
    if (report.prop1_connectivity_q <= 0)
      msg << " no Q-strongly-connected window found;";
  } else {
    if (!report.weights_row_stochastic) msg << " weights not row stochastic;";
    if (!report.one_strong_connectivity)
      msg << " per-round graphs not strongly connected (Q=1 required);";
  }
  for (const auto& w : report.warnings) msg << " [" << w << "]";
  return msg.str();
}

double consensus_error_against(const std::vector<AgentState>& states,
                               const Eigen::VectorXd& reference) {
  double worst = 0.0;
  for (const auto& s : states) {
    worst = std::max(worst, (s.x - reference).norm());
  }
  return worst;
}

bool local_average_consensus(const std::vector<AgentState>& states,
                             const DigraphSequence& topo, long round,
                             double rel_tol) {
  for (size_t i = 0; i < states.size(); ++i) {
    const auto& nbrs = topo.in_neighbors(round, static_cast<int>(i));
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(states[i].x.size());
    for (int j : nbrs) mean += states[j].x;
    mean /= static_cast<double>(nbrs.size());
    if ((states[i].x - mean).norm() > rel_tol * std::max(mean.norm(), 1.0)) {
      return false;
    }
  }
  return true;
}

}  // namespace

RunResult run(const RunConfig& config) {
  if (config.problem == nullptr) throw std::invalid_argument("config has no problem");
  const ProblemSpec& problem = *config.problem;
  problem.validate();
  config.stepsize.validate();
  if (config.max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
  if (config.termination.consensus_rel_tol <= 0.0 ||
      config.termination.feasibility_tol <= 0.0) {
    throw std::invalid_argument("termination tolerances must be positive");
  }

  const DigraphSequence& topo = config.topology;
  const int n_agents = topo.node_count();
  if (problem.agent_count() != n_agents) {
    throw std::invalid_argument("problem has " +
                                std::to_string(problem.agent_count()) +
                                " agents but topology has " +
                                std::to_string(n_agents) + " nodes");
  }

  const RegimeReport regime = regime_check(config);
  if (!regime.selected_pass) {
    throw std::runtime_error(regime_failure_message(config, regime));
  }

  // one weight matrix (and stationary vector) per schedule phase
  std::vector<WeightMatrix> phase_weights;
  std::vector<Eigen::VectorXd> phase_pi;
  for (int p = 0; p < topo.period(); ++p) {
    WeightMatrix w = config.scheme == WeightScheme::kMetropolis
                         ? metropolis_weights(topo, p)
                         : equal_neighbor_weights(topo, p);
    phase_pi.push_back(stationary_left_eigenvector(w));
    phase_weights.push_back(std::move(w));
  }

  RunResult result;
  result.warnings = regime.warnings;

  std::vector<AgentState>& states = result.final_states;
  states.resize(n_agents);
  const Eigen::VectorXd x_init =
      problem.x0.project(Eigen::VectorXd::Zero(problem.dimension));
  for (int i = 0; i < n_agents; ++i) {
    states[i].id = i;
    states[i].x = x_init;
    states[i].p = x_init;
    states[i].v = x_init;
    states[i].rng = RngStream(config.seed, static_cast<std::uint64_t>(i));
  }

  MetricsTrace& trace = result.trace;
  trace.alpha_e_partial_sums = Eigen::VectorXd::Zero(n_agents);
  trace.alpha_e_tail_increment = Eigen::VectorXd::Zero(n_agents);
  std::vector<Eigen::VectorXd> alpha_e_at_rows;

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double>& wallclock = result.wallclock_ms;

  auto record_row = [&](long k, double consensus_error) {
    const FeasibilityAudit audit = feasibility_audit(states, problem);
    Eigen::VectorXd xbar = Eigen::VectorXd::Zero(problem.dimension);
    for (const auto& s : states) xbar += s.x;
    xbar /= static_cast<double>(n_agents);

    const Eigen::VectorXd& pi = phase_pi[k % topo.period()];
    Eigen::VectorXd xhat = Eigen::VectorXd::Zero(problem.dimension);
    for (int i = 0; i < n_agents; ++i) xhat += pi[i] * states[i].x;

    MetricsRow row;
    row.round = k;
    row.consensus_error = consensus_error;
    row.max_violation = audit.max_violation;
    row.total_violation = audit.total_violation;
    row.objective_gap =
        problem.known_value
            ? std::abs(problem.objective_value(xbar) - *problem.known_value)
            : std::numeric_limits<double>::quiet_NaN();
    row.alpha = config.stepsize.alpha(k);
    double max_e = 0.0;
    for (const auto& s : states) max_e = std::max(max_e, (s.x - s.p).norm());
    row.max_perturbation = max_e;
    row.weighted_consensus_error = consensus_error_against(states, xhat);
    trace.rows.push_back(row);
    alpha_e_at_rows.push_back(trace.alpha_e_partial_sums);
    wallclock.push_back(std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0)
                            .count());
  };

  bool converged = false;
  long k = 0;
  for (k = 1; k <= config.max_rounds; ++k) {
    const WeightMatrix& w = phase_weights[k % topo.period()];
    dap_round(states, w, topo, config.stepsize, k, problem);

    const double alpha = config.stepsize.alpha(k);
    for (int i = 0; i < n_agents; ++i) {
      trace.alpha_e_partial_sums[i] += alpha * (states[i].x - states[i].p).norm();
    }

    Eigen::VectorXd xbar = Eigen::VectorXd::Zero(problem.dimension);
    for (const auto& s : states) xbar += s.x;
    xbar /= static_cast<double>(n_agents);
    const double consensus_error = consensus_error_against(states, xbar);

    bool consensus_ok;
    if (config.termination.local_average) {
      consensus_ok = local_average_consensus(
          states, topo, k, config.termination.consensus_rel_tol);
    } else {
      consensus_ok = consensus_error <= config.termination.consensus_rel_tol *
                                            std::max(xbar.norm(), 1.0);
    }
    if (consensus_ok) {
      const FeasibilityAudit audit = feasibility_audit(states, problem);
      if (audit.total_violation <= config.termination.feasibility_tol) {
        converged = true;
        record_row(k, consensus_error);
        break;
      }
    }
    if (k % config.metric_stride == 0 || k == 1) {
      record_row(k, consensus_error);
    }
  }

  if (!converged) {
    k = config.max_rounds;
    if (trace.rows.empty() || trace.rows.back().round != k) {
      Eigen::VectorXd xbar = Eigen::VectorXd::Zero(problem.dimension);
      for (const auto& s : states) xbar += s.x;
      xbar /= static_cast<double>(n_agents);
      record_row(k, consensus_error_against(states, xbar));
    }
  }

  result.converged = converged;
  result.rounds = k;
  result.mean_final = Eigen::VectorXd::Zero(problem.dimension);
  for (const auto& s : states) result.mean_final += s.x;
  result.mean_final /= static_cast<double>(n_agents);

  // Lemma-6 style diagnostic: increment of the alpha*e partial sums over the
  // last tenth of the run.
  if (!alpha_e_at_rows.empty()) {
    const size_t tail_row =
        static_cast<size_t>(0.9 * static_cast<double>(alpha_e_at_rows.size() - 1));
    trace.alpha_e_tail_increment =
        trace.alpha_e_partial_sums - alpha_e_at_rows[tail_row];
  }
  return result;
}

namespace {

void append_double(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string trace_csv(const MetricsTrace& trace,
                      const std::vector<double>& wallclock_ms) {
  std::string out =
      "k,consensus_error,max_violation,total_violation,objective_gap,"
      "alpha_k,wallclock_ms\n";
  for (size_t r = 0; r < trace.rows.size(); ++r) {
    const MetricsRow& row = trace.rows[r];
    out += std::to_string(row.round);
    out.push_back(',');
    append_double(out, row.consensus_error);
    out.push_back(',');
    append_double(out, row.max_violation);
    out.push_back(',');
    append_double(out, row.total_violation);
    out.push_back(',');
    append_double(out, row.objective_gap);
    out.push_back(',');
    append_double(out, row.alpha);
    out.push_back(',');
    append_double(out, r < wallclock_ms.size()
                           ? wallclock_ms[r]
                           : std::numeric_limits<double>::quiet_NaN());
    out.push_back('\n');
  }
  return out;
}

void write_trace_csv(std::ostream& out, const MetricsTrace& trace,
                     const std::vector<double>& wallclock_ms) {
  out << trace_csv(trace, wallclock_ms);
}

}  // namespace dap
