#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "dap/constraints.hpp"
#include "dap/rng.hpp"
#include "dap/weights.hpp"

namespace dap {

// alpha_k = a / (k + b)^gamma. gamma in (0.5, 1] makes the sums diverge /
// converge as the method requires.
struct StepSizeSchedule {
  double a = 1.0;
  double b = 1.0;
  double gamma = 1.0;

  double alpha(long k) const {
    return a / std::pow(static_cast<double>(k) + b, gamma);
  }
  void validate() const;
};

// Local objective f_i, exposed through value and one subgradient.
class ObjectiveOracle {
 public:
  virtual ~ObjectiveOracle() = default;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const = 0;
  virtual int dimension() const = 0;
  virtual bool is_linear() const { return false; }
};

class LinearObjective : public ObjectiveOracle {
 public:
  explicit LinearObjective(Eigen::VectorXd gradient)
      : gradient_(std::move(gradient)) {}
  double value(const Eigen::VectorXd& x) const override {
    return gradient_.dot(x);
  }
  Eigen::VectorXd subgradient(const Eigen::VectorXd&) const override {
    return gradient_;
  }
  int dimension() const override { return static_cast<int>(gradient_.size()); }
  bool is_linear() const override { return true; }
  const Eigen::VectorXd& gradient() const { return gradient_; }

 private:
  Eigen::VectorXd gradient_;
};

class ZeroObjective : public ObjectiveOracle {
 public:
  explicit ZeroObjective(int dim) : dim_(dim) {}
  double value(const Eigen::VectorXd&) const override { return 0.0; }
  Eigen::VectorXd subgradient(const Eigen::VectorXd&) const override {
    return Eigen::VectorXd::Zero(dim_);
  }
  int dimension() const override { return dim_; }
  bool is_linear() const override { return true; }

 private:
  int dim_;
};

// f(x) = ||x - target||_1; subgradient picks 0 at kinks.
class AbsDeviationObjective : public ObjectiveOracle {
 public:
  explicit AbsDeviationObjective(Eigen::VectorXd target)
      : target_(std::move(target)) {}
  double value(const Eigen::VectorXd& x) const override {
    return (x - target_).lpNorm<1>();
  }
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override {
    return (x - target_).array().sign().matrix();
  }
  int dimension() const override { return static_cast<int>(target_.size()); }

 private:
  Eigen::VectorXd target_;
};

// f(x) = 0.5 ||x - center||^2
class SquaredDistanceObjective : public ObjectiveOracle {
 public:
  explicit SquaredDistanceObjective(Eigen::VectorXd center)
      : center_(std::move(center)) {}
  double value(const Eigen::VectorXd& x) const override {
    return 0.5 * (x - center_).squaredNorm();
  }
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override {
    return x - center_;
  }
  int dimension() const override { return static_cast<int>(center_.size()); }

 private:
  Eigen::VectorXd center_;
};

// One agent's iterates plus its private random stream. x is the round
// boundary value and always lies in X0; p and v are the within-round
// intermediates kept for diagnostics.
struct AgentState {
  int id = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd p;
  Eigen::VectorXd v;
  RngStream rng;
};

// Eq-(9a)-style weighted average over received previous-round iterates.
// Throws when a positive weight has no matching message.
Eigen::VectorXd consensus_step(
    const Eigen::VectorXd& weights_row,
    const std::vector<std::pair<int, Eigen::VectorXd>>& neighbor_states);

// Subgradient step on the local objective, projected back to X0.
Eigen::VectorXd objective_step(const Eigen::VectorXd& p,
                               const ObjectiveOracle& objective, double alpha,
                               const SimpleSet& x0);

// Polyak step on one sampled constraint violation, projected back to X0.
// A satisfied constraint leaves v untouched.
Eigen::VectorXd feasibility_step(const Eigen::VectorXd& v,
                                 const ConstraintComponent& constraint,
                                 const SimpleSet& x0);

// One synchronous round: every agent averages the previous-round snapshot of
// its in-neighbors, steps on its objective, then on one sampled constraint.
// Update order across agents is irrelevant by construction.
void dap_round(std::vector<AgentState>& states, const WeightMatrix& weights,
               const DigraphSequence& topology, const StepSizeSchedule& schedule,
               long round, const SimpleSet& x0,
               std::span<const std::shared_ptr<const ObjectiveOracle>> objectives,
               std::span<const ConstraintSet> constraint_sets);

}  // namespace dap
