#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "dap/rng.hpp"

namespace dap {

// Violations at or below this are treated as satisfied; the feasibility step
// is skipped rather than fed an arbitrary subgradient.
inline constexpr double kSatisfactionTol = 1e-12;

// A set with a cheap exact Euclidean projection: R^n, a box, a ball, or a
// scaled probability simplex. Box bounds may be +/-inf.
class SimpleSet {
 public:
  enum class Kind { kFullSpace, kBox, kBall, kSimplex };

  static SimpleSet full_space(int dim);
  static SimpleSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);
  static SimpleSet ball(Eigen::VectorXd center, double radius);
  static SimpleSet simplex(int dim, double scale);

  Kind kind() const { return kind_; }
  int dimension() const { return dim_; }
  bool is_bounded() const;

  // Euclidean nearest point in the set.
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;

  // Deterministic sample used for subgradient-bound estimation. Unbounded
  // coordinates are sampled from a fixed finite range.
  Eigen::VectorXd sample(RngStream& rng) const;

  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  const Eigen::VectorXd& center() const { return center_; }
  double radius() const { return radius_; }
  double scale() const { return scale_; }

 private:
  SimpleSet(Kind kind, int dim) : kind_(kind), dim_(dim) {}

  Kind kind_;
  int dim_;
  Eigen::VectorXd lower_, upper_;  // box
  Eigen::VectorXd center_;        // ball
  double radius_ = 0.0;
  double scale_ = 1.0;            // simplex
};

// Projection onto {x >= 0, sum x = scale} by the sorting threshold rule.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& x, double scale);

// Projection of a symmetric matrix onto the PSD cone: eigendecompose and
// clamp negative eigenvalues. Eigenvalues below 1e-10 are treated as zero.
// Rejects input that is not symmetric to 1e-10 (relative).
Eigen::MatrixXd psd_part(const Eigen::MatrixXd& a);

// One component constraint g(., omega) <= 0, exposed through its violation
// g+ = max(g, 0) and a subgradient of g+ at violated points. subgradient()
// must only be called where violation() > kSatisfactionTol.
class ConstraintComponent {
 public:
  virtual ~ConstraintComponent() = default;
  virtual double violation(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const = 0;
  virtual int dimension() const = 0;
};

// An agent's finite constraint family Omega_i.
using ConstraintSet = std::vector<std::shared_ptr<const ConstraintComponent>>;

// g+(x) = ||(A x - b)+||; handles all rows of A x <= b at once.
class LinearBlockConstraint : public ConstraintComponent {
 public:
  LinearBlockConstraint(Eigen::MatrixXd a, Eigen::VectorXd b);
  double violation(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override;
  int dimension() const override { return static_cast<int>(a_.cols()); }
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& offset() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
};

// A_0 + sum_j x_j A_j <= 0 in the semidefinite order, with violation
// ||psd_part(A(x))||_F and subgradient components Tr(A_j A+(x)) / g+(x).
class LmiConstraint : public ConstraintComponent {
 public:
  // coefficients = [A_0, A_1, ..., A_n], all symmetric m x m
  explicit LmiConstraint(std::vector<Eigen::MatrixXd> coefficients);
  double violation(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override;
  int dimension() const override { return static_cast<int>(coeff_.size()) - 1; }
  int matrix_size() const { return static_cast<int>(coeff_[0].rows()); }

  Eigen::MatrixXd assemble(const Eigen::VectorXd& x) const;
  const std::vector<Eigen::MatrixXd>& coefficients() const { return coeff_; }

 private:
  std::vector<Eigen::MatrixXd> coeff_;
};

// g+(x) = dist(x, target) on a coordinate subset; the Polyak feasibility
// step on this oracle is the exact projection onto the target set.
class DistanceConstraint : public ConstraintComponent {
 public:
  // target acts on coordinates `indices` of the full vector; an empty index
  // list means the whole vector.
  DistanceConstraint(SimpleSet target, std::vector<int> indices, int full_dim);
  explicit DistanceConstraint(SimpleSet target);

  double violation(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override;
  int dimension() const override { return full_dim_; }
  const SimpleSet& target() const { return target_; }

 private:
  Eigen::VectorXd gather(const Eigen::VectorXd& x) const;

  SimpleSet target_;
  std::vector<int> indices_;
  int full_dim_;
};

// Wraps a component over the first base_dim coordinates of a larger vector;
// the trailing coordinates do not enter the constraint.
class LiftedConstraint : public ConstraintComponent {
 public:
  LiftedConstraint(std::shared_ptr<const ConstraintComponent> inner,
                   int base_dim, int full_dim);
  double violation(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd subgradient(const Eigen::VectorXd& x) const override;
  int dimension() const override { return full_dim_; }

 private:
  std::shared_ptr<const ConstraintComponent> inner_;
  int base_dim_;
  int full_dim_;
};

// Finite scenario discretization of the robust inequality family
// {A x <= b : ||A - A0||_op <= r1, ||b - b0|| <= r2}. Each scenario is a
// random direction scaled by radius * uniform[0,1].
std::vector<std::shared_ptr<const ConstraintComponent>> robust_linear_scenarios(
    const Eigen::MatrixXd& a0, const Eigen::VectorXd& b0, double r1, double r2,
    int scenario_count, RngStream& rng);

// Uniform draw from a finite constraint family.
int sample_omega(const ConstraintSet& omega_set, RngStream& rng);

// Empirical bound on ||d|| over samples of x0; diagnostics only.
double estimate_subgradient_bound(const ConstraintSet& omega_set,
                                  const SimpleSet& x0, RngStream& rng,
                                  int samples);

}  // namespace dap
