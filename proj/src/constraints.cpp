#include "dap/constraints.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dap {

namespace {

void check_dim(const Eigen::VectorXd& x, int dim, const char* what) {
  if (x.size() != dim) {
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(dim) + ", got " +
                                std::to_string(x.size()));
  }
}

}  // namespace

SimpleSet SimpleSet::full_space(int dim) {
  return SimpleSet(Kind::kFullSpace, dim);
}

SimpleSet SimpleSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("box bounds differ in dimension");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (lower[i] > upper[i]) throw std::invalid_argument("box has lower > upper");
  }
  SimpleSet s(Kind::kBox, static_cast<int>(lower.size()));
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

SimpleSet SimpleSet::ball(Eigen::VectorXd center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("ball radius must be positive");
  SimpleSet s(Kind::kBall, static_cast<int>(center.size()));
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

SimpleSet SimpleSet::simplex(int dim, double scale) {
  if (dim <= 0) throw std::invalid_argument("simplex dimension must be positive");
  if (scale <= 0.0) throw std::invalid_argument("simplex scale must be positive");
  SimpleSet s(Kind::kSimplex, dim);
  s.scale_ = scale;
  return s;
}

bool SimpleSet::is_bounded() const {
  switch (kind_) {
    case Kind::kFullSpace: return false;
    case Kind::kBox:
      return lower_.allFinite() && upper_.allFinite();
    case Kind::kBall:
    case Kind::kSimplex:
      return true;
  }
  return false;
}

Eigen::VectorXd SimpleSet::project(const Eigen::VectorXd& x) const {
  check_dim(x, dim_, "SimpleSet::project");
  switch (kind_) {
    case Kind::kFullSpace:
      return x;
    case Kind::kBox:
      return x.cwiseMax(lower_).cwiseMin(upper_);
    case Kind::kBall: {
      const Eigen::VectorXd delta = x - center_;
      const double norm = delta.norm();
      if (norm <= radius_) return x;
      return center_ + delta * (radius_ / norm);
    }
    case Kind::kSimplex:
      return project_simplex(x, scale_);
  }
  return x;
}

bool SimpleSet::contains(const Eigen::VectorXd& x, double tol) const {
  return (x - project(x)).norm() <= tol;
}

Eigen::VectorXd SimpleSet::sample(RngStream& rng) const {
  constexpr double kUnboundedRange = 1e3;
  Eigen::VectorXd x(dim_);
  switch (kind_) {
    case Kind::kFullSpace:
      for (int i = 0; i < dim_; ++i)
        x[i] = (rng.next_double() * 2.0 - 1.0) * kUnboundedRange;
      return x;
    case Kind::kBox:
      for (int i = 0; i < dim_; ++i) {
        const double lo = std::isfinite(lower_[i]) ? lower_[i] : -kUnboundedRange;
        const double hi = std::isfinite(upper_[i]) ? upper_[i] : kUnboundedRange;
        x[i] = lo + rng.next_double() * (hi - lo);
      }
      return x;
    case Kind::kBall: {
      for (int i = 0; i < dim_; ++i) x[i] = rng.next_gaussian();
      const double norm = x.norm();
      const double r =
          radius_ * std::pow(rng.next_double(), 1.0 / std::max(dim_, 1));
      return center_ + (norm > 0 ? (r / norm) * x : x);
    }
    case Kind::kSimplex: {
      // normalized exponentials give a uniform point on the simplex
      double total = 0.0;
      for (int i = 0; i < dim_; ++i) {
        double u = rng.next_double();
        while (u <= 1e-300) u = rng.next_double();
        x[i] = -std::log(u);
        total += x[i];
      }
      return x * (scale_ / total);
    }
  }
  return x;
}

Eigen::VectorXd project_simplex(const Eigen::VectorXd& x, double scale) {
  const Eigen::Index n = x.size();
  std::vector<double> u(x.data(), x.data() + n);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double running = 0.0;
  double theta = 0.0;
  int rho = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    running += u[j];
    const double candidate = (running - scale) / static_cast<double>(j + 1);
    if (u[j] - candidate > 0.0) {
      rho = static_cast<int>(j + 1);
      theta = candidate;
    }
  }
  (void)rho;
  return (x.array() - theta).max(0.0).matrix();
}

Eigen::MatrixXd psd_part(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("psd_part: matrix not square");
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * scale) {
    throw std::invalid_argument("psd_part: matrix not symmetric");
  }
  const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("psd_part: eigendecomposition failed");
  }
  constexpr double kZeroEig = 1e-10;
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda[i] <= kZeroEig) lambda[i] = 0.0;
  }
  return eig.eigenvectors() * lambda.asDiagonal() *
         eig.eigenvectors().transpose();
}

LinearBlockConstraint::LinearBlockConstraint(Eigen::MatrixXd a,
                                             Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size()) {
    throw std::invalid_argument("linear block: A rows and b size differ");
  }
}

double LinearBlockConstraint::violation(const Eigen::VectorXd& x) const {
  check_dim(x, dimension(), "linear block violation");
  return (a_ * x - b_).cwiseMax(0.0).norm();
}

Eigen::VectorXd LinearBlockConstraint::subgradient(
    const Eigen::VectorXd& x) const {
  check_dim(x, dimension(), "linear block subgradient");
  const Eigen::VectorXd residual = (a_ * x - b_).cwiseMax(0.0);
  const double norm = residual.norm();
  if (norm <= kSatisfactionTol) {
    throw std::domain_error("subgradient requested at a satisfied constraint");
  }
  return a_.transpose() * residual / norm;
}

LmiConstraint::LmiConstraint(std::vector<Eigen::MatrixXd> coefficients)
    : coeff_(std::move(coefficients)) {
  if (coeff_.empty()) throw std::invalid_argument("LMI needs at least A_0");
  const Eigen::Index m = coeff_[0].rows();
  for (const auto& c : coeff_) {
    if (c.rows() != m || c.cols() != m) {
      throw std::invalid_argument("LMI coefficient matrices differ in size");
    }
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("LMI coefficient matrix not symmetric");
    }
  }
}

Eigen::MatrixXd LmiConstraint::assemble(const Eigen::VectorXd& x) const {
  check_dim(x, dimension(), "LMI assemble");
  Eigen::MatrixXd a = coeff_[0];
  for (int j = 0; j < dimension(); ++j) {
    if (x[j] != 0.0) a += x[j] * coeff_[j + 1];
  }
  return a;
}

double LmiConstraint::violation(const Eigen::VectorXd& x) const {
  return psd_part(assemble(x)).norm();
}

Eigen::VectorXd LmiConstraint::subgradient(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd positive = psd_part(assemble(x));
  const double g = positive.norm();
  if (g <= kSatisfactionTol) {
    throw std::domain_error("subgradient requested at a satisfied constraint");
  }
  Eigen::VectorXd d(dimension());
  for (int j = 0; j < dimension(); ++j) {
    d[j] = coeff_[j + 1].cwiseProduct(positive).sum() / g;  // Tr(A_j A+)/g+
  }
  return d;
}

DistanceConstraint::DistanceConstraint(SimpleSet target,
                                       std::vector<int> indices, int full_dim)
    : target_(std::move(target)), indices_(std::move(indices)),
      full_dim_(full_dim) {
  if (indices_.empty()) {
    if (target_.dimension() != full_dim_) {
      throw std::invalid_argument("distance constraint: dimension mismatch");
    }
  } else if (static_cast<int>(indices_.size()) != target_.dimension()) {
    throw std::invalid_argument("distance constraint: index count != set dim");
  }
}

DistanceConstraint::DistanceConstraint(SimpleSet target)
    : DistanceConstraint(target, {}, target.dimension()) {
  full_dim_ = target_.dimension();
}

Eigen::VectorXd DistanceConstraint::gather(const Eigen::VectorXd& x) const {
  if (indices_.empty()) return x;
  Eigen::VectorXd sub(indices_.size());
  for (size_t q = 0; q < indices_.size(); ++q) sub[q] = x[indices_[q]];
  return sub;
}

double DistanceConstraint::violation(const Eigen::VectorXd& x) const {
  check_dim(x, full_dim_, "distance violation");
  const Eigen::VectorXd sub = gather(x);
  return (sub - target_.project(sub)).norm();
}

Eigen::VectorXd DistanceConstraint::subgradient(const Eigen::VectorXd& x) const {
  check_dim(x, full_dim_, "distance subgradient");
  const Eigen::VectorXd sub = gather(x);
  const Eigen::VectorXd delta = sub - target_.project(sub);
  const double norm = delta.norm();
  if (norm <= kSatisfactionTol) {
    throw std::domain_error("subgradient requested at a satisfied constraint");
  }
  if (indices_.empty()) return delta / norm;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(full_dim_);
  for (size_t q = 0; q < indices_.size(); ++q) d[indices_[q]] = delta[q] / norm;
  return d;
}

LiftedConstraint::LiftedConstraint(
    std::shared_ptr<const ConstraintComponent> inner, int base_dim,
    int full_dim)
    : inner_(std::move(inner)), base_dim_(base_dim), full_dim_(full_dim) {
  if (inner_->dimension() != base_dim_ || base_dim_ > full_dim_) {
    throw std::invalid_argument("lifted constraint: dimension mismatch");
  }
}

double LiftedConstraint::violation(const Eigen::VectorXd& x) const {
  check_dim(x, full_dim_, "lifted violation");
  return inner_->violation(x.head(base_dim_));
}

Eigen::VectorXd LiftedConstraint::subgradient(const Eigen::VectorXd& x) const {
  check_dim(x, full_dim_, "lifted subgradient");
  Eigen::VectorXd d = Eigen::VectorXd::Zero(full_dim_);
  d.head(base_dim_) = inner_->subgradient(x.head(base_dim_));
  return d;
}

std::vector<std::shared_ptr<const ConstraintComponent>> robust_linear_scenarios(
    const Eigen::MatrixXd& a0, const Eigen::VectorXd& b0, double r1, double r2,
    int scenario_count, RngStream& rng) {
  if (r1 < 0.0 || r2 < 0.0) {
    throw std::invalid_argument("uncertainty radii must be nonnegative");
  }
  if (scenario_count <= 0) {
    throw std::invalid_argument("scenario_count must be positive");
  }
  std::vector<std::shared_ptr<const ConstraintComponent>> scenarios;
  scenarios.reserve(scenario_count);
  for (int s = 0; s < scenario_count; ++s) {
    Eigen::MatrixXd a = a0;
    Eigen::VectorXd b = b0;
    if (r1 > 0.0) {
      Eigen::MatrixXd dir(a0.rows(), a0.cols());
      for (Eigen::Index i = 0; i < dir.size(); ++i)
        dir.data()[i] = rng.next_gaussian();
      const double op = dir.jacobiSvd().singularValues()[0];
      if (op > 0.0) a += dir * (r1 * rng.next_double() / op);
    }
    if (r2 > 0.0) {
      Eigen::VectorXd dir(b0.size());
      for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = rng.next_gaussian();
      const double norm = dir.norm();
      if (norm > 0.0) b += dir * (r2 * rng.next_double() / norm);
    }
    scenarios.push_back(
        std::make_shared<LinearBlockConstraint>(std::move(a), std::move(b)));
  }
  return scenarios;
}

int sample_omega(const ConstraintSet& omega_set, RngStream& rng) {
  if (omega_set.empty()) {
    throw std::logic_error("sample_omega on an empty constraint family");
  }
  return rng.next_int(static_cast<int>(omega_set.size()));
}

double estimate_subgradient_bound(const ConstraintSet& omega_set,
                                  const SimpleSet& x0, RngStream& rng,
                                  int samples) {
  double bound = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = x0.sample(rng);
    for (const auto& component : omega_set) {
      if (component->violation(x) > kSatisfactionTol) {
        bound = std::max(bound, component->subgradient(x).norm());
      }
    }
  }
  return bound;
}

}  // namespace dap
