#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dap/rng.hpp"

namespace dap::testing {

// Central-difference gradient, the independent oracle used against analytic
// subgradients at smooth points.
inline Eigen::VectorXd central_difference(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double eps = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd hi = x, lo = x;
    hi[j] += eps;
    lo[j] -= eps;
    g[j] = (f(hi) - f(lo)) / (2.0 * eps);
  }
  return g;
}

inline Eigen::VectorXd random_vector(RngStream& rng, int dim, double scale = 1.0) {
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.next_gaussian() * scale;
  return v;
}

inline Eigen::MatrixXd random_symmetric(RngStream& rng, int dim,
                                        double scale = 1.0) {
  Eigen::MatrixXd a(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) a(i, j) = rng.next_gaussian() * scale;
  return 0.5 * (a + a.transpose());
}

}  // namespace dap::testing
