#include "dap/weights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dap {

namespace {
constexpr double kSumTol = 1e-12;
}

WeightMatrix equal_neighbor_weights(const DigraphSequence& seq, long round) {
  const int n = seq.node_count();
  WeightMatrix w;
  w.round = round;
  w.kind = WeightKind::kRowStochastic;
  w.entries = Eigen::MatrixXd::Zero(n, n);
  int max_degree = 1;
  for (int i = 0; i < n; ++i) {
    const auto& nbrs = seq.in_neighbors(round, i);
    const int d = static_cast<int>(nbrs.size());
    max_degree = std::max(max_degree, d);
    for (int j : nbrs) w.entries(i, j) = 1.0 / d;
  }
  w.nu = 1.0 / max_degree;
  return w;
}

WeightMatrix metropolis_weights(const DigraphSequence& seq, long round) {
  if (!seq.is_symmetric(round)) {
    throw std::invalid_argument(
        "metropolis weights need a symmetric graph at round " +
        std::to_string(round));
  }
  const int n = seq.node_count();
  WeightMatrix w;
  w.round = round;
  w.kind = WeightKind::kDoublyStochastic;
  w.entries = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int di = seq.in_degree(round, i);
    double off = 0.0;
    for (int j : seq.in_neighbors(round, i)) {
      if (j == i) continue;
      const int dj = seq.in_degree(round, j);
      const double wij = 1.0 / (1.0 + std::max(di - 1, dj - 1));
      w.entries(i, j) = wij;
      off += wij;
    }
    w.entries(i, i) = 1.0 - off;
  }
  double min_nonzero = 1.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (w.entries(i, j) > 0.0) min_nonzero = std::min(min_nonzero, w.entries(i, j));
  w.nu = min_nonzero;
  return w;
}

Assumption1Report validate_assumption1(const WeightMatrix& w,
                                       const DigraphSequence& seq,
                                       long round) {
  const int n = seq.node_count();
  if (w.entries.rows() != n || w.entries.cols() != n) {
    throw std::invalid_argument("weight matrix size does not match graph");
  }
  Assumption1Report report;
  report.graph_respected = true;
  report.nu_bound = true;

  for (int i = 0; i < n; ++i) {
    const auto& nbrs = seq.in_neighbors(round, i);
    for (int j = 0; j < n; ++j) {
      const double v = w.entries(i, j);
      if (v < 0.0) {
        report.graph_respected = false;
        report.worst_offending_entry = v;
        continue;
      }
      if (v > 0.0) {
        if (!std::binary_search(nbrs.begin(), nbrs.end(), j)) {
          report.graph_respected = false;
          report.worst_offending_entry =
              std::max(report.worst_offending_entry, v);
        }
        if (v < w.nu - 1e-15) report.nu_bound = false;
      }
    }
  }

  report.worst_row_gap =
      (w.entries.rowwise().sum().array() - 1.0).abs().maxCoeff();
  report.worst_column_gap =
      (w.entries.colwise().sum().array() - 1.0).abs().maxCoeff();
  report.row_stochastic = report.worst_row_gap <= kSumTol;
  report.column_stochastic = report.worst_column_gap <= kSumTol;
  return report;
}

Eigen::VectorXd stationary_left_eigenvector(const WeightMatrix& w) {
  const auto n = w.entries.rows();
  const double row_gap =
      (w.entries.rowwise().sum().array() - 1.0).abs().maxCoeff();
  if (row_gap > 1e-9) {
    throw std::invalid_argument("stationary vector needs a row-stochastic matrix");
  }

  Eigen::VectorXd pi = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  const Eigen::MatrixXd wt = w.entries.transpose();
  constexpr int kMaxIters = 500000;
  constexpr double kResidualTol = 1e-10;
  for (int it = 0; it < kMaxIters; ++it) {
    Eigen::VectorXd next = wt * pi;
    next /= next.sum();
    const double residual = (wt * next - next).lpNorm<Eigen::Infinity>();
    pi = next;
    if (residual <= kResidualTol) {
      if (pi.minCoeff() <= 0.0) {
        throw std::runtime_error(
            "stationary vector has a non-positive entry; support graph is "
            "not strongly connected");
      }
      return pi;
    }
  }
  throw std::runtime_error(
      "power iteration did not converge; matrix looks disconnected or "
      "periodic-degenerate");
}

}  // namespace dap
