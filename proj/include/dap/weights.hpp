#pragma once

#include <Eigen/Dense>
#include <string>

#include "dap/graph.hpp"

namespace dap {

enum class WeightKind { kDoublyStochastic, kRowStochastic };

// One round's averaging matrix W_k plus the metadata needed to audit it.
// Entry (i, j) is the weight agent i puts on the message received from j;
// it may be nonzero only when j is an in-neighbor of i at round k.
struct WeightMatrix {
  Eigen::MatrixXd entries;
  long round = 0;
  double nu = 0.0;  // lower bound on nonzero entries, diagnostics only
  WeightKind kind = WeightKind::kRowStochastic;
};

// Row-stochastic equal-neighbor weights 1/d_i(k); valid on any digraph with
// self-loops, but generally not column stochastic.
WeightMatrix equal_neighbor_weights(const DigraphSequence& seq, long round);

// Metropolis-Hastings weights. Requires the round-k graph to be symmetric;
// the result is doubly stochastic.
WeightMatrix metropolis_weights(const DigraphSequence& seq, long round);

struct Assumption1Report {
  bool graph_respected = false;   // nonzero only on in-neighborhood
  bool nu_bound = false;          // nonzero entries >= nu
  bool row_stochastic = false;    // row sums = 1 within tolerance
  bool column_stochastic = false; // column sums = 1 within tolerance
  double worst_row_gap = 0.0;
  double worst_column_gap = 0.0;
  // entry value at the worst graph violation, 0 if none
  double worst_offending_entry = 0.0;

  bool all() const {
    return graph_respected && nu_bound && row_stochastic && column_stochastic;
  }
};

// Clause-by-clause audit of W against the round-k topology. Sum tolerance
// is 1e-12 on both rows and columns.
Assumption1Report validate_assumption1(const WeightMatrix& w,
                                       const DigraphSequence& seq, long round);

// Stationary distribution pi with pi^T W = pi^T, computed by power iteration
// on W^T. Requires W row stochastic with a strongly connected support graph;
// throws if the iteration fails to converge or the limit has a zero entry.
Eigen::VectorXd stationary_left_eigenvector(const WeightMatrix& w);

}  // namespace dap
