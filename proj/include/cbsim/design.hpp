#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace cbsim {

struct DesignConvergenceError : std::runtime_error {
  DesignConvergenceError(const std::string& what, double gap)
      : std::runtime_error(what), final_gap(gap) {}
  double final_gap;
};

// Probability weights over a finite vector set, with the strictly-positive
// support listed separately.
struct Design {
  std::vector<double> weights;
  std::vector<int> support;
};

// Invertible change of coordinates that maps a rank-deficient vector set onto
// full-rank vectors in R^r. Norms of the form v' V(pi)^{-1} v are invariant
// under this reparameterization for vectors in the span.
struct SpanReduction {
  int rank;
  Eigen::MatrixXd basis;  // original_dim x rank, orthonormal columns
  std::vector<Eigen::VectorXd> reduced_vectors;
};

SpanReduction reduce_to_span(const std::vector<Eigen::VectorXd>& vectors,
                             double tol = 1e-9);

// Worst-case normalized prediction variance g(pi) = max_a v_a' V(pi)^{-1} v_a
// with V(pi) = sum_a pi(a) v_a v_a'. Throws on a singular V.
double kw_gap(const std::vector<Eigen::VectorXd>& vectors,
              const Design& design);

// Frank-Wolfe ascent on log det V from a uniform start, run until the design
// certifies g(pi) <= 2 * d_span with support at most
// 4 * d_span * max(log log d_span, 0) + 16. Small weights (< 1/(4|A|^2)) are
// pruned and the result re-certified before returning. Throws a convergence
// error carrying the final gap if the iteration cap is hit first.
Design frank_wolfe_design(const std::vector<Eigen::VectorXd>& vectors,
                          int d_span, int max_iters = 20000,
                          double tol = 1e-10);

double support_bound(int d_span);

// Row-major conversion helper for marginal matrices.
std::vector<Eigen::VectorXd> rows_as_vectors(
    const std::vector<std::vector<double>>& rows);

}  // namespace cbsim
