#pragma once

#include <utility>

#include "wba/distribution.hpp"

namespace wba {

struct Coupling {
  Matrix matrix;        // k x l, nonnegative
  Vector row_marginal;  // length k
  Vector col_marginal;  // length l

  double max_marginal_violation() const {
    const double r = (matrix.rowwise().sum() - row_marginal).cwiseAbs().maxCoeff();
    const double c = (matrix.colwise().sum().transpose() - col_marginal).cwiseAbs().maxCoeff();
    return std::max(r, c);
  }
};

struct SinkhornConfig {
  double epsilon = 1e-2;
  bool epsilon_relative_to_median = true;  // actual eps = epsilon * median(C)
  int max_iters = 1000;
  double tolerance = 1e-6;              // max marginal violation
  double log_domain_threshold = 1e30;   // absorb scalings above this into potentials

  // Resolves the regularizer actually used for a given cost matrix.
  double resolve_epsilon(const Matrix& cost) const;
};

struct SinkhornResult {
  Coupling plan;
  Vector f, g;  // dual potentials (row side, column side)
  int iterations = 0;
  bool converged = false;
  double epsilon_used = 0.0;

  double transport_cost(const Matrix& cost) const {
    return plan.matrix.cwiseProduct(cost).sum();
  }
};

double median_of(const Matrix& m);

// Entropic OT between histograms a and b under cost C. Marginals must be
// strictly positive. Non-convergence is reported through `converged`, not
// thrown; NaN in the iterates is fatal.
SinkhornResult sinkhorn(const Vector& a, const Vector& b, const Matrix& cost,
                        const SinkhornConfig& cfg);

// Sharp (unregularized) transport cost <Pi, C> of the entropic plan between
// two distributions under squared Euclidean cost.
double wasserstein_sq(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                      const SinkhornConfig& cfg);

// Exact optimum of the unregularized transportation problem on small
// instances (k*l <= 64), via successive-shortest-path min-cost flow.
std::pair<Coupling, double> exact_ot_oracle(const Vector& a, const Vector& b, const Matrix& cost);

}  // namespace wba
