#include "wba/gromov.hpp"

#include <algorithm>
#include <cmath>

namespace wba {

namespace {

// Square loss splits as (a-b)^2 = a^2 + b^2 - a*(2b); the constant part of
// the linearized cost depends only on the marginals.
Matrix constant_block(const Matrix& c1, const Matrix& c2, const Vector& p, const Vector& q) {
  const Vector row_part = c1.array().square().matrix() * p;   // length n1
  const Vector col_part = c2.array().square().matrix() * q;   // length n2
  Matrix block = Matrix::Zero(p.size(), q.size());
  block.colwise() += row_part;
  block.rowwise() += col_part.transpose();
  return block;
}

Matrix linearized_cost(const Matrix& block, const Matrix& c1, const Matrix& c2,
                       const Matrix& plan) {
  return block - 2.0 * (c1 * plan * c2.transpose());
}

}  // namespace

double gw_objective(const Matrix& c1, const Matrix& c2, const Matrix& plan, const Vector& p,
                    const Vector& q) {
  const Matrix block = constant_block(c1, c2, p, q);
  return linearized_cost(block, c1, c2, plan).cwiseProduct(plan).sum();
}

GWResult gromov_wasserstein(const Matrix& c1, const Matrix& c2, const Vector& p, const Vector& q,
                            const GWConfig& cfg) {
  if (c1.rows() != c1.cols() || c2.rows() != c2.cols())
    throw std::invalid_argument("gromov_wasserstein: distance matrices must be square");
  if (c1.rows() != p.size() || c2.rows() != q.size())
    throw std::invalid_argument("gromov_wasserstein: marginal length mismatch");

  SinkhornConfig inner = cfg.inner;
  inner.epsilon = cfg.epsilon;
  inner.epsilon_relative_to_median = false;

  const Matrix block = constant_block(c1, c2, p, q);
  Matrix plan = p * q.transpose();  // product-measure start

  GWResult res;
  double prev_objective = linearized_cost(block, c1, c2, plan).cwiseProduct(plan).sum();
  int it = 0;
  for (; it < cfg.max_outer_iters; ++it) {
    const Matrix cost = linearized_cost(block, c1, c2, plan);
    const SinkhornResult sk = sinkhorn(p, q, cost, inner);
    plan = sk.plan.matrix;
    const double objective = linearized_cost(block, c1, c2, plan).cwiseProduct(plan).sum();
    res.objective_history.push_back(objective);
    if (!plan.allFinite()) throw std::runtime_error("gromov_wasserstein: non-finite plan");
    // plan entries scale with 1/(n1*n2), so convergence is judged on the
    // objective rather than on entrywise plan movement
    if (std::abs(objective - prev_objective) <=
        cfg.tolerance * std::max(1.0, std::abs(prev_objective))) {
      ++it;
      res.converged = true;
      break;
    }
    prev_objective = objective;
  }
  res.iterations = it;
  res.plan = Coupling{plan, p, q};
  return res;
}

}  // namespace wba
