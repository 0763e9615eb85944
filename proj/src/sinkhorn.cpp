#include "wba/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wba/cost.hpp"

namespace wba {

double median_of(const Matrix& m) {
  std::vector<double> v(m.data(), m.data() + m.size());
  auto mid = v.begin() + v.size() / 2;
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double SinkhornConfig::resolve_epsilon(const Matrix& cost) const {
  if (!epsilon_relative_to_median) return epsilon;
  const double med = median_of(cost);
  return med > 0.0 ? epsilon * med : epsilon;
}

namespace {

// log-sum-exp of each row
Vector row_lse(const Matrix& m) {
  const Vector mx = m.rowwise().maxCoeff();
  return mx.array() + (m.colwise() - mx).array().exp().rowwise().sum().log();
}

}  // namespace

SinkhornResult sinkhorn(const Vector& a, const Vector& b, const Matrix& cost,
                        const SinkhornConfig& cfg) {
  const Eigen::Index n = a.size(), m = b.size();
  if (cost.rows() != n || cost.cols() != m)
    throw std::invalid_argument("sinkhorn: cost shape does not match marginals");
  if ((a.array() <= 0.0).any() || (b.array() <= 0.0).any())
    throw std::invalid_argument("sinkhorn: marginals must be strictly positive");

  const double eps = cfg.resolve_epsilon(cost);

  // Plain matrix scaling while the scaling vectors stay below the threshold;
  // once they blow past it (or a kernel row underflows outright) the running
  // scalings are absorbed into the potentials and the remaining iterations run
  // in the log domain, so small eps stays finite.
  Vector alpha = Vector::Zero(n), beta = Vector::Zero(m);
  Vector u = Vector::Ones(n), v = Vector::Ones(m);
  const Vector log_a = a.array().log(), log_b = b.array().log();
  Matrix k = ((((-cost).colwise() + alpha).rowwise() + beta.transpose()) / eps).array().exp();
  bool log_mode = false;

  SinkhornResult res;
  res.epsilon_used = eps;
  double violation = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < cfg.max_iters; ++it) {
    if (!log_mode) {
      Vector nu = a.array() / (k * v).array();
      bool escape = !nu.allFinite() || nu.maxCoeff() > cfg.log_domain_threshold;
      Vector nv;
      if (!escape) {
        nv = b.array() / (k.transpose() * nu).array();
        escape = !nv.allFinite() || nv.maxCoeff() > cfg.log_domain_threshold;
      }
      if (escape) {
        alpha += eps * u.array().log().matrix();
        beta += eps * v.array().log().matrix();
        u.setOnes();
        v.setOnes();
        log_mode = true;
      } else {
        u = std::move(nu);
        v = std::move(nv);
        // after the v-step column marginals hold exactly; check rows
        violation = (u.cwiseProduct(k * v) - a).cwiseAbs().maxCoeff();
      }
    }
    if (log_mode) {
      alpha = eps * log_a - eps * row_lse(((-cost).rowwise() + beta.transpose()) / eps);
      beta = eps * log_b -
             eps * row_lse(((-cost.transpose()).rowwise() + alpha.transpose()) / eps);
      const Matrix logp = (((-cost).colwise() + alpha).rowwise() + beta.transpose()) / eps;
      violation = (logp.array().exp().matrix().rowwise().sum() - a).cwiseAbs().maxCoeff();
    }
    if (!std::isfinite(violation)) throw std::runtime_error("sinkhorn: non-finite iterate");
    if (violation <= cfg.tolerance) {
      ++it;
      res.converged = true;
      break;
    }
  }

  res.iterations = it;
  if (log_mode) {
    res.plan.matrix =
        ((((-cost).colwise() + alpha).rowwise() + beta.transpose()) / eps).array().exp();
    res.f = alpha;
    res.g = beta;
  } else {
    res.plan.matrix = u.asDiagonal() * k * v.asDiagonal();
    res.f = alpha + eps * u.array().log().matrix();
    res.g = beta + eps * v.array().log().matrix();
  }
  res.plan.row_marginal = a;
  res.plan.col_marginal = b;
  if (!res.plan.matrix.allFinite()) throw std::runtime_error("sinkhorn: non-finite plan");
  return res;
}

double wasserstein_sq(const DiscreteDistribution& mu, const DiscreteDistribution& nu,
                      const SinkhornConfig& cfg) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("wasserstein_sq: dimension mismatch");
  const Matrix cost = squared_euclidean_cost(mu.support, nu.support);
  const SinkhornResult res = sinkhorn(mu.mass, nu.mass, cost, cfg);
  return res.transport_cost(cost);
}

}  // namespace wba
