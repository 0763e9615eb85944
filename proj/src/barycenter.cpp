#include "wba/barycenter.hpp"

#include <algorithm>
#include <cmath>

#include "wba/cost.hpp"
#include "wba/random.hpp"

namespace wba {

namespace {
constexpr double kDeadMass = 1e-12;
}

DiscreteDistribution init_support(Eigen::Index s, Eigen::Index d, std::uint64_t seed) {
  if (s < 1) throw std::invalid_argument("init_support: support size must be >= 1");
  Rng rng(seed);
  return DiscreteDistribution::uniform(gaussian_matrix(s, d, rng));
}

Vector resolve_lambda(const BarycenterConfig& cfg, std::size_t m) {
  if (cfg.lambda.size() == 0)
    return Vector::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m));
  if (static_cast<std::size_t>(cfg.lambda.size()) != m)
    throw std::invalid_argument("barycenter: lambda length != number of inputs");
  if ((cfg.lambda.array() < 0.0).any() || std::abs(cfg.lambda.sum() - 1.0) > 1e-9)
    throw std::invalid_argument("barycenter: lambda must be a probability vector");
  return cfg.lambda;
}

Matrix update_locations(const BarycenterState& state,
                        const std::vector<DiscreteDistribution>& inputs, const Vector& lambda) {
  const Eigen::Index s = state.distribution.size();
  const Eigen::Index d = state.distribution.dim();
  Matrix weighted = Matrix::Zero(s, d);
  for (std::size_t i = 0; i < inputs.size(); ++i)
    weighted += lambda[static_cast<Eigen::Index>(i)] *
                (state.couplings[i].matrix.transpose() * inputs[i].support);

  Matrix next = state.distribution.support;
  const Vector& b = state.distribution.mass;
  for (Eigen::Index l = 0; l < s; ++l)
    if (b[l] >= kDeadMass) next.row(l) = weighted.row(l) / b[l];
  return next;
}

Vector update_weights(const BarycenterState& state, const Vector& lambda, double step) {
  Vector grad = Vector::Zero(state.distribution.size());
  for (std::size_t i = 0; i < state.dual_potentials.size(); ++i) {
    Vector g = state.dual_potentials[i];
    g.array() -= g.mean();  // potentials are defined up to a constant
    grad += lambda[static_cast<Eigen::Index>(i)] * g;
  }
  Vector b = state.distribution.mass.array() * (-step * grad.array()).exp();
  b = b.cwiseMax(kDeadMass);  // keep the transports strictly feasible
  b /= b.sum();
  return b;
}

namespace {

// One sweep of transports against the current barycenter; fills couplings,
// potentials and the objective.
void solve_transports(BarycenterState& state, const std::vector<DiscreteDistribution>& inputs,
                      const Vector& lambda, const SinkhornConfig& ot_cfg) {
  state.couplings.clear();
  state.dual_potentials.clear();
  state.objective = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const Matrix cost = squared_euclidean_cost(inputs[i].support, state.distribution.support);
    SinkhornResult res = sinkhorn(inputs[i].mass, state.distribution.mass, cost, ot_cfg);
    state.objective += lambda[static_cast<Eigen::Index>(i)] * res.transport_cost(cost);
    state.couplings.push_back(std::move(res.plan));
    state.dual_potentials.push_back(std::move(res.g));
  }
}

}  // namespace

BarycenterState compute_barycenter_from(DiscreteDistribution start,
                                        const std::vector<DiscreteDistribution>& inputs,
                                        const BarycenterConfig& cfg,
                                        const SinkhornConfig& ot_cfg) {
  if (inputs.empty()) throw std::invalid_argument("compute_barycenter: no inputs");
  const Eigen::Index d = inputs.front().dim();
  for (const auto& in : inputs)
    if (in.dim() != d) throw std::invalid_argument("compute_barycenter: dimension mismatch");

  const Vector lambda = resolve_lambda(cfg, inputs.size());
  const double step = cfg.weight_step > 0.0
                          ? cfg.weight_step
                          : 0.5 / static_cast<double>(inputs.size());

  BarycenterState state;
  state.distribution = std::move(start);

  // Resolve a relative eps once, against the starting geometry: re-deriving it
  // from each sweep's cost matrices would change the objective being minimized
  // between iterations.
  SinkhornConfig ot = ot_cfg;
  if (ot.epsilon_relative_to_median) {
    std::vector<double> pooled;
    for (const auto& in : inputs) {
      const Matrix cost = squared_euclidean_cost(in.support, state.distribution.support);
      pooled.insert(pooled.end(), cost.data(), cost.data() + cost.size());
    }
    auto mid = pooled.begin() + pooled.size() / 2;
    std::nth_element(pooled.begin(), mid, pooled.end());
    if (*mid > 0.0) {
      ot.epsilon *= *mid;
      ot.epsilon_relative_to_median = false;
    }
  }
  state.epsilon_used = ot.epsilon_relative_to_median ? 0.0 : ot.epsilon;

  double wstep = step;
  for (int it = 0; it < cfg.max_iters; ++it) {
    solve_transports(state, inputs, lambda, ot);
    state.objective_history.push_back(state.objective);

    if (cfg.optimize_weights) {
      const double before = state.objective;
      const Vector old_mass = state.distribution.mass;
      auto old_couplings = state.couplings;
      auto old_potentials = state.dual_potentials;
      state.distribution.mass = update_weights(state, lambda, wstep);
      // couplings were solved against the old mass; resolve for consistency
      solve_transports(state, inputs, lambda, ot);
      if (state.objective > before) {
        // overshot: back off and keep the previous iterate so the outer
        // objective stays non-increasing
        state.distribution.mass = old_mass;
        state.couplings = std::move(old_couplings);
        state.dual_potentials = std::move(old_potentials);
        state.objective = before;
        wstep *= 0.5;
      }
    }

    const Matrix next = update_locations(state, inputs, lambda);
    const double displacement = (next - state.distribution.support).rowwise().norm().maxCoeff();
    state.distribution.support = next;
    state.displacement_history.push_back(displacement);
    state.iteration = it + 1;
    if (displacement <= cfg.location_tolerance) break;
  }

  // final transports against the settled support
  solve_transports(state, inputs, lambda, ot);
  state.objective_history.push_back(state.objective);
  return state;
}

BarycenterState compute_barycenter(const std::vector<DiscreteDistribution>& inputs,
                                   const BarycenterConfig& cfg, const SinkhornConfig& ot_cfg) {
  if (inputs.empty()) throw std::invalid_argument("compute_barycenter: no inputs");
  Eigen::Index s = cfg.support_size;
  if (s <= 0) {
    double avg = 0.0;
    for (const auto& in : inputs) avg += static_cast<double>(in.size());
    s = static_cast<Eigen::Index>(2.0 * avg / static_cast<double>(inputs.size()));
    s = std::max<Eigen::Index>(s, 1);
  }
  return compute_barycenter_from(init_support(s, inputs.front().dim(), cfg.seed), inputs, cfg,
                                 ot_cfg);
}

}  // namespace wba
