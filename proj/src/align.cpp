#include "wba/align.hpp"

#include <cmath>

#include "wba/cost.hpp"

namespace wba {

Eigen::Index AlignmentState::language_index(const std::string& tag) const {
  for (std::size_t i = 0; i < spaces.size(); ++i)
    if (spaces[i].language_id == tag) return static_cast<Eigen::Index>(i);
  return -1;
}

Matrix procrustes(const Matrix& x, const Coupling& coupling, const Matrix& y) {
  if (coupling.matrix.rows() != x.rows() || coupling.matrix.cols() != y.rows())
    throw std::invalid_argument("procrustes: coupling shape mismatch");
  const Matrix m = x.transpose() * coupling.matrix * y;
  if (!m.allFinite()) throw std::runtime_error("procrustes: non-finite cross-covariance");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

namespace {

// Re-orthonormalize a drifting product of rotations.
Matrix snap_orthogonal(const Matrix& q) {
  const Matrix gram = q.transpose() * q;
  const double drift = (gram - Matrix::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff();
  if (drift <= 1e-10) return q;
  Eigen::JacobiSVD<Matrix> svd(q, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace

AlignmentState gw_initialize(const std::vector<EmbeddingSpace>& spaces,
                             const PipelineConfig& cfg) {
  if (spaces.size() < 2) throw std::invalid_argument("gw_initialize: need at least 2 languages");
  if (cfg.pivot_index >= spaces.size())
    throw std::invalid_argument("gw_initialize: pivot_index out of range");
  const Eigen::Index d = spaces.front().dim();
  for (const auto& sp : spaces)
    if (sp.dim() != d) throw std::invalid_argument("gw_initialize: embedding dims differ");

  AlignmentState state;
  state.spaces.reserve(spaces.size());
  for (const auto& sp : spaces) {
    state.spaces.push_back(center_embeddings(sp));
    state.masses.push_back(word_mass(sp.size(), cfg.mass_model));
    state.maps.push_back(Matrix::Identity(d, d));
    state.gw_converged.push_back(true);
  }

  const std::size_t pivot = cfg.pivot_index;
  const Matrix c_pivot = cosine_distance_matrix(state.spaces[pivot].vectors);
  for (std::size_t i = 0; i < state.spaces.size(); ++i) {
    if (i == pivot) continue;
    const Matrix c_i = cosine_distance_matrix(state.spaces[i].vectors);
    GWResult gw = gromov_wasserstein(c_i, c_pivot, state.masses[i], state.masses[pivot], cfg.gw);
    state.gw_converged[i] = gw.converged;
    const Matrix q = procrustes(state.spaces[i].vectors, gw.plan, state.spaces[pivot].vectors);
    state.spaces[i].vectors *= q;
    state.maps[i] = q;
  }
  return state;
}

RefineResult refine_to_barycenter(std::vector<DiscreteDistribution>& dists,
                                  const PipelineConfig& cfg) {
  const std::size_t m = dists.size();
  if (m == 0) throw std::invalid_argument("refine_to_barycenter: no inputs");
  const Eigen::Index d = dists.front().dim();
  const Vector lambda = resolve_lambda(cfg.bary, m);

  RefineResult res;
  res.rotations.assign(m, Matrix::Identity(d, d));

  // eps is pinned after the first round so every round minimizes the same
  // entropic objective; otherwise the per-round history is not comparable.
  SinkhornConfig ot = cfg.ot;
  for (int round = 0; round < cfg.outer_iters; ++round) {
    if (cfg.warm_start_support && round > 0 && res.bary.distribution.size() > 0)
      res.bary = compute_barycenter_from(res.bary.distribution, dists, cfg.bary, ot);
    else
      res.bary = compute_barycenter(dists, cfg.bary, ot);
    if (round == 0 && ot.epsilon_relative_to_median && res.bary.epsilon_used > 0.0) {
      ot.epsilon = res.bary.epsilon_used;
      ot.epsilon_relative_to_median = false;
    }

    // per-input refit and rotation toward the new barycenter
    for (std::size_t i = 0; i < m; ++i) {
      const Matrix dq =
          procrustes(dists[i].support, res.bary.couplings[i], res.bary.distribution.support);
      dists[i].support *= dq;
      res.rotations[i] = snap_orthogonal(res.rotations[i] * dq);
    }

    const double objective = res.bary.objective;
    const bool regressed = !res.history.empty() && objective > res.history.back() * 1.01;
    const bool settled =
        !res.history.empty() &&
        std::abs(objective - res.history.back()) <=
            cfg.objective_rel_tolerance * std::max(std::abs(res.history.back()), 1e-30);
    res.history.push_back(objective);
    res.regressions.push_back(regressed);
    if (settled) break;
  }

  // refresh couplings against the settled rotations
  res.bary.couplings.clear();
  res.bary.dual_potentials.clear();
  res.bary.objective = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const Matrix cost = squared_euclidean_cost(dists[i].support, res.bary.distribution.support);
    SinkhornResult sk = sinkhorn(dists[i].mass, res.bary.distribution.mass, cost, ot);
    res.bary.objective += lambda[static_cast<Eigen::Index>(i)] * sk.transport_cost(cost);
    res.bary.couplings.push_back(std::move(sk.plan));
    res.bary.dual_potentials.push_back(std::move(sk.g));
  }
  return res;
}

void barycenter_align(AlignmentState& state, const PipelineConfig& cfg) {
  const std::size_t m = state.spaces.size();
  if (m == 0) throw std::invalid_argument("barycenter_align: uninitialized state");

  std::vector<DiscreteDistribution> dists;
  dists.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    dists.push_back({state.spaces[i].vectors, state.masses[i]});

  RefineResult res = refine_to_barycenter(dists, cfg);
  for (std::size_t i = 0; i < m; ++i) {
    state.spaces[i].vectors = std::move(dists[i].support);
    state.maps[i] = snap_orthogonal(state.maps[i] * res.rotations[i]);
  }
  state.barycenter = std::move(res.bary);
  state.history = std::move(res.history);
  state.round_regressions = std::move(res.regressions);
}

Matrix arithmetic_mean_pivot(const std::vector<Matrix>& spaces,
                             const std::vector<Coupling>& couplings) {
  if (spaces.empty() || spaces.size() != couplings.size())
    throw std::invalid_argument("arithmetic_mean_pivot: size mismatch");
  const Eigen::Index n = couplings.front().matrix.rows();
  const Eigen::Index d = spaces.front().cols();
  Matrix mean = Matrix::Zero(n, d);
  for (std::size_t k = 0; k < spaces.size(); ++k) {
    const Matrix& p = couplings[k].matrix;
    if (p.rows() != n || p.cols() != spaces[k].rows() || spaces[k].cols() != d)
      throw std::invalid_argument("arithmetic_mean_pivot: dimension mismatch");
    mean += static_cast<double>(p.cols()) * (p * spaces[k]);
  }
  return mean / static_cast<double>(spaces.size());
}

}  // namespace wba
