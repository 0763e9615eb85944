#include <limits>
#include <vector>

#include "wba/sinkhorn.hpp"

namespace wba {

// Successive shortest paths on the bipartite transportation graph. Forward
// arcs (i -> j) are uncapacitated, so every augmentation saturates a supply
// or a demand and the loop runs at most k + l times. Bellman-Ford handles the
// negative residual arcs.
std::pair<Coupling, double> exact_ot_oracle(const Vector& a, const Vector& b,
                                            const Matrix& cost) {
  const Eigen::Index k = a.size(), l = b.size();
  if (cost.rows() != k || cost.cols() != l)
    throw std::invalid_argument("exact_ot_oracle: cost shape mismatch");
  if (k * l > 64) throw std::invalid_argument("exact_ot_oracle: instance too large");

  const double inf = std::numeric_limits<double>::infinity();
  Vector supply = a, demand = b;
  Matrix plan = Matrix::Zero(k, l);

  while (true) {
    // shortest reduced path from any node with remaining supply to any node
    // with remaining demand, through residual arcs
    std::vector<double> dist(k + l, inf);
    std::vector<int> parent(k + l, -1);
    for (Eigen::Index i = 0; i < k; ++i)
      if (supply[i] > 1e-15) dist[i] = 0.0;

    bool any_source = false;
    for (Eigen::Index i = 0; i < k; ++i) any_source |= dist[i] == 0.0;
    if (!any_source) break;

    for (Eigen::Index pass = 0; pass < k + l; ++pass) {
      bool changed = false;
      for (Eigen::Index i = 0; i < k; ++i) {
        if (dist[i] == inf) continue;
        for (Eigen::Index j = 0; j < l; ++j) {
          if (dist[i] + cost(i, j) < dist[k + j] - 1e-15) {
            dist[k + j] = dist[i] + cost(i, j);
            parent[k + j] = static_cast<int>(i);
            changed = true;
          }
        }
      }
      for (Eigen::Index j = 0; j < l; ++j) {
        if (dist[k + j] == inf) continue;
        for (Eigen::Index i = 0; i < k; ++i) {
          if (plan(i, j) > 0.0 && dist[k + j] - cost(i, j) < dist[i] - 1e-15) {
            dist[i] = dist[k + j] - cost(i, j);
            parent[i] = static_cast<int>(k + j);
            changed = true;
          }
        }
      }
      if (!changed) break;
    }

    // cheapest reachable demand node
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < l; ++j)
      if (demand[j] > 1e-15 && dist[k + j] < inf && (best < 0 || dist[k + j] < dist[k + best]))
        best = j;
    if (best < 0) break;

    // walk back to find the bottleneck, then augment
    double delta = demand[best];
    int node = static_cast<int>(k + best);
    while (parent[node] != -1) {
      const int prev = parent[node];
      if (node >= k && prev < k) {
        // forward arc, uncapacitated
      } else {
        delta = std::min(delta, plan(node, prev - k));  // residual of (node <- prev)
      }
      node = prev;
    }
    delta = std::min(delta, supply[node]);

    node = static_cast<int>(k + best);
    while (parent[node] != -1) {
      const int prev = parent[node];
      if (node >= k && prev < k)
        plan(prev, node - k) += delta;
      else
        plan(node, prev - k) -= delta;
      node = prev;
    }
    supply[node] -= delta;
    demand[best] -= delta;
  }

  Coupling c{plan, a, b};
  const double total = plan.cwiseProduct(cost).sum();
  return {c, total};
}

}  // namespace wba
