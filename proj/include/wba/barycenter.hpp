#pragma once

#include <cstdint>
#include <vector>

#include "wba/sinkhorn.hpp"

namespace wba {

struct BarycenterConfig {
  Eigen::Index support_size = 0;  // 0 = 2 x average input support size
  Vector lambda;                  // empty = uniform 1/m
  int max_iters = 10;
  double location_tolerance = 1e-4;  // max support-point displacement
  bool optimize_weights = true;
  double weight_step = 0.0;  // 0 = 0.5 / m
  std::uint64_t seed = 0;
};

struct BarycenterState {
  DiscreteDistribution distribution;   // support Y (s x d), mass b
  std::vector<Coupling> couplings;     // input i -> barycenter
  std::vector<Vector> dual_potentials; // barycenter-side potential g_i per input
  double objective = 0.0;              // sum_i lambda_i * <Pi_i, C_i>
  int iteration = 0;
  std::vector<double> objective_history;
  std::vector<double> displacement_history;
  double epsilon_used = 0.0;  // absolute eps the transports were solved with
};

// s x d standard-normal support with uniform mass, from the seeded generator.
DiscreteDistribution init_support(Eigen::Index s, Eigen::Index d, std::uint64_t seed);

// Fixed-point location step: each support point moves to the lambda-weighted
// barycentric combination of the input points coupled to it. Rows with
// (near-)zero mass are left in place.
Matrix update_locations(const BarycenterState& state,
                        const std::vector<DiscreteDistribution>& inputs, const Vector& lambda);

// Entropic mirror-descent step on the support mass, driven by the centered
// barycenter-side dual potentials of the current transports.
Vector update_weights(const BarycenterState& state, const Vector& lambda, double step);

Vector resolve_lambda(const BarycenterConfig& cfg, std::size_t m);

// Free-support Wasserstein barycenter by alternating Sinkhorn transports,
// location updates, and (optionally) weight updates.
BarycenterState compute_barycenter(const std::vector<DiscreteDistribution>& inputs,
                                   const BarycenterConfig& cfg, const SinkhornConfig& ot_cfg);

// Same, but continuing from an existing support/mass (warm start).
BarycenterState compute_barycenter_from(DiscreteDistribution start,
                                        const std::vector<DiscreteDistribution>& inputs,
                                        const BarycenterConfig& cfg,
                                        const SinkhornConfig& ot_cfg);

}  // namespace wba
