#pragma once

#include <vector>

#include "wba/sinkhorn.hpp"

namespace wba {

struct GWConfig {
  double epsilon = 5e-5;
  int max_outer_iters = 200;
  double tolerance = 1e-7;  // max-abs change of the coupling between outer iterations
  SinkhornConfig inner;

  GWConfig() {
    inner.epsilon_relative_to_median = false;
    inner.max_iters = 500;
  }
};

struct GWResult {
  Coupling plan;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // entropic GW objective per outer iteration
};

// Square-loss GW objective sum_{jklm} (c1_jk - c2_lm)^2 pi_jl pi_km of a plan.
double gw_objective(const Matrix& c1, const Matrix& c2, const Matrix& plan, const Vector& p,
                    const Vector& q);

// Entropic Gromov-Wasserstein between two metric-measure spaces given by
// their intra-space distance matrices. Alternates Sinkhorn projections on the
// linearized square-loss cost.
GWResult gromov_wasserstein(const Matrix& c1, const Matrix& c2, const Vector& p, const Vector& q,
                            const GWConfig& cfg);

}  // namespace wba
