#pragma once

#include <string>
#include <vector>

#include "wba/barycenter.hpp"
#include "wba/embedding.hpp"
#include "wba/gromov.hpp"

namespace wba {

struct PipelineConfig {
  GWConfig gw;
  BarycenterConfig bary;
  SinkhornConfig ot;
  int outer_iters = 10;
  double objective_rel_tolerance = 1e-4;  // early stop on relative objective change
  std::size_t pivot_index = 0;            // common frame of the initialization phase
  MassModel mass_model = MassModel::Uniform;
  bool warm_start_support = true;
};

struct AlignmentState {
  std::vector<EmbeddingSpace> spaces;  // centered, in current rotated coordinates
  std::vector<Matrix> maps;            // composed Q_i, original (centered) -> common
  std::vector<Vector> masses;          // word mass per language
  BarycenterState barycenter;          // holds the language->barycenter couplings
  std::vector<double> history;         // objective per refinement round
  std::vector<bool> round_regressions; // rounds where the objective rose by > 1%
  std::vector<bool> gw_converged;

  Eigen::Index language_index(const std::string& tag) const;
};

// Best orthogonal Q maximizing <X^T Pi Y, Q>, via SVD of the weighted
// cross-covariance.
Matrix procrustes(const Matrix& x, const Coupling& coupling, const Matrix& y);

// Phase 1: center every space, align each to the pivot language with
// entropic GW on intra-space cosine distances, and rotate in place.
AlignmentState gw_initialize(const std::vector<EmbeddingSpace>& spaces,
                             const PipelineConfig& cfg);

// Phase 2: alternating barycenter / per-language OT / Procrustes rounds.
void barycenter_align(AlignmentState& state, const PipelineConfig& cfg);

// The refinement loop shared by the flat pipeline and each internal node of
// the hierarchical variant: alternates barycenter solves with per-input
// Procrustes rotations of the input supports (mutated in place).
struct RefineResult {
  BarycenterState bary;
  std::vector<Matrix> rotations;  // composed rotation applied to each input
  std::vector<double> history;
  std::vector<bool> regressions;
};

RefineResult refine_to_barycenter(std::vector<DiscreteDistribution>& dists,
                                  const PipelineConfig& cfg);

// Eq-style arithmetic mean pivot: (1/m) sum_k (n_k P_k) X_k over spaces
// already in common coordinates; couplings act as soft permutations.
Matrix arithmetic_mean_pivot(const std::vector<Matrix>& spaces,
                             const std::vector<Coupling>& couplings);

}  // namespace wba
