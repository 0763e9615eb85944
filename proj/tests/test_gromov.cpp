#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "test_helpers.hpp"
#include "wba/cost.hpp"
#include "wba/gromov.hpp"

using namespace wba;
using namespace wba::test;

namespace {

GWConfig synthetic_gw_config() {
  GWConfig cfg;
  cfg.epsilon = 5e-3;
  cfg.inner.max_iters = 2000;
  return cfg;
}

Matrix permutation_matrix(const std::vector<Eigen::Index>& perm) {
  const Eigen::Index n = static_cast<Eigen::Index>(perm.size());
  Matrix p = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(i, perm[static_cast<std::size_t>(i)]) = 1.0;
  return p;
}

}  // namespace

TEST_CASE("GW self-alignment recovers the identity") {
  Rng rng(1);
  const Matrix x = gaussian_matrix(10, 3, rng);
  const Matrix c = cosine_distance_matrix(x);
  const Vector p = Vector::Constant(10, 0.1);
  const auto res = gromov_wasserstein(c, c, p, p, synthetic_gw_config());
  const auto argmax = row_argmax(res.plan.matrix);
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(argmax[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("GW recovers a planted permutation") {
  Rng rng(2);
  const Matrix x = gaussian_matrix(10, 3, rng);
  const Matrix c1 = cosine_distance_matrix(x);
  std::vector<Eigen::Index> perm(10);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const Matrix p = permutation_matrix(perm);
  const Matrix c2 = p.transpose() * c1 * p;  // c2(perm[j], perm[k]) = c1(j,k)

  const Vector u = Vector::Constant(10, 0.1);
  const auto res = gromov_wasserstein(c1, c2, u, u, synthetic_gw_config());
  const auto argmax = row_argmax(res.plan.matrix);
  for (Eigen::Index j = 0; j < 10; ++j)
    CHECK(argmax[static_cast<std::size_t>(j)] == perm[static_cast<std::size_t>(j)]);
}

TEST_CASE("GW plan beats every permutation plan on 4-point spaces") {
  Rng rng(3);
  const Matrix a = gaussian_matrix(4, 2, rng);
  const Matrix b = gaussian_matrix(4, 2, rng);
  const Matrix c1 = cosine_distance_matrix(a);
  const Matrix c2 = cosine_distance_matrix(b);
  const Vector u = Vector::Constant(4, 0.25);
  const auto res = gromov_wasserstein(c1, c2, u, u, synthetic_gw_config());
  const double ours = gw_objective(c1, c2, res.plan.matrix, u, u);

  std::vector<Eigen::Index> perm{0, 1, 2, 3};
  do {
    const Matrix plan = permutation_matrix(perm) * 0.25;
    const double theirs = gw_objective(c1, c2, plan, u, u);
    CHECK(ours <= theirs * 1.05 + 1e-9);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST_CASE("GW objective history is monotone non-increasing") {
  Rng rng(4);
  const Matrix c1 = cosine_distance_matrix(gaussian_matrix(8, 3, rng));
  const Matrix c2 = cosine_distance_matrix(gaussian_matrix(8, 3, rng));
  const Vector u = Vector::Constant(8, 0.125);
  const auto res = gromov_wasserstein(c1, c2, u, u, synthetic_gw_config());
  for (std::size_t i = 1; i < res.objective_history.size(); ++i)
    CHECK(res.objective_history[i] <= res.objective_history[i - 1] + 1e-9);
}

TEST_CASE("GW marginals feasible") {
  Rng rng(5);
  const Matrix c1 = cosine_distance_matrix(gaussian_matrix(6, 3, rng));
  const Matrix c2 = cosine_distance_matrix(gaussian_matrix(7, 3, rng));
  const Vector p = random_simplex(6, rng), q = random_simplex(7, rng);
  const auto res = gromov_wasserstein(c1, c2, p, q, synthetic_gw_config());
  CHECK((res.plan.matrix.rowwise().sum() - p).cwiseAbs().maxCoeff() <= 1e-5);
  CHECK((res.plan.matrix.colwise().sum().transpose() - q).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("GW relabeling invariance on 6-point instances") {
  Rng rng(6);
  const Matrix c1 = cosine_distance_matrix(gaussian_matrix(6, 3, rng));
  const Matrix c2 = cosine_distance_matrix(gaussian_matrix(6, 3, rng));
  const Vector u = Vector::Constant(6, 1.0 / 6.0);
  const auto base = gromov_wasserstein(c1, c2, u, u, synthetic_gw_config());

  std::vector<Eigen::Index> perm{3, 0, 5, 1, 4, 2};
  const Matrix p = permutation_matrix(perm);
  const Matrix c1p = p * c1 * p.transpose();  // rows/cols relabeled together
  const auto relabeled = gromov_wasserstein(c1p, c2, u, u, synthetic_gw_config());
  // row j of the relabeled plan corresponds to row perm^{-1}(j)... check via P
  CHECK((relabeled.plan.matrix - p * base.plan.matrix).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("GW input validation") {
  const Vector u = Vector::Constant(3, 1.0 / 3.0);
  CHECK_THROWS(gromov_wasserstein(Matrix::Zero(3, 2), Matrix::Zero(3, 3), u, u, GWConfig{}));
  CHECK_THROWS(gromov_wasserstein(Matrix::Zero(3, 3), Matrix::Zero(3, 3), Vector::Ones(2), u,
                                  GWConfig{}));
}
