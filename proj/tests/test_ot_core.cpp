#include <doctest.h>

#include "test_helpers.hpp"
#include "wba/cost.hpp"
#include "wba/sinkhorn.hpp"

using namespace wba;
using namespace wba::test;

TEST_CASE("sinkhorn on zero cost returns the product measure") {
  const Vector a = Vector::Constant(2, 0.5), b = Vector::Constant(2, 0.5);
  SinkhornConfig cfg;
  cfg.epsilon_relative_to_median = false;
  cfg.epsilon = 0.1;
  const auto res = sinkhorn(a, b, Matrix::Zero(2, 2), cfg);
  CHECK(res.converged);
  CHECK((res.plan.matrix.array() - 0.25).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("sinkhorn diagonal dominance on matched supports") {
  Rng rng(5);
  const Matrix x = gaussian_matrix(4, 3, rng);
  const Matrix c = squared_euclidean_cost(x, x);
  SinkhornConfig cfg;
  cfg.epsilon = 1e-3;  // times median
  const auto res = sinkhorn(Vector::Constant(4, 0.25), Vector::Constant(4, 0.25), c, cfg);
  for (auto [i, j] : {std::pair{0, 0}, {1, 1}, {2, 2}, {3, 3}})
    CHECK(row_argmax(res.plan.matrix)[static_cast<std::size_t>(i)] == j);
}

TEST_CASE("sinkhorn near-optimality against permutation enumeration") {
  Rng rng(42);
  const Matrix c = random_cost(5, 5, rng);
  SinkhornConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.max_iters = 20000;
  const Vector u = Vector::Constant(5, 0.2);
  const auto res = sinkhorn(u, u, c, cfg);
  const double entropic = res.transport_cost(c);
  const double exact = permutation_ot_cost(c);
  // marginals only hold to 1e-6, so the sharp cost can dip below the LP value
  // by that order
  CHECK(entropic >= exact - 1e-5);
  CHECK(entropic <= exact * 1.05 + 1e-12);
}

TEST_CASE("sinkhorn rejects bad inputs and reports non-convergence") {
  SinkhornConfig cfg;
  Vector a(2), b(2);
  a << 0.5, 0.5;
  b << 1.0, 0.0;  // zero-mass point
  CHECK_THROWS(sinkhorn(a, b, Matrix::Zero(2, 2), cfg));
  CHECK_THROWS(sinkhorn(a, a, Matrix::Zero(3, 2), cfg));

  Rng rng(1);
  cfg.max_iters = 2;
  cfg.epsilon_relative_to_median = false;
  cfg.epsilon = 1e-3;
  const Vector p = random_simplex(8, rng), q = random_simplex(8, rng);
  const auto res = sinkhorn(p, q, random_cost(8, 8, rng), cfg);
  CHECK_FALSE(res.converged);
  CHECK(res.iterations == 2);
  CHECK(res.plan.matrix.allFinite());
}

TEST_CASE("marginal feasibility on random instances") {
  Rng rng(9);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 8);
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 8);
    const Vector a = random_simplex(n, rng), b = random_simplex(m, rng);
    SinkhornConfig cfg;
    cfg.max_iters = 500000;
    const auto res = sinkhorn(a, b, random_cost(n, m, rng), cfg);
    CHECK(res.converged);
    CHECK(res.plan.max_marginal_violation() <= cfg.tolerance * 1.001);
    CHECK((res.plan.matrix.array() >= 0.0).all());
  }
}

TEST_CASE("monotonicity of transport cost in epsilon") {
  Rng rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix c = random_cost(6, 6, rng);
    const Vector a = random_simplex(6, rng), b = random_simplex(6, rng);
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {0.5, 0.1, 0.02, 0.004}) {
      SinkhornConfig cfg;
      cfg.epsilon_relative_to_median = false;
      cfg.epsilon = eps;
      cfg.max_iters = 50000;
      const auto res = sinkhorn(a, b, c, cfg);
      const double cost = res.transport_cost(c);
      // smaller eps gives smaller (sharper) cost
      if (prev < 1e300) CHECK(cost <= prev + 1e-9);
      prev = cost;
    }
  }
}

TEST_CASE("log-domain stabilization agrees with the naive path") {
  Rng rng(23);
  const Matrix c = random_cost(5, 6, rng);
  const Vector a = random_simplex(5, rng), b = random_simplex(6, rng);
  SinkhornConfig naive;
  naive.epsilon_relative_to_median = false;
  naive.epsilon = 0.05;
  SinkhornConfig stabilized = naive;
  stabilized.log_domain_threshold = 1.5;  // absorb almost every iteration
  const auto r1 = sinkhorn(a, b, c, naive);
  const auto r2 = sinkhorn(a, b, c, stabilized);
  CHECK((r1.plan.matrix - r2.plan.matrix).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("stabilized path survives tiny epsilon") {
  Rng rng(29);
  const Matrix c = random_cost(6, 6, rng);
  const Vector u = Vector::Constant(6, 1.0 / 6.0);
  SinkhornConfig cfg;
  cfg.epsilon_relative_to_median = false;
  cfg.epsilon = 5e-5;
  cfg.max_iters = 2000000;
  const auto res = sinkhorn(u, u, c, cfg);
  CHECK(res.plan.matrix.allFinite());
  CHECK(res.plan.max_marginal_violation() <= 1e-6 * 1.001);
}

TEST_CASE("wasserstein_sq closed forms") {
  Matrix p0(1, 2), p1(1, 2);
  p0 << 0, 0;
  p1 << 3, 4;
  const DiscreteDistribution d0{p0, Vector::Ones(1)};
  const DiscreteDistribution d1{p1, Vector::Ones(1)};
  SinkhornConfig cfg;
  CHECK(wasserstein_sq(d0, d1, cfg) == doctest::Approx(25.0));

  Rng rng(31);
  const Matrix x = gaussian_matrix(4, 2, rng);
  const DiscreteDistribution mu = DiscreteDistribution::uniform(x);
  cfg.epsilon = 1e-3;
  CHECK(wasserstein_sq(mu, mu, cfg) <= 1e-4);
}

TEST_CASE("wasserstein_sq near the tiny-LP optimum") {
  Rng rng(37);
  const Matrix xs = gaussian_matrix(3, 2, rng);
  const Matrix ys = gaussian_matrix(3, 2, rng);
  const DiscreteDistribution mu{xs, random_simplex(3, rng)};
  const DiscreteDistribution nu{ys, random_simplex(3, rng)};
  SinkhornConfig cfg;
  cfg.epsilon = 1e-3;
  cfg.max_iters = 50000;
  const Matrix c = squared_euclidean_cost(xs, ys);
  const auto [plan, exact] = exact_ot_oracle(mu.mass, nu.mass, c);
  const double entropic = wasserstein_sq(mu, nu, cfg);
  CHECK(entropic >= exact - 1e-5);
  CHECK(entropic <= exact * 1.05 + 1e-12);
}

TEST_CASE("exact_ot_oracle closed forms") {
  SUBCASE("1x1 forced plan") {
    const auto [plan, cost] = exact_ot_oracle(Vector::Ones(1), Vector::Ones(1),
                                              Matrix::Constant(1, 1, 7.0));
    CHECK(plan.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(cost == doctest::Approx(7.0));
  }
  SUBCASE("2x2 uniform anti-diagonal cost") {
    Matrix c(2, 2);
    c << 0, 1, 1, 0;
    const Vector u = Vector::Constant(2, 0.5);
    const auto [plan, cost] = exact_ot_oracle(u, u, c);
    CHECK(cost == doctest::Approx(0.0));
    CHECK(plan.matrix(0, 0) == doctest::Approx(0.5));
    CHECK(plan.matrix(1, 1) == doctest::Approx(0.5));
  }
  SUBCASE("3x3 equals min over permutations") {
    Rng rng(41);
    const Matrix c = random_cost(3, 3, rng);
    const Vector u = Vector::Constant(3, 1.0 / 3.0);
    const auto [plan, cost] = exact_ot_oracle(u, u, c);
    CHECK(cost == doctest::Approx(permutation_ot_cost(c)).epsilon(1e-10));
  }
  SUBCASE("instance too large") {
    CHECK_THROWS(exact_ot_oracle(Vector::Constant(9, 1.0 / 9), Vector::Constant(9, 1.0 / 9),
                                 Matrix::Zero(9, 9)));
  }
}

TEST_CASE("exact oracle is feasible and lower-bounds sinkhorn") {
  Rng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 5);
    const Eigen::Index m = 2 + static_cast<Eigen::Index>(rng() % 5);
    const Vector a = random_simplex(n, rng), b = random_simplex(m, rng);
    const Matrix c = random_cost(n, m, rng);
    const auto [plan, exact] = exact_ot_oracle(a, b, c);
    CHECK(plan.max_marginal_violation() <= 1e-9);
    SinkhornConfig cfg;
    cfg.max_iters = 500000;
    const auto res = sinkhorn(a, b, c, cfg);
    CHECK(exact <= res.transport_cost(c) + 1e-5);
  }
}
