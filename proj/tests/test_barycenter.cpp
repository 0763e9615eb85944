#include <doctest.h>

#include <algorithm>

#include "test_helpers.hpp"
#include "wba/barycenter.hpp"
#include "wba/cost.hpp"

using namespace wba;
using namespace wba::test;

TEST_CASE("init_support") {
  const auto single = init_support(1, 3, 0);
  CHECK(single.size() == 1);
  CHECK(single.mass[0] == doctest::Approx(1.0));

  const auto a = init_support(3, 2, 99);
  const auto b = init_support(3, 2, 99);
  CHECK((a.support - b.support).cwiseAbs().maxCoeff() == 0.0);

  // CLT bound on the entry mean for a large sample
  const auto big = init_support(10000, 300, 7);
  const double mean = big.support.mean();
  CHECK(std::abs(mean) <= 3.0 / std::sqrt(10000.0 * 300.0));
}

TEST_CASE("update_locations closed forms") {
  SUBCASE("single matched input is a fixed point") {
    Rng rng(1);
    const Matrix x = gaussian_matrix(4, 2, rng);
    BarycenterState state;
    state.distribution = DiscreteDistribution::uniform(x);
    Coupling diag;
    diag.matrix = Matrix(Vector::Constant(4, 0.25).asDiagonal());
    diag.row_marginal = diag.col_marginal = Vector::Constant(4, 0.25);
    state.couplings = {diag};
    const Vector lambda = Vector::Ones(1);
    const Matrix y = update_locations(state, {DiscreteDistribution::uniform(x)}, lambda);
    CHECK((y - x).cwiseAbs().maxCoeff() <= 1e-12);
  }

  SUBCASE("midpoint of two point masses") {
    Matrix x1(1, 2), x2(1, 2);
    x1 << 0, 0;
    x2 << 2, 0;
    BarycenterState state;
    state.distribution = {Matrix::Zero(1, 2), Vector::Ones(1)};
    Coupling forced;
    forced.matrix = Matrix::Ones(1, 1);
    forced.row_marginal = forced.col_marginal = Vector::Ones(1);
    state.couplings = {forced, forced};
    Vector lambda(2);
    lambda << 0.5, 0.5;
    const Matrix y = update_locations(
        state, {{x1, Vector::Ones(1)}, {x2, Vector::Ones(1)}}, lambda);
    CHECK(y(0, 0) == doctest::Approx(1.0));
    CHECK(y(0, 1) == doctest::Approx(0.0));
  }
}

TEST_CASE("update_weights") {
  BarycenterState state;
  state.distribution = {Matrix::Zero(3, 2), Vector::Constant(3, 1.0 / 3.0)};

  SUBCASE("zero potentials leave mass unchanged") {
    state.dual_potentials = {Vector::Zero(3)};
    const Vector b = update_weights(state, Vector::Ones(1), 0.5);
    CHECK((b.array() - 1.0 / 3.0).abs().maxCoeff() <= 1e-12);
  }
  SUBCASE("mass conservation under arbitrary potentials") {
    Vector g(3);
    g << 5.0, -2.0, 0.4;
    state.dual_potentials = {g};
    const Vector b = update_weights(state, Vector::Ones(1), 0.5);
    CHECK(std::abs(b.sum() - 1.0) <= 1e-9);
    CHECK((b.array() >= 0.0).all());
  }
}

TEST_CASE("weight step decreases the objective on a matched-support instance") {
  Rng rng(2);
  const Matrix x = gaussian_matrix(5, 2, rng);
  Vector target = random_simplex(5, rng);
  const DiscreteDistribution input{x, target};

  SinkhornConfig ot;
  ot.epsilon = 1e-2;
  BarycenterConfig cfg;
  cfg.support_size = 5;
  cfg.max_iters = 1;
  cfg.optimize_weights = false;

  // start from the same support with uniform mass; only weights need to move
  BarycenterState state = compute_barycenter_from(DiscreteDistribution::uniform(x), {input},
                                                  cfg, ot);
  const double before = state.objective;
  state.distribution.mass = update_weights(state, Vector::Ones(1), 0.5);
  const Matrix c = squared_euclidean_cost(x, state.distribution.support);
  const double after =
      sinkhorn(input.mass, state.distribution.mass, c, ot).transport_cost(c);
  CHECK(after <= before + 1e-9);
}

TEST_CASE("mass decays off the shared support subset") {
  // both inputs live on rows {0,1}; barycenter support includes a far point
  Matrix pts(3, 2);
  pts << 0, 0, 1, 0, 50, 50;
  Matrix in_pts = pts.topRows(2);
  const DiscreteDistribution input{in_pts, Vector::Constant(2, 0.5)};

  SinkhornConfig ot;
  ot.epsilon = 1e-2;
  BarycenterConfig cfg;
  cfg.optimize_weights = false;
  cfg.max_iters = 1;
  cfg.location_tolerance = 1e-12;

  DiscreteDistribution bary = DiscreteDistribution::uniform(pts);
  double prev_outside = bary.mass[2];
  for (int step = 0; step < 10; ++step) {
    BarycenterState state;
    state.distribution = bary;
    const Matrix c = squared_euclidean_cost(input.support, bary.support);
    auto res = sinkhorn(input.mass, bary.mass, c, ot);
    state.couplings = {res.plan};
    state.dual_potentials = {res.g};
    bary.mass = update_weights(state, Vector::Ones(1), 0.25);
    CHECK(bary.mass[2] <= prev_outside + 1e-12);
    prev_outside = bary.mass[2];
  }
  CHECK(prev_outside < 1.0 / 3.0);
}

TEST_CASE("compute_barycenter closed forms") {
  SinkhornConfig ot;

  SUBCASE("lambda-weighted barycenter of two point masses") {
    Matrix x1(1, 2), x2(1, 2);
    x1 << 0, 0;
    x2 << 4, 0;
    BarycenterConfig cfg;
    cfg.support_size = 1;
    cfg.lambda = Vector(2);
    cfg.lambda << 0.75, 0.25;
    cfg.max_iters = 50;
    cfg.location_tolerance = 1e-10;
    const auto state = compute_barycenter({{x1, Vector::Ones(1)}, {x2, Vector::Ones(1)}}, cfg, ot);
    CHECK(state.distribution.support(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(state.distribution.support(0, 1) == doctest::Approx(0.0));
  }

  SUBCASE("identical inputs: support converges onto the common input") {
    Rng rng(3);
    const Matrix x = gaussian_matrix(4, 2, rng);
    const DiscreteDistribution input = DiscreteDistribution::uniform(x);
    BarycenterConfig cfg;
    cfg.support_size = 4;
    cfg.max_iters = 60;
    cfg.seed = 11;
    cfg.optimize_weights = false;
    SinkhornConfig sharp;
    sharp.epsilon = 1e-3;
    sharp.max_iters = 20000;
    const auto state = compute_barycenter({input, input}, cfg, sharp);
    // Hausdorff distance from converged support to the input support
    double hausdorff = 0.0;
    for (Eigen::Index l = 0; l < 4; ++l) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < 4; ++j)
        best = std::min(best, (state.distribution.support.row(l) - x.row(j)).norm());
      hausdorff = std::max(hausdorff, best);
    }
    CHECK(hausdorff <= 1e-2);
    CHECK(state.objective <= 1e-2);
  }
}

TEST_CASE("1-d barycenter matches quantile averaging") {
  // two 2-point distributions on a line, uniform mass: the W2 barycenter
  // support is the quantile-wise average
  Matrix x1(2, 1), x2(2, 1);
  x1 << -2, 1;
  x2 << 0, 3;
  BarycenterConfig cfg;
  cfg.support_size = 2;
  cfg.max_iters = 80;
  cfg.optimize_weights = false;
  cfg.seed = 5;
  SinkhornConfig ot;
  ot.epsilon = 1e-3;
  ot.max_iters = 20000;
  const auto state = compute_barycenter(
      {DiscreteDistribution::uniform(x1), DiscreteDistribution::uniform(x2)}, cfg, ot);
  std::vector<double> support{state.distribution.support(0, 0), state.distribution.support(1, 0)};
  std::sort(support.begin(), support.end());
  CHECK(support[0] == doctest::Approx(-1.0).epsilon(0.05));  // (-2+0)/2
  CHECK(support[1] == doctest::Approx(2.0).epsilon(0.05));   // (1+3)/2
}

TEST_CASE("barycenter objective non-increasing and support reproducible") {
  Rng rng(6);
  std::vector<DiscreteDistribution> inputs;
  for (int i = 0; i < 3; ++i) inputs.push_back(DiscreteDistribution::uniform(gaussian_matrix(6, 2, rng)));

  BarycenterConfig cfg;
  cfg.support_size = 6;
  cfg.max_iters = 15;
  cfg.seed = 21;
  SinkhornConfig ot;
  const auto s1 = compute_barycenter(inputs, cfg, ot);
  for (std::size_t i = 1; i < s1.objective_history.size(); ++i)
    CHECK(s1.objective_history[i] <= s1.objective_history[i - 1] + 1e-6);
  CHECK(std::abs(s1.distribution.mass.sum() - 1.0) <= 1e-9);

  const auto s2 = compute_barycenter(inputs, cfg, ot);
  CHECK((s1.distribution.support - s2.distribution.support).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("unweighted mode keeps the mass exactly uniform") {
  Rng rng(7);
  std::vector<DiscreteDistribution> inputs{
      DiscreteDistribution::uniform(gaussian_matrix(5, 2, rng)),
      DiscreteDistribution::uniform(gaussian_matrix(5, 2, rng))};
  BarycenterConfig cfg;
  cfg.support_size = 4;
  cfg.max_iters = 5;
  cfg.optimize_weights = false;
  const auto state = compute_barycenter(inputs, cfg, SinkhornConfig{});
  CHECK((state.distribution.mass.array() == 0.25).all());
}

TEST_CASE("translation equivariance") {
  Rng rng(8);
  std::vector<DiscreteDistribution> inputs{
      DiscreteDistribution::uniform(gaussian_matrix(5, 2, rng)),
      DiscreteDistribution::uniform(gaussian_matrix(5, 2, rng))};
  BarycenterConfig cfg;
  cfg.support_size = 5;
  cfg.max_iters = 10;
  cfg.seed = 3;
  cfg.optimize_weights = false;
  SinkhornConfig ot;
  const DiscreteDistribution start = init_support(5, 2, cfg.seed);

  const auto base = compute_barycenter_from(start, inputs, cfg, ot);

  Eigen::RowVector2d shift(3.0, -1.5);
  auto shifted_inputs = inputs;
  for (auto& d : shifted_inputs) d.support.rowwise() += shift;
  DiscreteDistribution shifted_start = start;
  shifted_start.support.rowwise() += shift;
  // shifting inputs and start together leaves every cost matrix unchanged
  const auto shifted = compute_barycenter_from(shifted_start, shifted_inputs, cfg, ot);
  const Matrix delta = shifted.distribution.support - base.distribution.support;
  CHECK((delta.rowwise() - shift).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("barycenter with s=1 matches the grid-search oracle") {
  // single support point: W2^2 to a point mass has the closed form
  // sum_i mass_i |x_i - y|^2; grid search over a lattice is an independent
  // check of the optimizer
  Rng rng(9);
  const Matrix a = gaussian_matrix(3, 2, rng) * 0.5;
  const Matrix b = gaussian_matrix(3, 2, rng) * 0.5;
  const std::vector<DiscreteDistribution> inputs{DiscreteDistribution::uniform(a),
                                                 DiscreteDistribution::uniform(b)};
  BarycenterConfig cfg;
  cfg.support_size = 1;
  cfg.max_iters = 60;
  cfg.location_tolerance = 1e-10;
  SinkhornConfig ot;
  ot.epsilon = 1e-3;
  ot.max_iters = 20000;
  const auto state = compute_barycenter(inputs, cfg, ot);

  double best = std::numeric_limits<double>::infinity();
  for (int gx = -10; gx <= 10; ++gx)
    for (int gy = -10; gy <= 10; ++gy) {
      const Eigen::RowVector2d y(gx / 10.0, gy / 10.0);
      double obj = 0.0;
      for (const auto& in : inputs)
        for (Eigen::Index i = 0; i < in.size(); ++i)
          obj += 0.5 * in.mass[i] * (in.support.row(i) - y).squaredNorm();
      best = std::min(best, obj);
    }
  CHECK(state.objective <= best * 1.05 + 1e-3);
}
