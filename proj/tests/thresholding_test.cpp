#include <catch2/catch_amalgamated.hpp>

#include "mist/solvers.hpp"
#include "mist/thresholding.hpp"
#include "oracles.hpp"

using mist::DenseMatrix;
using mist::ProblemInstance;
using mist::ThresholdLevel;
using mist::Vector;

TEST_CASE("ThresholdLevel caches the boundary") {
  const ThresholdLevel level(0.5);
  CHECK(level.boundary == 1.0);
  const ThresholdLevel l2(0.3125);
  CHECK(l2.boundary * l2.boundary == Catch::Approx(2.0 * l2.h).epsilon(1e-15));
  CHECK_THROWS_AS(ThresholdLevel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(ThresholdLevel(-1.0), std::invalid_argument);
}

TEST_CASE("hard threshold, strict cases") {
  const Vector g{1.5, 0.5, -2.0};
  const Vector ref{9.0, 9.0, 9.0};
  const Vector out = mist::hard_threshold(g, ref, ThresholdLevel(0.5));
  CHECK(out == Vector{1.5, 0.0, -2.0});
}

TEST_CASE("hard threshold resolves ties by the reference support") {
  const Vector g{1.0, -1.0};
  const Vector ref{0.3, 0.0};
  const Vector out = mist::hard_threshold(g, ref, ThresholdLevel(0.5));
  CHECK(out == Vector{1.0, 0.0});
  CHECK_THROWS_AS(mist::hard_threshold(g, Vector{1.0}, ThresholdLevel(0.5)),
                  std::invalid_argument);
}

TEST_CASE("hard threshold agrees with the two-point minimizer, ties included") {
  std::mt19937 gen(77);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> hu(0.05, 2.0);
  const double h = hu(gen);
  const ThresholdLevel level(h);
  Vector g(1000), ref(1000);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = 2.0 * n(gen);
    ref[i] = (i % 3 == 0) ? 0.0 : n(gen);
  }
  const Vector out = mist::hard_threshold(g, ref, level);
  for (std::size_t i = 0; i < g.size(); ++i)
    REQUIRE(out[i] == oracle::two_point_threshold(g[i], ref[i], h));

  // exact ties at h = 1/2: boundary = 1 and boundary^2/2 = h hold exactly,
  // so the enumeration oracle sees the same tie set as the operator
  const ThresholdLevel half(0.5);
  REQUIRE(half.boundary == 1.0);
  const Vector gt{1.0, -1.0, 1.0, -1.0};
  const Vector rt{1.0, 0.0, 0.0, -0.5};
  const Vector tied = mist::hard_threshold(gt, rt, half);
  for (std::size_t i = 0; i < gt.size(); ++i)
    REQUIRE(tied[i] == oracle::two_point_threshold(gt[i], rt[i], 0.5));
  CHECK(tied == Vector{1.0, 0.0, 0.0, -1.0});
}

TEST_CASE("gradient step, trivial cases") {
  // stationary point of f: identity design fitted exactly
  const auto ident = ProblemInstance::with_bound(
      DenseMatrix::identity(3), Vector{1.0, -2.0, 0.5}, 1.0);
  const Vector x{1.0, -2.0, 0.5};
  CHECK(mist::gradient_step(ident, 2.0, x) == x);

  // from the origin the step lands on y_bar / mu
  const auto a = oracle::random_matrix(5, 8, 80);
  const auto y = oracle::random_vector(5, 81);
  const ProblemInstance inst(a, y);
  const double mu = inst.spec_norm_sq() * 1.5;
  const Vector g = mist::gradient_step(inst, mu, Vector(8, 0.0));
  for (std::size_t j = 0; j < 8; ++j)
    CHECK(g[j] == inst.y_bar()[j] / mu);
}

TEST_CASE("gradient step matches the naive formula") {
  const auto a = oracle::random_matrix(6, 10, 82);
  const auto y = oracle::random_vector(6, 83);
  const ProblemInstance inst(a, y);
  const double mu = inst.spec_norm_sq() * 1.2;
  const Vector x = oracle::random_vector(10, 84);
  const Vector g = mist::gradient_step(inst, mu, x);
  const Vector grad = oracle::naive_grad(a, y, x);
  for (std::size_t j = 0; j < 10; ++j)
    CHECK(g[j] == Catch::Approx(x[j] - grad[j] / mu).margin(1e-12));
}

TEST_CASE("prox step keeps strict fixed points") {
  // gradient vanishes and every support entry clears the threshold
  const Vector y{2.0, -3.0, 1.5, 0.0};
  const auto ident = ProblemInstance::with_bound(DenseMatrix::identity(4), y, 1.0);
  const double mu = 1.0 + 1e-6;
  const double lambda = 0.5;  // sqrt(2*lambda/mu) ~ 0.9999 < min |y_i|
  CHECK(mist::prox_step(ident, mu, lambda, y) == y);
}

TEST_CASE("prox step sends small signals to zero") {
  const auto a = oracle::random_matrix(4, 6, 85);
  const auto y = oracle::random_vector(4, 86, 0.01);
  const ProblemInstance inst(a, y);
  const double mu = inst.spec_norm_sq() * 1.01;
  // lambda large enough that every |y_bar[j]/mu| stays under the boundary
  const double lambda = mu;  // boundary sqrt(2) vs tiny gradient step
  const Vector out = mist::prox_step(inst, mu, lambda, Vector(6, 0.0));
  CHECK(out == Vector(6, 0.0));
}

TEST_CASE("prox step minimizes the majorizer over the support grid") {
  const auto a = oracle::random_matrix(4, 6, 87);
  const auto y = oracle::random_vector(4, 88);
  const ProblemInstance inst(a, y);
  const mist::Objective obj(inst, 0.35);
  const double mu = inst.spec_norm_sq() * 1.05;
  const Vector x = oracle::random_vector(6, 89);
  const Vector p = mist::prox_step(inst, mu, obj.lambda, x);
  const Vector g = mist::gradient_step(inst, mu, x);

  const double q_star = mist::q_majorizer(obj, mu, p, x);
  // exhaustive over all 2^6 supports of the per-coordinate candidates
  for (unsigned mask = 0; mask < 64; ++mask) {
    Vector z(6, 0.0);
    for (std::size_t j = 0; j < 6; ++j)
      if (mask & (1u << j)) z[j] = g[j];
    REQUIRE(q_star <= mist::q_majorizer(obj, mu, z, x) + 1e-10);
  }
}

TEST_CASE("prox step never increases the objective") {
  for (std::uint32_t seed = 120; seed < 170; ++seed) {
    const auto a = oracle::random_matrix(5, 9, seed);
    const auto y = oracle::random_vector(5, seed + 1000);
    const ProblemInstance inst(a, y);
    const double mu = inst.spec_norm_sq() * 1.001;
    const double lambda = 0.1 + 0.01 * (seed % 7);
    const Vector x = oracle::random_sparse(9, 4, seed + 2000);
    const double fx = mist::objective_value(inst, lambda, x);
    const double fp =
        mist::objective_value(inst, lambda, mist::prox_step(inst, mu, lambda, x));
    REQUIRE(fp <= fx + 1e-10 * (1.0 + std::abs(fx)));
  }
}

TEST_CASE("prox step beats random candidates in the majorizer") {
  const auto a = oracle::random_matrix(6, 11, 200);
  const auto y = oracle::random_vector(6, 201);
  const ProblemInstance inst(a, y);
  const mist::Objective obj(inst, 0.2);
  const double mu = inst.spec_norm_sq() * 1.01;
  const Vector x = oracle::random_vector(11, 202);
  const Vector p = mist::prox_step(inst, mu, obj.lambda, x);
  const double q_star = mist::q_majorizer(obj, mu, p, x);
  for (std::uint32_t seed = 0; seed < 100; ++seed) {
    const Vector z = oracle::random_sparse(11, 1 + seed % 11, 300 + seed);
    REQUIRE(q_star <= mist::q_majorizer(obj, mu, z, x) + 1e-10);
  }
}

TEST_CASE("thresholded coordinates are exact zeros") {
  const auto a = oracle::random_matrix(5, 60, 203);
  const auto y = oracle::random_vector(5, 204);
  const ProblemInstance inst(a, y);
  const double mu = inst.spec_norm_sq() * 1.01;
  const Vector out = mist::prox_step(inst, mu, 2.0, Vector(60, 0.0));
  const Vector g = mist::gradient_step(inst, mu, Vector(60, 0.0));
  const double boundary = std::sqrt(2.0 * 2.0 / mu);
  for (std::size_t j = 0; j < 60; ++j) {
    if (std::abs(g[j]) < boundary)
      REQUIRE(out[j] == 0.0);
    else if (std::abs(g[j]) > boundary)
      REQUIRE(out[j] == g[j]);
  }
}
