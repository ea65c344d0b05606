#include <catch2/catch_amalgamated.hpp>

#include "mist/matrix.hpp"
#include "oracles.hpp"

using mist::DenseMatrix;
using mist::Vector;

TEST_CASE("DenseMatrix validates shape and entries") {
  CHECK_THROWS_AS(DenseMatrix(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(DenseMatrix(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(DenseMatrix(2, 2, Vector{1.0, 2.0, 3.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      DenseMatrix(1, 2, Vector{1.0, std::numeric_limits<double>::infinity()}),
      std::invalid_argument);
  const DenseMatrix a(2, 3, Vector{1, 2, 3, 4, 5, 6});
  CHECK(a(0, 2) == 3.0);
  CHECK(a(1, 0) == 4.0);
}

TEST_CASE("multiply matches naive loops") {
  const auto a = oracle::random_matrix(7, 11, 21);
  const auto x = oracle::random_vector(11, 22);
  const auto u = oracle::random_vector(7, 23);

  const Vector ax = a.multiply(x);
  const Vector atu = a.multiply_transpose(u);
  for (std::size_t i = 0; i < 7; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < 11; ++j) acc += a(i, j) * x[j];
    CHECK(ax[i] == Catch::Approx(acc).epsilon(1e-14));
  }
  for (std::size_t j = 0; j < 11; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < 7; ++i) acc += a(i, j) * u[i];
    // same ascending-row summation order: bit-equal
    CHECK(atu[j] == acc);
  }
  CHECK_THROWS_AS(a.multiply(u), std::invalid_argument);
  CHECK_THROWS_AS(a.multiply_transpose(x), std::invalid_argument);
}

TEST_CASE("vector helpers") {
  const Vector v{3.0, 0.0, -4.0};
  CHECK(mist::norm_sq(v) == 25.0);
  CHECK(mist::norm(v) == 5.0);
  CHECK(mist::norm_inf(v) == 4.0);
  CHECK(mist::nnz(v) == 2);
  CHECK(mist::nnz(Vector{0.0, -0.0}) == 0);  // signed zero is zero
  CHECK(mist::dot(v, v) == 25.0);
  CHECK_THROWS_AS(mist::dot(v, Vector{1.0}), std::invalid_argument);
}
