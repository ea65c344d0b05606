#pragma once

// Test-only reference implementations, kept independent of the library's
// computation paths: naive loops with their own traversal orders, Eigen
// for factorizations and explicit matrix algebra, and brute-force
// enumeration where the contract is a minimizer property.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "mist/matrix.hpp"
#include "mist/problem.hpp"

namespace oracle {

using mist::DenseMatrix;
using mist::Vector;

inline Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a(i, j);
  return e;
}

inline Eigen::VectorXd to_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

inline Vector from_eigen(const Eigen::VectorXd& v) {
  return Vector(v.data(), v.data() + v.size());
}

/// Largest singular value squared via full SVD.
inline double svd_norm_sq(const DenseMatrix& a) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const double s = svd.singularValues()(0);
  return s * s;
}

/// Single-expression objective, no shared code with the library.
inline double naive_objective(const DenseMatrix& a, const Vector& y,
                              double lambda, const Vector& x) {
  double rss = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double axi = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) axi += a(i, j) * x[j];
    rss += (y[i] - axi) * (y[i] - axi);
  }
  int k = 0;
  for (double v : x) k += (v != 0.0);
  return 0.5 * rss + lambda * k;
}

/// A^T (A x - y) by column dots.
inline Vector naive_grad(const DenseMatrix& a, const Vector& y,
                         const Vector& x) {
  Vector r(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double axi = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) axi += a(i, j) * x[j];
    r[i] = axi - y[i];
  }
  Vector g(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) acc += a(i, j) * r[i];
    g[j] = acc;
  }
  return g;
}

/// Central finite differences of f(x) = 0.5||y - Ax||^2.
inline Vector fd_grad(const mist::ProblemInstance& prob, const Vector& x,
                      double h = 1e-6) {
  Vector g(x.size());
  Vector xp = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double xj = x[j];
    xp[j] = xj + h;
    const double fp = mist::smooth_value(prob, xp);
    xp[j] = xj - h;
    const double fm = mist::smooth_value(prob, xp);
    xp[j] = xj;
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Two-point scalar minimizer of 0.5 (t - g)^2 + h I(t != 0) over
/// t in {0, g}, ties broken toward the reference support.
inline double two_point_threshold(double g, double ref, double h) {
  const double cost_zero = 0.5 * g * g;
  const double cost_keep = h;
  if (cost_keep < cost_zero) return g;
  if (cost_zero < cost_keep) return 0.0;
  return ref != 0.0 ? g : 0.0;
}

/// Explicit B_mu = mu I - A^T A applied to a vector, via Eigen.
inline Vector b_mu_product(const DenseMatrix& a, double mu, const Vector& v) {
  const Eigen::MatrixXd ae = to_eigen(a);
  const Eigen::MatrixXd b =
      mu * Eigen::MatrixXd::Identity(ae.cols(), ae.cols()) -
      ae.transpose() * ae;
  return from_eigen(b * to_eigen(v));
}

/// Keep-rule for the identity design: minimizing coordinatewise,
/// y[i] survives iff 0.5 y[i]^2 > lambda at the solver's threshold mu.
inline Vector ortho_solution(const Vector& y, double lambda, double mu) {
  Vector x(y.size(), 0.0);
  const double boundary = std::sqrt(2.0 * lambda * mu);  // |y| scale: g = y/mu
  for (std::size_t i = 0; i < y.size(); ++i)
    if (std::abs(y[i]) > boundary) x[i] = y[i];
  return x;
}

/// Deterministic mt19937 helpers for test instance construction (test
/// data only; the library's own generator is exercised separately).
inline DenseMatrix random_matrix(std::size_t d, std::size_t m,
                                 std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  DenseMatrix a(d, m);
  for (double& v : a.mutable_data()) v = n(gen);
  return a;
}

inline Vector random_vector(std::size_t n, std::uint32_t seed,
                            double scale = 1.0) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, scale);
  Vector v(n);
  for (double& x : v) x = dist(gen);
  return v;
}

inline Vector random_sparse(std::size_t n, std::size_t k, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), gen);
  Vector v(n, 0.0);
  for (std::size_t i = 0; i < k && i < n; ++i) v[idx[i]] = dist(gen);
  return v;
}

}  // namespace oracle
