#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include "mist/matrix.hpp"
#include "mist/spectral.hpp"

namespace mist {

/// Regression instance: design A, observation y, the precomputed
/// y_bar = A^T y, and a certified upper bound on ||A||^2. Immutable after
/// construction; safe for concurrent shared reads.
class ProblemInstance {
 public:
  /// Computes y_bar and a spectral bound (power-iteration estimate
  /// inflated by (1 + rel_tol) so mu > ||A||^2 can be enforced strictly).
  explicit ProblemInstance(DenseMatrix a, Vector y,
                           double spectral_rel_tol = 1e-6)
      : a_(std::move(a)), y_(std::move(y)) {
    check_y();
    y_bar_ = a_.multiply_transpose(y_);
    spec_norm_sq_ =
        spectral_norm_sq(a_, spectral_rel_tol) * (1.0 + spectral_rel_tol);
  }

  /// Uses a caller-supplied upper bound on ||A||^2 (e.g. a known exact
  /// value) instead of estimating one. The bound is trusted as-is.
  static ProblemInstance with_bound(DenseMatrix a, Vector y,
                                    double spec_norm_sq_bound) {
    return ProblemInstance(BoundTag{}, std::move(a), std::move(y),
                           spec_norm_sq_bound);
  }

  const DenseMatrix& matrix() const { return a_; }
  const Vector& y() const { return y_; }
  const Vector& y_bar() const { return y_bar_; }
  double spec_norm_sq() const { return spec_norm_sq_; }
  std::size_t rows() const { return a_.rows(); }
  std::size_t cols() const { return a_.cols(); }

 private:
  struct BoundTag {};

  ProblemInstance(BoundTag, DenseMatrix a, Vector y, double bound)
      : a_(std::move(a)), y_(std::move(y)), spec_norm_sq_(bound) {
    check_y();
    if (!(spec_norm_sq_ >= 0.0))
      throw std::invalid_argument("ProblemInstance: bound must be >= 0");
    y_bar_ = a_.multiply_transpose(y_);
  }

  void check_y() const {
    if (y_.size() != a_.rows())
      throw std::invalid_argument("ProblemInstance: y length != rows(A)");
    if (!all_finite(y_))
      throw std::invalid_argument("ProblemInstance: non-finite observation");
  }

  DenseMatrix a_;
  Vector y_;
  Vector y_bar_;
  double spec_norm_sq_ = 0.0;
};

/// The penalized criterion F(x) = 0.5 ||y - A x||^2 + lambda ||x||_0.
struct Objective {
  const ProblemInstance* problem;
  double lambda;

  Objective(const ProblemInstance& prob, double lam)
      : problem(&prob), lambda(lam) {
    if (!(lam > 0.0)) throw std::invalid_argument("Objective: lambda must be > 0");
  }
};

/// f(x) = 0.5 ||y - A x||^2.
inline double smooth_value(const ProblemInstance& prob, const Vector& x) {
  const Vector u = prob.matrix().multiply(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = prob.y()[i] - u[i];
    acc += r * r;
  }
  return 0.5 * acc;
}

inline double objective_value(const ProblemInstance& prob, double lambda,
                              const Vector& x) {
  return smooth_value(prob, x) + lambda * static_cast<double>(nnz(x));
}

inline double objective_value(const Objective& obj, const Vector& x) {
  return objective_value(*obj.problem, obj.lambda, x);
}

/// grad f(x) = A^T A x - y_bar.
inline Vector grad_f(const ProblemInstance& prob, const Vector& x) {
  Vector v = prob.matrix().multiply_transpose(prob.matrix().multiply(x));
  for (std::size_t j = 0; j < v.size(); ++j) v[j] -= prob.y_bar()[j];
  return v;
}

/// Majorizer Q_mu(z, x) = f(x) + grad f(x)^T (z-x) + mu/2 ||z-x||^2
///                        + lambda ||z||_0, valid for mu >= ||A||^2.
inline double q_majorizer(const Objective& obj, double mu, const Vector& z,
                          const Vector& x) {
  const ProblemInstance& prob = *obj.problem;
  if (z.size() != prob.cols() || x.size() != prob.cols())
    throw std::invalid_argument("q_majorizer: dimension mismatch");
  const Vector g = grad_f(prob, x);
  double linear = 0.0;
  double quad = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double dz = z[j] - x[j];
    linear += g[j] * dz;
    quad += dz * dz;
  }
  return smooth_value(prob, x) + linear + 0.5 * mu * quad +
         obj.lambda * static_cast<double>(nnz(z));
}

}  // namespace mist
