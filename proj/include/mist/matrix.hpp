#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mist {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Storage is a single contiguous
/// buffer so A*x walks rows and A^T*u accumulates row-wise, both with
/// ascending-index sums (the solvers rely on that order being stable).
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("DenseMatrix: dimensions must be >= 1");
  }

  DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
      : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (rows == 0 || cols == 0)
      throw std::invalid_argument("DenseMatrix: dimensions must be >= 1");
    if (data_.size() != rows * cols)
      throw std::invalid_argument("DenseMatrix: entry count " +
                                  std::to_string(data_.size()) + " != " +
                                  std::to_string(rows * cols));
    for (double v : data_)
      if (!std::isfinite(v))
        throw std::invalid_argument("DenseMatrix: non-finite entry");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const double* row(std::size_t i) const { return data_.data() + i * cols_; }
  const Vector& data() const { return data_; }
  Vector& mutable_data() { return data_; }

  /// y = A x   (length rows)
  Vector multiply(const Vector& x) const {
    if (x.size() != cols_)
      throw std::invalid_argument("DenseMatrix::multiply: x has length " +
                                  std::to_string(x.size()) + ", expected " +
                                  std::to_string(cols_));
    Vector out(rows_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* r = row(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < cols_; ++j) acc += r[j] * x[j];
      out[i] = acc;
    }
    return out;
  }

  /// v = A^T u   (length cols); per component the sum runs over rows in
  /// ascending order, matching a column-wise dot product bit for bit.
  Vector multiply_transpose(const Vector& u) const {
    if (u.size() != rows_)
      throw std::invalid_argument("DenseMatrix::multiply_transpose: u has length " +
                                  std::to_string(u.size()) + ", expected " +
                                  std::to_string(rows_));
    Vector out(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      const double* r = row(i);
      const double ui = u[i];
      for (std::size_t j = 0; j < cols_; ++j) out[j] += r[j] * ui;
    }
    return out;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Vector data_;
};

inline double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dot: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double norm_sq(const Vector& a) {
  double acc = 0.0;
  for (double v : a) acc += v * v;
  return acc;
}

inline double norm(const Vector& a) { return std::sqrt(norm_sq(a)); }

inline double norm_inf(const Vector& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// Number of exactly nonzero entries (no epsilon; thresholded iterates
/// carry exact zeros by construction).
inline std::size_t nnz(const Vector& a) {
  std::size_t n = 0;
  for (double v : a)
    if (v != 0.0) ++n;
  return n;
}

inline bool all_finite(const Vector& a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace mist
