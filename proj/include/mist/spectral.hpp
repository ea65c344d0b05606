#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mist/datagen.hpp"
#include "mist/errors.hpp"
#include "mist/matrix.hpp"

namespace mist {

/// Squared spectral norm ||A||^2 estimated from below by power iteration
/// on A^T A with a seeded Gaussian start. Rayleigh quotients of the power
/// sequence increase monotonically, so the returned value sigma2 obeys
/// sigma2 <= ||A||^2 <= sigma2 * (1 + rel_tol); the stopping rule uses the
/// geometric-tail projection of the per-iteration gain to bound the
/// remaining gap. Throws ConvergenceError (carrying the best estimate)
/// when max_iters is exhausted first.
inline double spectral_norm_sq(const DenseMatrix& a, double rel_tol = 1e-6,
                               std::size_t max_iters = 10000,
                               std::uint64_t seed = 0x5eedULL) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw std::invalid_argument("spectral_norm_sq: rel_tol must be in (0,1)");
  bool zero = true;
  for (double v : a.data())
    if (v != 0.0) {
      zero = false;
      break;
    }
  if (zero) return 0.0;

  datagen::GaussianStream g(seed, datagen::kStreamSpectral);
  Vector b(a.cols());
  for (double& v : b) v = g.next();
  double bn = norm(b);
  for (double& v : b) v /= bn;

  double est = 0.0;
  double prev_gain = -1.0;
  for (std::size_t k = 0; k < max_iters; ++k) {
    Vector u = a.multiply(b);
    const double rayleigh = norm_sq(u);  // b has unit norm
    Vector w = a.multiply_transpose(u);
    const double wn = norm(w);
    if (wn == 0.0) {
      // start vector fell in the null space; re-draw
      for (double& v : b) v = g.next();
      const double nb = norm(b);
      for (double& v : b) v /= nb;
      continue;
    }
    const double gain = rayleigh - est;
    if (k > 0 && gain <= 0.0) return rayleigh > est ? rayleigh : est;
    if (k > 1 && prev_gain > 0.0) {
      const double rate = std::min(gain / prev_gain, 1.0 - 1e-12);
      const double projected_gap = gain * rate / (1.0 - rate);
      if (projected_gap <= 0.25 * rel_tol * rayleigh) return rayleigh;
    }
    est = rayleigh;
    prev_gain = gain;
    for (std::size_t j = 0; j < w.size(); ++j) b[j] = w[j] / wn;
  }
  throw ConvergenceError(
      "spectral_norm_sq: no convergence within " + std::to_string(max_iters) +
          " iterations (best estimate " + std::to_string(est) + ")",
      est);
}

}  // namespace mist
