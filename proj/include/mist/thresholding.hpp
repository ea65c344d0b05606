#pragma once

#include <cmath>
#include <stdexcept>

#include "mist/problem.hpp"

namespace mist {

/// Penalty-over-mu ratio h = lambda/mu with the threshold boundary
/// sqrt(2h) cached.
struct ThresholdLevel {
  double h;
  double boundary;

  explicit ThresholdLevel(double h_) : h(h_), boundary(std::sqrt(2.0 * h_)) {
    if (!(h_ > 0.0))
      throw std::invalid_argument("ThresholdLevel: h must be > 0");
  }
};

/// Hard-thresholding map, componentwise:
///   0        if |g[i]| < sqrt(2h)
///   g[i]     if |g[i]| > sqrt(2h)
///   g[i] or 0 at exact equality, keeping g[i] iff ref[i] != 0.
/// The tie test is exact floating-point equality: the tie set has measure
/// zero and the rule selects among equal minimizers, so a tolerance band
/// would change the operator off the tie set. Outputs are exact zeros or
/// bit-copies of g entries.
inline Vector hard_threshold(const Vector& g, const Vector& ref,
                             const ThresholdLevel& level) {
  if (g.size() != ref.size())
    throw std::invalid_argument("hard_threshold: length mismatch");
  Vector out(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double mag = std::abs(g[i]);
    if (mag > level.boundary) {
      out[i] = g[i];
    } else if (mag == level.boundary && ref[i] != 0.0) {
      out[i] = g[i];
    }
  }
  return out;
}

/// g(x) = x - (1/mu) grad f(x), evaluated as x - (v - y_bar)/mu with
/// v = A^T A x so solver steps and this map share the same arithmetic.
inline Vector gradient_step(const ProblemInstance& prob, double mu,
                            const Vector& x) {
  if (!(mu > 0.0))
    throw std::invalid_argument("gradient_step: mu must be > 0");
  const Vector v = prob.matrix().multiply_transpose(prob.matrix().multiply(x));
  Vector g(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    g[j] = x[j] - (v[j] - prob.y_bar()[j]) / mu;
  return g;
}

/// p_mu(x): hard threshold of the gradient step at level lambda/mu, with
/// x itself as the tie reference. Minimizes Q_mu(., x) and never
/// increases F.
inline Vector prox_step(const ProblemInstance& prob, double mu, double lambda,
                        const Vector& x) {
  if (!(mu > prob.spec_norm_sq()))
    throw std::invalid_argument("prox_step: mu must exceed the spectral bound");
  if (!(lambda > 0.0))
    throw std::invalid_argument("prox_step: lambda must be > 0");
  return hard_threshold(gradient_step(prob, mu, x), x,
                        ThresholdLevel(lambda / mu));
}

}  // namespace mist
