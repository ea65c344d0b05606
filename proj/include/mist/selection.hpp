#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mist/problem.hpp"
#include "mist/solvers.hpp"

namespace mist::selection {

/// EBIC overfitting exponent gamma = 1 - 1/(2 kappa), kappa = log m / log d.
inline double default_gamma(std::size_t d, std::size_t m) {
  if (d < 2 || m < 2)
    throw std::invalid_argument("default_gamma: dimensions must be >= 2");
  const double kappa = std::log(static_cast<double>(m)) /
                       std::log(static_cast<double>(d));
  return 1.0 - 1.0 / (2.0 * kappa);
}

/// EBIC(x_hat) = log(||y - A x_hat||^2 / d)
///             + (log d / d + 2 gamma log m / d) ||x_hat||_0.
/// gamma = 0 recovers classical BIC. An exactly zero residual has no
/// finite criterion value and throws.
inline double ebic(const ProblemInstance& prob, const Vector& x_hat,
                   double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("ebic: gamma must be >= 0");
  if (x_hat.size() != prob.cols())
    throw std::invalid_argument("ebic: x_hat length != cols(A)");
  const Vector u = prob.matrix().multiply(x_hat);
  double rs = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = prob.y()[i] - u[i];
    rs += r * r;
  }
  if (rs == 0.0)
    throw std::domain_error("ebic: zero residual (criterion is -infinity)");
  const double d = static_cast<double>(prob.rows());
  const double m = static_cast<double>(prob.cols());
  const double coeff = std::log(d) / d + 2.0 * gamma * std::log(m) / d;
  return std::log(rs / d) + coeff * static_cast<double>(nnz(x_hat));
}

/// Oracle criterion MSE = ||x_true - x_hat||^2 / ||x_true||^2.
inline double mse(const Vector& x_true, const Vector& x_hat) {
  if (x_true.size() != x_hat.size())
    throw std::invalid_argument("mse: length mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x_true.size(); ++i) {
    const double d = x_true[i] - x_hat[i];
    num += d * d;
    den += x_true[i] * x_true[i];
  }
  if (den == 0.0)
    throw std::invalid_argument("mse: zero true signal");
  return num / den;
}

struct LambdaGrid {
  std::vector<double> values;  // strictly increasing, all > 0
  double scale_anchor = 0.0;   // ||A^T y||_inf for relative grids
};

/// n equally spaced values between lo_frac and hi_frac of ||A^T y||_inf.
inline LambdaGrid lambda_grid_relative(const ProblemInstance& prob,
                                       double lo_frac, double hi_frac,
                                       std::size_t n) {
  if (!(lo_frac > 0.0 && lo_frac < hi_frac))
    throw std::invalid_argument("lambda_grid_relative: need 0 < lo < hi");
  if (n < 2) throw std::invalid_argument("lambda_grid_relative: n must be >= 2");
  const double anchor = norm_inf(prob.y_bar());
  if (anchor == 0.0)
    throw std::invalid_argument("lambda_grid_relative: A^T y is zero");
  LambdaGrid grid;
  grid.scale_anchor = anchor;
  grid.values.resize(n);
  const double span = hi_frac - lo_frac;
  for (std::size_t i = 0; i < n; ++i) {
    const double frac =
        lo_frac + span * (static_cast<double>(i) / static_cast<double>(n - 1));
    grid.values[i] = frac * anchor;
  }
  return grid;
}

enum class Criterion { Ebic, Mse };

inline const char* to_string(Criterion c) {
  return c == Criterion::Ebic ? "ebic" : "mse";
}

enum class PointStatus { Ok, Diverged, Saturated };

inline const char* to_string(PointStatus s) {
  switch (s) {
    case PointStatus::Ok: return "ok";
    case PointStatus::Diverged: return "diverged";
    case PointStatus::Saturated: return "saturated";
  }
  return "?";
}

struct SweepPoint {
  double lambda = 0.0;
  PointStatus status = PointStatus::Ok;
  double criterion_value = std::numeric_limits<double>::quiet_NaN();
  bool certified = false;
  double wall_time = 0.0;  // seconds for the whole run at this lambda
  SolverRun run;
};

struct SelectionResult {
  Criterion criterion = Criterion::Ebic;
  double lambda_best = 0.0;
  std::size_t best_index = 0;
  std::vector<SweepPoint> points;  // ordered by grid index
};

using SolverFn =
    std::function<SolverRun(const ProblemInstance&, const SolverConfig&)>;

struct SweepOptions {
  Criterion criterion = Criterion::Ebic;
  std::optional<Vector> x_true;  // required for Mse
  double gamma = std::numeric_limits<double>::quiet_NaN();  // NaN: default
  std::size_t jobs = 1;
  /// EBIC is meaningless on saturated fits (support >= d can interpolate,
  /// sending the criterion to -infinity); such grid points are excluded
  /// from selection unless this is cleared.
  bool exclude_saturated = true;
  double certify_tol = 1e-6;
};

/// Runs the solver once per grid value (from x0 = 0), evaluates the
/// criterion on each final iterate and selects the minimizer, ties toward
/// smaller lambda. Diverging runs mark their point infeasible instead of
/// failing the sweep. Points execute concurrently when jobs > 1; the
/// result is ordered by grid index and identical regardless of schedule.
inline SelectionResult sweep(const ProblemInstance& prob,
                             const LambdaGrid& grid, const SolverFn& solver,
                             const SolverConfig& cfg_template,
                             const SweepOptions& opts) {
  if (grid.values.empty()) throw std::invalid_argument("sweep: empty grid");
  if (opts.criterion == Criterion::Mse && !opts.x_true)
    throw std::invalid_argument("sweep: MSE criterion requires x_true");
  const double gamma = std::isnan(opts.gamma)
                           ? default_gamma(prob.rows(), prob.cols())
                           : opts.gamma;

  SelectionResult result;
  result.criterion = opts.criterion;
  result.points.resize(grid.values.size());

  auto run_point = [&](std::size_t i) {
    SweepPoint& pt = result.points[i];
    pt.lambda = grid.values[i];
    SolverConfig cfg = cfg_template;
    cfg.lambda = pt.lambda;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      pt.run = solver(prob, cfg);
    } catch (const DivergenceError&) {
      pt.status = PointStatus::Diverged;
      return;
    }
    pt.wall_time = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    pt.certified = certify_fixed_point(prob, cfg.lambda, pt.run.mu,
                                       pt.run.x_final, opts.certify_tol)
                       .certified;
    if (opts.criterion == Criterion::Mse) {
      pt.criterion_value = mse(*opts.x_true, pt.run.x_final);
      return;
    }
    if (opts.exclude_saturated && nnz(pt.run.x_final) >= prob.rows()) {
      pt.status = PointStatus::Saturated;
      return;
    }
    try {
      pt.criterion_value = ebic(prob, pt.run.x_final, gamma);
    } catch (const std::domain_error&) {
      pt.status = PointStatus::Saturated;  // exact interpolation
    }
  };

  const std::size_t jobs = std::max<std::size_t>(opts.jobs, 1);
  if (jobs == 1) {
    for (std::size_t i = 0; i < grid.values.size(); ++i) run_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t n_workers = std::min(jobs, grid.values.size());
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < grid.values.size();
             i = next.fetch_add(1))
          run_point(i);
      });
    for (auto& th : pool) th.join();
  }

  bool found = false;
  for (std::size_t i = 0; i < result.points.size(); ++i) {
    const SweepPoint& pt = result.points[i];
    if (pt.status != PointStatus::Ok) continue;
    if (!found || pt.criterion_value <
                      result.points[result.best_index].criterion_value) {
      result.best_index = i;
      found = true;
    }
  }
  if (!found)
    throw std::runtime_error("sweep: no feasible grid point");
  result.lambda_best = result.points[result.best_index].lambda;
  return result;
}

}  // namespace mist::selection
