#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mist/problem.hpp"
#include "mist/thresholding.hpp"

namespace mist {

enum class Termination { RelTolMet, MaxIters };

inline const char* to_string(Termination t) {
  return t == Termination::RelTolMet ? "rel_tol_met" : "max_iters";
}

/// Run controls. Defaults follow the reference experimental setup:
/// eta = 1 - 1e-15, termination |F_k - F_{k-1}|/F_k < 1e-10.
///
/// step_tol is an optional extra termination condition
/// ||x_k - x_{k-1}|| <= step_tol * (1 + ||x_k||); disabled when <= 0.
/// The objective resolves gradients only down to ~sqrt(2 ulp(F) ||A||^2),
/// so runs that must satisfy a fixed-point certificate need this
/// condition (with a tightened rel_tol) to keep iterating past the
/// objective's resolution floor.
struct SolverConfig {
  double lambda = 0.0;
  double mu_slack = -1.0;  // < 0 selects the default 1e-15 * bound
  double eta = 1.0 - 1e-15;
  double rel_tol = 1e-10;
  double step_tol = 0.0;
  std::size_t max_iters = 10000;
  bool record_trace = false;

  void validate() const {
    if (!(lambda > 0.0))
      throw std::invalid_argument("SolverConfig: lambda must be > 0");
    if (!(eta >= 0.0 && eta < 1.0))
      throw std::invalid_argument("SolverConfig: eta must be in [0, 1)");
    if (!(rel_tol >= 0.0))
      throw std::invalid_argument("SolverConfig: rel_tol must be >= 0");
    if (max_iters == 0)
      throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  }

  /// mu strictly above ||A||^2: the stored bound is already inflated by
  /// the power-iteration tolerance; the slack guards the degenerate
  /// exact-bound case.
  double effective_mu(const ProblemInstance& prob) const {
    const double bound = prob.spec_norm_sq();
    const double slack =
        mu_slack >= 0.0 ? mu_slack : 1e-15 * std::max(bound, 1.0);
    return bound + slack;
  }
};

struct SolverRun {
  Vector x_final;
  std::vector<double> objective_trace;  // F(x_k)
  std::vector<double> step_norm_trace;  // ||x_k - x_{k-1}||
  std::vector<double> alpha_trace;      // momentum coefficient at iteration k
  std::vector<double> wall_times;       // seconds spent in iteration k
  std::size_t iterations = 0;
  Termination termination = Termination::MaxIters;
  std::string solver;
  double lambda = 0.0;
  double mu = 0.0;
  std::size_t products_a = 0;   // matrix-vector products with A
  std::size_t products_at = 0;  // matrix-vector products with A^T
  std::vector<Vector> iterate_trace;  // filled only when record_trace
};

/// alpha = 2 eta (gamma^T p) / (gamma^T delta) with gamma = B_mu delta
/// supplied by the caller. Requires delta != 0 (callers bypass the
/// momentum branch otherwise); gamma^T delta = delta^T B_mu delta must be
/// positive, anything else signals mu <= ||A||^2.
inline double momentum_alpha(const Vector& gamma, const Vector& p,
                             const Vector& delta, double eta) {
  const double denom = dot(gamma, delta);
  if (!(denom > 0.0))
    throw std::invalid_argument(
        "momentum_alpha: delta^T B_mu delta <= 0; mu does not exceed ||A||^2");
  return 2.0 * eta * (dot(gamma, p) / denom);
}

/// Iterate pair for the momentum recursion. v_prev caches A^T A x_prev,
/// written by the previous step (empty before the first step; unused at
/// k = 0 where alpha is fixed to zero).
struct IterateState {
  Vector x_curr;
  Vector x_prev;
  Vector v_prev;
  std::size_t k = 0;

  static IterateState start(Vector x0) {
    IterateState st;
    st.x_prev = x0;
    st.x_curr = std::move(x0);
    return st;
  }
};

/// Diagnostics from one step, reported on the iterate the step left.
struct StepInfo {
  double alpha = 0.0;
  double smooth = 0.0;           // f(x_k) via this step's own product
  double gamma_dot_delta = 0.0;  // delta^T B_mu delta; 0 when bypassed
  Vector gamma;                  // B_mu delta_k; empty when bypassed
};

/// One MIST iteration: advances the state from (x_k, x_{k-1}) to
/// (x_{k+1}, x_k) with exactly one product by A and one by A^T.
///
///   g_k = x_k - (v_k - y_bar)/mu,          v_k = A^T A x_k
///   p_k = T_{lambda/mu}(g_k) - x_k
///   gamma_k = mu delta_k - v_k + v_{k-1},  delta_k = x_k - x_{k-1}
///   alpha_k = 2 eta (gamma_k^T p_k)/(gamma_k^T delta_k)   (0 at k = 0)
///   x_{k+1} = T_{lambda/mu}(g_k + (alpha_k/mu) gamma_k)
///
/// with the thresholding tie referenced at w_k = x_k + alpha_k delta_k.
/// alpha is forced to zero when eta = 0 (plain IHT) or delta_k = 0; the
/// step then reduces to the plain prox step on the same code path, so an
/// eta = 0 run is bit-identical to IHT.
inline StepInfo mist_step(const ProblemInstance& prob, const SolverConfig& cfg,
                          IterateState& st) {
  const double mu = cfg.effective_mu(prob);
  const ThresholdLevel level(cfg.lambda / mu);
  const std::size_t m = prob.cols();
  if (st.x_curr.size() != m || st.x_prev.size() != m)
    throw std::invalid_argument("mist_step: iterate length != cols(A)");

  StepInfo info;
  const Vector u = prob.matrix().multiply(st.x_curr);
  Vector v = prob.matrix().multiply_transpose(u);

  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = prob.y()[i] - u[i];
    acc += r * r;
  }
  info.smooth = 0.5 * acc;
  if (!std::isfinite(info.smooth))
    throw DivergenceError("mist_step: objective diverged at iteration " +
                              std::to_string(st.k),
                          st.k);

  Vector g(m);
  for (std::size_t j = 0; j < m; ++j)
    g[j] = st.x_curr[j] - (v[j] - prob.y_bar()[j]) / mu;

  double alpha = 0.0;
  Vector delta;
  if (st.k > 0 && cfg.eta > 0.0) {
    if (st.v_prev.size() != m)
      throw std::invalid_argument(
          "mist_step: state at k > 0 is missing v_prev");
    delta.resize(m);
    bool delta_zero = true;
    for (std::size_t j = 0; j < m; ++j) {
      delta[j] = st.x_curr[j] - st.x_prev[j];
      if (delta[j] != 0.0) delta_zero = false;
    }
    if (!delta_zero) {
      info.gamma.resize(m);
      for (std::size_t j = 0; j < m; ++j)
        info.gamma[j] = mu * delta[j] - v[j] + st.v_prev[j];
      info.gamma_dot_delta = dot(info.gamma, delta);
      // gamma is a difference of nearly equal products once the iterates
      // settle; below the cancellation floor the curvature sign is noise
      // and the step falls back to the plain prox step (alpha = 0).
      const double floor =
          16.0 * std::numeric_limits<double>::epsilon() *
          (mu * norm_sq(delta) +
           (norm(v) + norm(st.v_prev)) * std::sqrt(norm_sq(delta)));
      if (info.gamma_dot_delta > floor) {
        Vector p = hard_threshold(g, st.x_curr, level);
        for (std::size_t j = 0; j < m; ++j) p[j] -= st.x_curr[j];
        alpha = momentum_alpha(info.gamma, p, delta, cfg.eta);
      } else {
        info.gamma.clear();
        info.gamma_dot_delta = 0.0;
      }
    }
  }
  info.alpha = alpha;

  Vector x_next;
  if (alpha == 0.0) {
    x_next = hard_threshold(g, st.x_curr, level);
  } else {
    Vector arg(m), w(m);
    const double scale = alpha / mu;
    for (std::size_t j = 0; j < m; ++j) {
      arg[j] = g[j] + scale * info.gamma[j];
      w[j] = st.x_curr[j] + alpha * delta[j];
    }
    x_next = hard_threshold(arg, w, level);
  }
  if (!all_finite(x_next))
    throw DivergenceError("mist_step: iterate diverged at iteration " +
                              std::to_string(st.k),
                          st.k);

  st.x_prev = std::move(st.x_curr);
  st.x_curr = std::move(x_next);
  st.v_prev = std::move(v);
  ++st.k;
  return info;
}

namespace detail {

inline bool step_tol_met(const SolverConfig& cfg, double step_norm,
                         double x_norm) {
  return cfg.step_tol <= 0.0 || step_norm <= cfg.step_tol * (1.0 + x_norm);
}

inline SolverRun run_momentum_ist(const ProblemInstance& prob,
                                  SolverConfig cfg, const Vector& x0,
                                  std::string name) {
  cfg.validate();
  if (!x0.empty() && x0.size() != prob.cols())
    throw std::invalid_argument(name + ": x0 length != cols(A)");

  SolverRun run;
  run.solver = std::move(name);
  run.lambda = cfg.lambda;
  run.mu = cfg.effective_mu(prob);

  IterateState st =
      IterateState::start(x0.empty() ? Vector(prob.cols(), 0.0) : x0);
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    const std::size_t nnz_k = nnz(st.x_curr);
    double step_sq = 0.0;
    for (std::size_t j = 0; j < st.x_curr.size(); ++j) {
      const double d = st.x_curr[j] - st.x_prev[j];
      step_sq += d * d;
    }
    const double step_norm = std::sqrt(step_sq);
    const double x_norm = norm(st.x_curr);

    const auto t0 = std::chrono::steady_clock::now();
    const StepInfo info = mist_step(prob, cfg, st);
    const auto t1 = std::chrono::steady_clock::now();
    ++run.products_a;
    ++run.products_at;

    const double f_k = info.smooth + cfg.lambda * static_cast<double>(nnz_k);
    run.objective_trace.push_back(f_k);
    run.step_norm_trace.push_back(step_norm);
    run.alpha_trace.push_back(info.alpha);
    run.wall_times.push_back(std::chrono::duration<double>(t1 - t0).count());
    if (cfg.record_trace) run.iterate_trace.push_back(st.x_prev);

    bool converged = f_k == 0.0;
    if (!converged && k >= 1) {
      const double rel = std::abs(f_k - f_prev) / f_k;
      converged = rel < cfg.rel_tol && step_tol_met(cfg, step_norm, x_norm);
    }
    if (converged) {
      run.x_final = st.x_prev;
      run.iterations = k + 1;
      run.termination = Termination::RelTolMet;
      return run;
    }
    f_prev = f_k;
  }
  run.x_final = st.x_prev;
  run.iterations = cfg.max_iters;
  run.termination = Termination::MaxIters;
  return run;
}

inline double smooth_from_product(const Vector& y, const Vector& u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double r = y[i] - u[i];
    acc += r * r;
  }
  return 0.5 * acc;
}

/// FISTA / M-FISTA with the hard-thresholding map. A w_k is maintained as
/// a linear combination of stored exact products, so each iteration costs
/// one product by A^T and one by A.
inline SolverRun run_fista(const ProblemInstance& prob, SolverConfig cfg,
                           const Vector& x0, bool monotone) {
  cfg.validate();
  if (!x0.empty() && x0.size() != prob.cols())
    throw std::invalid_argument("fista: x0 length != cols(A)");

  SolverRun run;
  run.solver = monotone ? "mfista" : "fista";
  run.lambda = cfg.lambda;
  run.mu = cfg.effective_mu(prob);
  const double mu = run.mu;
  const ThresholdLevel level(cfg.lambda / mu);
  const std::size_t m = prob.cols();

  Vector x = x0.empty() ? Vector(m, 0.0) : x0;
  Vector x_prev = x;
  Vector u_x = prob.matrix().multiply(x);
  ++run.products_a;
  Vector w = x;
  Vector u_w = u_x;
  double t = 1.0;
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  bool last_rejected = false;

  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const double f_k = smooth_from_product(prob.y(), u_x) +
                       cfg.lambda * static_cast<double>(nnz(x));
    if (!std::isfinite(f_k))
      throw DivergenceError(run.solver + ": objective diverged at iteration " +
                                std::to_string(k),
                            k);
    double step_sq = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double d = x[j] - x_prev[j];
      step_sq += d * d;
    }
    const double step_norm = std::sqrt(step_sq);

    run.objective_trace.push_back(f_k);
    run.step_norm_trace.push_back(step_norm);
    if (cfg.record_trace) run.iterate_trace.push_back(x);

    bool converged = f_k == 0.0;
    // A rejected monotone step repeats F bit-exactly; progress of the
    // candidate sequence is judged on accepted transitions only.
    if (!converged && k >= 1 && !(monotone && last_rejected)) {
      const double rel = std::abs(f_k - f_prev) / f_k;
      converged = rel < cfg.rel_tol && step_tol_met(cfg, step_norm, norm(x));
    }
    if (converged) {
      const auto t1 = std::chrono::steady_clock::now();
      run.alpha_trace.push_back(0.0);
      run.wall_times.push_back(std::chrono::duration<double>(t1 - t0).count());
      run.x_final = x;
      run.iterations = k + 1;
      run.termination = Termination::RelTolMet;
      return run;
    }
    f_prev = f_k;

    Vector v_w = prob.matrix().multiply_transpose(u_w);
    ++run.products_at;
    Vector g(m);
    for (std::size_t j = 0; j < m; ++j)
      g[j] = w[j] - (v_w[j] - prob.y_bar()[j]) / mu;
    Vector z = hard_threshold(g, w, level);
    if (!all_finite(z))
      throw DivergenceError(run.solver + ": iterate diverged at iteration " +
                                std::to_string(k),
                            k);
    Vector u_z = prob.matrix().multiply(z);
    ++run.products_a;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;

    const std::size_t d = prob.rows();
    if (!monotone) {
      for (std::size_t j = 0; j < m; ++j)
        w[j] = z[j] + beta * (z[j] - x[j]);
      for (std::size_t i = 0; i < d; ++i)
        u_w[i] = u_z[i] + beta * (u_z[i] - u_x[i]);
      x_prev = std::move(x);
      x = std::move(z);
      u_x = std::move(u_z);
    } else {
      const double f_z = smooth_from_product(prob.y(), u_z) +
                         cfg.lambda * static_cast<double>(nnz(z));
      const bool accepted = f_z <= f_k;
      const Vector& x_new = accepted ? z : x;
      const Vector& u_new = accepted ? u_z : u_x;
      const double a = t / t_next;
      Vector w_next(m), u_w_next(d);
      for (std::size_t j = 0; j < m; ++j)
        w_next[j] =
            x_new[j] + a * (z[j] - x_new[j]) + beta * (x_new[j] - x[j]);
      for (std::size_t i = 0; i < d; ++i)
        u_w_next[i] =
            u_new[i] + a * (u_z[i] - u_new[i]) + beta * (u_new[i] - u_x[i]);
      w = std::move(w_next);
      u_w = std::move(u_w_next);
      Vector x_keep = x_new;  // copy before x is overwritten
      Vector u_keep = u_new;
      x_prev = std::move(x);
      x = std::move(x_keep);
      u_x = std::move(u_keep);
      last_rejected = !accepted;
    }
    t = t_next;
    const auto t1 = std::chrono::steady_clock::now();
    run.alpha_trace.push_back(beta);
    run.wall_times.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  run.x_final = x;
  run.iterations = cfg.max_iters;
  run.termination = Termination::MaxIters;
  return run;
}

}  // namespace detail

inline SolverRun mist_solve(const ProblemInstance& prob,
                            const SolverConfig& cfg, const Vector& x0 = {}) {
  return detail::run_momentum_ist(prob, cfg, x0, "mist");
}

/// IHT is MIST with the momentum coefficient pinned to zero.
inline SolverRun iht_solve(const ProblemInstance& prob, const SolverConfig& cfg,
                           const Vector& x0 = {}) {
  SolverConfig c = cfg;
  c.eta = 0.0;
  return detail::run_momentum_ist(prob, c, x0, "iht");
}

inline SolverRun fista_hard_solve(const ProblemInstance& prob,
                                  const SolverConfig& cfg,
                                  const Vector& x0 = {}) {
  return detail::run_fista(prob, cfg, x0, false);
}

inline SolverRun mfista_hard_solve(const ProblemInstance& prob,
                                   const SolverConfig& cfg,
                                   const Vector& x0 = {}) {
  return detail::run_fista(prob, cfg, x0, true);
}

enum class SolverKind { Mist, Iht, Fista, Mfista };

inline const char* to_string(SolverKind k) {
  switch (k) {
    case SolverKind::Mist: return "mist";
    case SolverKind::Iht: return "iht";
    case SolverKind::Fista: return "fista";
    case SolverKind::Mfista: return "mfista";
  }
  return "?";
}

inline SolverKind parse_solver(const std::string& name) {
  if (name == "mist") return SolverKind::Mist;
  if (name == "iht") return SolverKind::Iht;
  if (name == "fista") return SolverKind::Fista;
  if (name == "mfista") return SolverKind::Mfista;
  throw std::invalid_argument("unknown solver '" + name + "'");
}

inline SolverRun solve_with(SolverKind kind, const ProblemInstance& prob,
                            const SolverConfig& cfg, const Vector& x0 = {}) {
  switch (kind) {
    case SolverKind::Mist: return mist_solve(prob, cfg, x0);
    case SolverKind::Iht: return iht_solve(prob, cfg, x0);
    case SolverKind::Fista: return fista_hard_solve(prob, cfg, x0);
    case SolverKind::Mfista: return mfista_hard_solve(prob, cfg, x0);
  }
  throw std::invalid_argument("solve_with: bad solver kind");
}

/// Per-coordinate fixed-point certificate:
///   C1: |grad f(x)[i]| <= sqrt(2 lambda mu)   on the zero set
///   C2: grad f(x)[i] = 0                      on the support
///   C3: |x[i]| >= sqrt(2 lambda / mu)         on the support
struct FixedPointReport {
  std::vector<std::size_t> zero_set;
  std::vector<std::size_t> support_set;
  double c1_margin = std::numeric_limits<double>::infinity();
  double c2_residual = 0.0;
  double c3_margin = std::numeric_limits<double>::infinity();
  double tol = 0.0;
  bool certified = false;
};

inline FixedPointReport certify_fixed_point(const ProblemInstance& prob,
                                            double lambda, double mu,
                                            const Vector& x, double tol) {
  if (!(tol > 0.0))
    throw std::invalid_argument("certify_fixed_point: tol must be > 0");
  if (!(lambda > 0.0 && mu > 0.0))
    throw std::invalid_argument("certify_fixed_point: lambda, mu must be > 0");
  if (x.size() != prob.cols())
    throw std::invalid_argument("certify_fixed_point: x length != cols(A)");

  FixedPointReport rep;
  rep.tol = tol;
  const Vector grad = grad_f(prob, x);
  const double zero_bound = std::sqrt(2.0 * lambda * mu);
  const double support_bound = std::sqrt(2.0 * lambda / mu);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rep.zero_set.push_back(i);
      rep.c1_margin = std::min(rep.c1_margin, zero_bound - std::abs(grad[i]));
    } else {
      rep.support_set.push_back(i);
      rep.c2_residual = std::max(rep.c2_residual, std::abs(grad[i]));
      rep.c3_margin =
          std::min(rep.c3_margin, std::abs(x[i]) - support_bound);
    }
  }
  rep.certified = rep.c1_margin >= -tol && rep.c2_residual <= tol &&
                  rep.c3_margin >= -tol;
  return rep;
}

}  // namespace mist
