// mistbench: generate synthetic instances, run the l0 PLS solvers, and
// reproduce the selection/comparison protocol with machine-readable output.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mist/mist.hpp"

namespace fs = std::filesystem;
namespace dg = mist::datagen;
namespace sel = mist::selection;
namespace ser = mist::serialize;
using mist::ProblemInstance;
using mist::SolverConfig;
using mist::SolverKind;
using mist::SolverRun;
using mist::Vector;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMaxIters = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;
constexpr int kExitBadArgs = 5;

struct GridSpec {
  double lo = 1e-4;
  double hi = 0.2;
  std::size_t n = 20;
};

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  char extra;
  if (std::sscanf(text.c_str(), "%lf,%lf,%zu%c", &g.lo, &g.hi, &g.n, &extra) !=
      3)
    throw CLI::ValidationError("--grid", "expected lo,hi,n");
  return g;
}

struct CommonFlags {
  double eta = 1.0 - 1e-15;
  double mu_slack = -1.0;
  double rel_tol = 1e-10;
  double step_tol = 0.0;
  std::size_t max_iters = 10000;
  double spectral_tol = 1e-6;

  void attach(CLI::App* cmd) {
    cmd->add_option("--eta", eta, "momentum scale in [0,1); 0 forces IHT");
    cmd->add_option("--mu-slack", mu_slack,
                    "additive offset above the spectral bound");
    cmd->add_option("--rel-tol", rel_tol, "relative objective tolerance");
    cmd->add_option("--step-tol", step_tol,
                    "extra step-norm stop rule; 0 disables");
    cmd->add_option("--max-iters", max_iters, "iteration cap");
    cmd->add_option("--spectral-tol", spectral_tol,
                    "power-iteration relative tolerance");
  }

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.eta = eta;
    cfg.mu_slack = mu_slack;
    cfg.rel_tol = rel_tol;
    cfg.step_tol = step_tol;
    cfg.max_iters = max_iters;
    return cfg;
  }
};

ProblemInstance build_problem(const ser::InstanceBundle& inst,
                              double spectral_tol) {
  return ProblemInstance(inst.a, inst.y, spectral_tol);
}

double resolve_lambda(const ProblemInstance& prob, std::optional<double> abs,
                      std::optional<double> frac) {
  if (abs && frac)
    throw CLI::ValidationError("--lambda", "give --lambda or --lambda-frac");
  if (abs) return *abs;
  if (frac) return *frac * mist::norm_inf(prob.y_bar());
  throw CLI::ValidationError("--lambda", "one of --lambda/--lambda-frac required");
}

std::vector<fs::path> instance_dirs(const fs::path& root) {
  std::vector<fs::path> dirs;
  if (fs::exists(root / "instance.json")) {
    dirs.push_back(root);
    return dirs;
  }
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / "instance.json"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty())
    throw mist::IoError("no instance.json found under " + root.string());
  return dirs;
}

// ------------------------------------------------------------ generate

int cmd_generate(const dg::ExperimentSpec& spec, const fs::path& out) {
  spec.validate();
  fs::create_directories(out);
  auto manifest = ser::to_json(spec);
  manifest["tool_version"] = ser::kToolVersion;
  nlohmann::json names = nlohmann::json::array();

  for (std::size_t i = 0; i < spec.n_instances; ++i) {
    const std::uint64_t seed_i = dg::instance_seed(spec.seed, i);
    const auto a = dg::gen_design(spec.d, spec.m, seed_i);
    const auto x = dg::gen_spikes(spec.m, spec.n_spikes, seed_i);
    const auto y = dg::gen_observation(a, x, spec.sigma, seed_i);

    char name[32];
    std::snprintf(name, sizeof name, "inst%03zu", i);
    nlohmann::json inst_manifest;
    inst_manifest["d"] = spec.d;
    inst_manifest["m"] = spec.m;
    inst_manifest["n_spikes"] = spec.n_spikes;
    inst_manifest["sigma"] = spec.sigma;
    inst_manifest["base_seed"] = spec.seed;
    inst_manifest["index"] = i;
    inst_manifest["seed"] = seed_i;
    inst_manifest["prng"] = dg::kPrngId;
    if (spec.sigma > 0.0) inst_manifest["snr_db"] = dg::snr(a, x, spec.sigma);
    ser::save_instance(out / name, a, y, x, inst_manifest);
    names.push_back(name);
  }
  manifest["instances"] = names;
  ser::write_json(manifest, out / "manifest.json");
  std::printf("wrote %zu instance(s) under %s\n", spec.n_instances,
              out.string().c_str());
  return kExitOk;
}

// ------------------------------------------------------------ solve

int cmd_solve(const fs::path& instance, SolverKind kind,
              std::optional<double> lambda_abs,
              std::optional<double> lambda_frac, const CommonFlags& flags,
              double certify_tol, const fs::path& out) {
  const auto bundle = ser::load_instance(instance);
  const auto prob = build_problem(bundle, flags.spectral_tol);
  SolverConfig cfg = flags.config();
  cfg.lambda = resolve_lambda(prob, lambda_abs, lambda_frac);

  const auto run = mist::solve_with(kind, prob, cfg);

  fs::create_directories(out);
  ser::write_json(ser::to_json(run), out / "run.json");
  ser::write_run_csv(run, out / "trace.csv");
  const auto report = mist::certify_fixed_point(prob, cfg.lambda, run.mu,
                                                run.x_final, certify_tol);
  ser::write_json(ser::to_json(report), out / "fixed_point.json");

  std::printf("%s: %zu iterations, termination=%s, F=%.12g, certified=%s\n",
              run.solver.c_str(), run.iterations, to_string(run.termination),
              run.objective_trace.back(), report.certified ? "yes" : "no");
  return run.termination == mist::Termination::RelTolMet ? kExitOk
                                                         : kExitMaxIters;
}

// ------------------------------------------------------------ sweep

int cmd_sweep(const fs::path& instance, SolverKind kind, const GridSpec& gs,
              sel::Criterion criterion, const CommonFlags& flags,
              std::size_t jobs, bool keep_saturated, const fs::path& out) {
  const auto bundle = ser::load_instance(instance);
  const auto prob = build_problem(bundle, flags.spectral_tol);
  const auto grid = sel::lambda_grid_relative(prob, gs.lo, gs.hi, gs.n);

  sel::SweepOptions opts;
  opts.criterion = criterion;
  opts.jobs = jobs;
  opts.exclude_saturated = !keep_saturated;
  if (criterion == sel::Criterion::Mse) {
    if (!bundle.x_true)
      throw CLI::ValidationError("--criterion",
                                 "mse needs x_true.csv in the instance");
    opts.x_true = bundle.x_true;
  }
  const auto res = sel::sweep(
      prob, grid,
      [kind](const ProblemInstance& p, const SolverConfig& c) {
        return mist::solve_with(kind, p, c);
      },
      flags.config(), opts);

  fs::create_directories(out);
  ser::write_json(ser::to_json(res), out / "selection.json");
  ser::write_selection_csv(res, out / "selection.csv");
  std::printf("sweep(%s): lambda_best=%.12g over %zu points -> %s\n",
              to_string(kind), res.lambda_best, res.points.size(),
              out.string().c_str());
  return kExitOk;
}

// ------------------------------------------------------------ compare

struct Thresholds {
  std::size_t iters[3] = {0, 0, 0};
  double secs[3] = {0.0, 0.0, 0.0};
  bool reached[3] = {false, false, false};
};

Thresholds threshold_metrics(const SolverRun& run) {
  static const double kLevels[3] = {1e-2, 1e-6, 1e-10};
  Thresholds th;
  const double f_star = run.objective_trace.back();
  const double denom = std::abs(f_star) > 0 ? std::abs(f_star) : 1.0;
  double elapsed = 0.0;
  for (std::size_t k = 0; k < run.iterations; ++k) {
    elapsed += run.wall_times[k];
    const double rel = std::abs(run.objective_trace[k] - f_star) / denom;
    for (int t = 0; t < 3; ++t)
      if (!th.reached[t] && rel < kLevels[t]) {
        th.reached[t] = true;
        th.iters[t] = k;
        th.secs[t] = elapsed;
      }
  }
  return th;
}

int cmd_compare(const fs::path& instances_root,
                const std::vector<std::string>& solver_names,
                sel::Criterion criterion, const GridSpec& gs,
                const CommonFlags& flags, std::size_t jobs,
                bool keep_saturated, const fs::path& out) {
  if (solver_names.size() < 2)
    throw CLI::ValidationError("--solvers", "need at least two solvers");
  std::vector<SolverKind> kinds;
  for (const auto& n : solver_names) kinds.push_back(mist::parse_solver(n));

  const auto dirs = instance_dirs(instances_root);
  std::vector<ser::InstanceBundle> bundles;
  std::vector<ProblemInstance> probs;
  bundles.reserve(dirs.size());
  for (const auto& d : dirs) {
    bundles.push_back(ser::load_instance(d));
    probs.push_back(build_problem(bundles.back(), flags.spectral_tol));
  }

  // Common lambda: the smallest of the per-solver argmin averages.
  double common_lambda = std::numeric_limits<double>::infinity();
  nlohmann::json argmin_report;
  for (const auto kind : kinds) {
    double avg = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      const auto grid = sel::lambda_grid_relative(probs[i], gs.lo, gs.hi, gs.n);
      sel::SweepOptions opts;
      opts.criterion = criterion;
      opts.jobs = jobs;
      opts.exclude_saturated = !keep_saturated;
      if (criterion == sel::Criterion::Mse) {
        if (!bundles[i].x_true)
          throw CLI::ValidationError("--criterion",
                                     "mse needs x_true.csv in the instance");
        opts.x_true = bundles[i].x_true;
      }
      const auto res = sel::sweep(
          probs[i], grid,
          [kind](const ProblemInstance& p, const SolverConfig& c) {
            return mist::solve_with(kind, p, c);
          },
          flags.config(), opts);
      avg += res.lambda_best;
    }
    avg /= static_cast<double>(probs.size());
    argmin_report[to_string(kind)] = avg;
    common_lambda = std::min(common_lambda, avg);
  }

  fs::create_directories(out / "traces");
  std::ofstream summary(out / "summary.csv");
  if (!summary)
    throw mist::IoError("cannot open " + (out / "summary.csv").string());
  summary << "solver,instance,iterations,termination,final_objective,"
             "iters_to_1e2,secs_to_1e2,iters_to_1e6,secs_to_1e6,"
             "iters_to_1e10,secs_to_1e10\n";

  nlohmann::json report;
  report["schema"] = ser::kSchemaVersion;
  report["tool_version"] = ser::kToolVersion;
  report["criterion"] = sel::to_string(criterion);
  report["common_lambda"] = common_lambda;
  report["per_solver_argmin_avg"] = argmin_report;
  nlohmann::json runs_json = nlohmann::json::array();

  for (std::size_t i = 0; i < probs.size(); ++i) {
    for (const auto kind : kinds) {
      SolverConfig cfg = flags.config();
      cfg.lambda = common_lambda;
      nlohmann::json entry;
      entry["solver"] = to_string(kind);
      entry["instance"] = dirs[i].filename().string();
      try {
        const auto run = mist::solve_with(kind, probs[i], cfg);
        const auto th = threshold_metrics(run);
        const std::string trace_name = std::string(to_string(kind)) + "_" +
                                       dirs[i].filename().string() +
                                       "_trace.csv";
        ser::write_run_csv(run, out / "traces" / trace_name);
        summary << to_string(kind) << "," << dirs[i].filename().string()
                << "," << run.iterations << "," << to_string(run.termination)
                << "," << mist::io::detail::fmt17(run.objective_trace.back());
        for (int t = 0; t < 3; ++t)
          summary << "," << th.iters[t] << ","
                  << mist::io::detail::fmt17(th.secs[t]);
        summary << "\n";
        entry["iterations"] = run.iterations;
        entry["termination"] = to_string(run.termination);
        entry["diverged"] = false;
      } catch (const mist::DivergenceError& e) {
        summary << to_string(kind) << "," << dirs[i].filename().string()
                << ",,diverged,,,,,,,\n";
        entry["diverged"] = true;
        entry["error"] = e.what();
      }
      runs_json.push_back(std::move(entry));
    }
  }
  report["runs"] = std::move(runs_json);
  ser::write_json(report, out / "report.json");
  std::printf("compare: common lambda %.12g, results under %s\n",
              common_lambda, out.string().c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l0-penalized least-squares solver benchmarks"};
  app.require_subcommand(1);

  // ---- generate
  auto* gen = app.add_subcommand("generate", "write synthetic instances");
  std::string preset = "paper";
  gen->add_option("--preset", preset, "paper or desk")
      ->check(CLI::IsMember({"paper", "desk"}));
  std::optional<std::size_t> opt_d, opt_m, opt_spikes, opt_instances;
  std::optional<double> opt_sigma;
  std::optional<std::uint64_t> opt_seed;
  gen->add_option("--d", opt_d, "observation count");
  gen->add_option("--m", opt_m, "signal length");
  gen->add_option("--spikes", opt_spikes, "number of +-1 spikes");
  gen->add_option("--sigma", opt_sigma, "noise standard deviation");
  gen->add_option("--seed", opt_seed, "base seed");
  gen->add_option("--instances", opt_instances, "instances to generate");
  fs::path gen_out;
  gen->add_option("--out", gen_out, "output directory")->required();

  // ---- shared solver flags helper
  auto add_solver_option = [](CLI::App* cmd, std::string& name) {
    cmd->add_option("--solver", name, "mist|iht|fista|mfista")
        ->check(CLI::IsMember({"mist", "iht", "fista", "mfista"}));
  };

  // ---- solve
  auto* solve = app.add_subcommand("solve", "run one solver on one instance");
  fs::path solve_instance, solve_out;
  std::string solve_solver = "mist";
  std::optional<double> solve_lambda, solve_lambda_frac;
  double certify_tol = 1e-6;
  CommonFlags solve_flags;
  solve->add_option("--instance", solve_instance, "instance directory")
      ->required();
  add_solver_option(solve, solve_solver);
  solve->add_option("--lambda", solve_lambda, "absolute penalty");
  solve->add_option("--lambda-frac", solve_lambda_frac,
                    "penalty as a fraction of ||A^T y||_inf");
  solve->add_option("--certify-tol", certify_tol, "fixed-point tolerance");
  solve_flags.attach(solve);
  solve->add_option("--out", solve_out, "output directory")->required();

  // ---- sweep
  auto* sweep = app.add_subcommand("sweep", "lambda grid selection");
  fs::path sweep_instance, sweep_out;
  std::string sweep_solver = "mist";
  std::string sweep_grid = "1e-4,0.2,20";
  std::string sweep_criterion = "ebic";
  std::size_t sweep_jobs = 1;
  bool sweep_keep_saturated = false;
  CommonFlags sweep_flags;
  sweep->add_option("--instance", sweep_instance, "instance directory")
      ->required();
  add_solver_option(sweep, sweep_solver);
  sweep->add_option("--grid", sweep_grid, "lo,hi,n fractions of ||A^T y||_inf");
  sweep->add_option("--criterion", sweep_criterion, "ebic|mse")
      ->check(CLI::IsMember({"ebic", "mse"}));
  sweep->add_option("--jobs", sweep_jobs, "parallel grid workers");
  sweep->add_flag("--keep-saturated", sweep_keep_saturated,
                  "keep saturated fits in EBIC selection");
  sweep_flags.attach(sweep);
  sweep->add_option("--out", sweep_out, "output directory")->required();

  // ---- compare
  auto* compare = app.add_subcommand("compare", "race solvers at a common lambda");
  fs::path compare_instances, compare_out;
  std::vector<std::string> compare_solvers = {"mist", "iht", "fista", "mfista"};
  std::string compare_grid = "1e-4,0.2,20";
  std::string compare_criterion = "ebic";
  std::size_t compare_jobs = 1;
  bool compare_keep_saturated = false;
  CommonFlags compare_flags;
  compare->add_option("--instances", compare_instances,
                      "directory of generated instances")
      ->required();
  compare->add_option("--solvers", compare_solvers, "two or more solvers")
      ->delimiter(',');
  compare->add_option("--grid", compare_grid, "lo,hi,n for the selection phase");
  compare->add_option("--criterion", compare_criterion, "ebic|mse")
      ->check(CLI::IsMember({"ebic", "mse"}));
  compare->add_option("--jobs", compare_jobs, "parallel sweep workers");
  compare->add_flag("--keep-saturated", compare_keep_saturated,
                    "keep saturated fits in EBIC selection");
  compare_flags.attach(compare);
  compare->add_option("--out", compare_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return kExitBadArgs;
  }

  try {
    if (gen->parsed()) {
      dg::ExperimentSpec spec = preset == "desk"
                                    ? dg::ExperimentSpec::desk()
                                    : dg::ExperimentSpec::paper();
      if (opt_d) spec.d = *opt_d;
      if (opt_m) spec.m = *opt_m;
      if (opt_spikes) spec.n_spikes = *opt_spikes;
      if (opt_sigma) spec.sigma = *opt_sigma;
      if (opt_seed) spec.seed = *opt_seed;
      if (opt_instances) spec.n_instances = *opt_instances;
      return cmd_generate(spec, gen_out);
    }
    if (solve->parsed())
      return cmd_solve(solve_instance, mist::parse_solver(solve_solver),
                       solve_lambda, solve_lambda_frac, solve_flags,
                       certify_tol, solve_out);
    if (sweep->parsed())
      return cmd_sweep(sweep_instance, mist::parse_solver(sweep_solver),
                       parse_grid(sweep_grid),
                       sweep_criterion == "mse" ? sel::Criterion::Mse
                                                : sel::Criterion::Ebic,
                       sweep_flags, sweep_jobs, sweep_keep_saturated,
                       sweep_out);
    if (compare->parsed())
      return cmd_compare(compare_instances, compare_solvers,
                         compare_criterion == "mse" ? sel::Criterion::Mse
                                                    : sel::Criterion::Ebic,
                         parse_grid(compare_grid), compare_flags, compare_jobs,
                         compare_keep_saturated, compare_out);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const mist::DivergenceError& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const mist::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid arguments: " << e.what() << "\n";
    return kExitBadArgs;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitBadArgs;
}
