#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "mist/datagen.hpp"
#include "mist/errors.hpp"
#include "mist/io.hpp"
#include "mist/selection.hpp"
#include "mist/solvers.hpp"

namespace mist::serialize {

inline constexpr const char* kSchemaVersion = "1";
inline constexpr const char* kToolVersion = "0.1.0";

using nlohmann::json;

inline json to_json(const SolverRun& run) {
  json j;
  j["schema"] = kSchemaVersion;
  j["solver"] = run.solver;
  j["lambda"] = run.lambda;
  j["mu"] = run.mu;
  j["iterations"] = run.iterations;
  j["termination"] = to_string(run.termination);
  j["final_objective"] =
      run.objective_trace.empty() ? 0.0 : run.objective_trace.back();
  j["objective_trace"] = run.objective_trace;
  j["step_norm_trace"] = run.step_norm_trace;
  j["alpha_trace"] = run.alpha_trace;
  j["wall_times"] = run.wall_times;
  j["products_a"] = run.products_a;
  j["products_at"] = run.products_at;
  j["x_final"] = run.x_final;
  return j;
}

inline SolverRun run_from_json(const json& j) {
  SolverRun run;
  run.solver = j.at("solver").get<std::string>();
  run.lambda = j.at("lambda").get<double>();
  run.mu = j.at("mu").get<double>();
  run.iterations = j.at("iterations").get<std::size_t>();
  run.termination = j.at("termination").get<std::string>() == "rel_tol_met"
                        ? Termination::RelTolMet
                        : Termination::MaxIters;
  run.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  run.step_norm_trace = j.at("step_norm_trace").get<std::vector<double>>();
  run.alpha_trace = j.at("alpha_trace").get<std::vector<double>>();
  run.wall_times = j.at("wall_times").get<std::vector<double>>();
  run.products_a = j.at("products_a").get<std::size_t>();
  run.products_at = j.at("products_at").get<std::size_t>();
  run.x_final = j.at("x_final").get<Vector>();
  return run;
}

/// One row per iteration: k, F, step_norm, alpha, wall_time.
inline void write_run_csv(const SolverRun& run,
                          const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "k,objective,step_norm,alpha,wall_time\n";
  for (std::size_t k = 0; k < run.iterations; ++k)
    out << k << "," << io::detail::fmt17(run.objective_trace[k]) << ","
        << io::detail::fmt17(run.step_norm_trace[k]) << ","
        << io::detail::fmt17(run.alpha_trace[k]) << ","
        << io::detail::fmt17(run.wall_times[k]) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

inline json to_json(const FixedPointReport& rep) {
  json j;
  j["schema"] = kSchemaVersion;
  j["certified"] = rep.certified;
  j["tol"] = rep.tol;
  j["support_size"] = rep.support_set.size();
  j["zero_size"] = rep.zero_set.size();
  // +-infinity (empty-set margins) is not representable in JSON
  j["c1_margin"] = std::isfinite(rep.c1_margin) ? json(rep.c1_margin) : json();
  j["c2_residual"] = rep.c2_residual;
  j["c3_margin"] = std::isfinite(rep.c3_margin) ? json(rep.c3_margin) : json();
  j["support_set"] = rep.support_set;
  return j;
}

inline json to_json(const selection::SelectionResult& sel) {
  json j;
  j["schema"] = kSchemaVersion;
  j["criterion"] = selection::to_string(sel.criterion);
  j["lambda_best"] = sel.lambda_best;
  j["best_index"] = sel.best_index;
  json pts = json::array();
  for (const auto& pt : sel.points) {
    json p;
    p["lambda"] = pt.lambda;
    p["status"] = selection::to_string(pt.status);
    p["criterion_value"] = std::isnan(pt.criterion_value)
                               ? json()
                               : json(pt.criterion_value);
    p["iterations"] = pt.run.iterations;
    p["final_objective"] = pt.run.objective_trace.empty()
                               ? 0.0
                               : pt.run.objective_trace.back();
    p["termination"] = to_string(pt.run.termination);
    p["certified"] = pt.certified;
    p["wall_time"] = pt.wall_time;
    pts.push_back(std::move(p));
  }
  j["points"] = std::move(pts);
  return j;
}

/// One row per grid point: lambda, criterion value, iterations, final F,
/// certified flag, wall time, status.
inline void write_selection_csv(const selection::SelectionResult& sel,
                                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "lambda,criterion,iterations,final_objective,certified,wall_time,"
         "status\n";
  for (const auto& pt : sel.points) {
    out << io::detail::fmt17(pt.lambda) << ",";
    if (std::isnan(pt.criterion_value))
      out << "";
    else
      out << io::detail::fmt17(pt.criterion_value);
    out << "," << pt.run.iterations << ","
        << io::detail::fmt17(pt.run.objective_trace.empty()
                                 ? 0.0
                                 : pt.run.objective_trace.back())
        << "," << (pt.certified ? 1 : 0) << ","
        << io::detail::fmt17(pt.wall_time) << ","
        << selection::to_string(pt.status) << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

inline json to_json(const datagen::ExperimentSpec& spec) {
  json j;
  j["schema"] = kSchemaVersion;
  j["d"] = spec.d;
  j["m"] = spec.m;
  j["n_spikes"] = spec.n_spikes;
  j["sigma"] = spec.sigma;
  j["seed"] = spec.seed;
  j["n_instances"] = spec.n_instances;
  j["prng"] = datagen::kPrngId;
  return j;
}

inline datagen::ExperimentSpec spec_from_json(const json& j) {
  datagen::ExperimentSpec spec;
  spec.d = j.at("d").get<std::size_t>();
  spec.m = j.at("m").get<std::size_t>();
  spec.n_spikes = j.at("n_spikes").get<std::size_t>();
  spec.sigma = j.at("sigma").get<double>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.n_instances = j.at("n_instances").get<std::size_t>();
  spec.validate();
  return spec;
}

inline void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

inline json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw IoError("bad JSON in " + path.string() + ": " + e.what());
  }
}

/// On-disk instance bundle: A.mtx (Matrix Market array), y.csv, optional
/// x_true.csv, instance.json manifest.
struct InstanceBundle {
  DenseMatrix a;
  Vector y;
  std::optional<Vector> x_true;
  json manifest;
};

inline void save_instance(const std::filesystem::path& dir,
                          const DenseMatrix& a, const Vector& y,
                          const std::optional<Vector>& x_true,
                          json manifest) {
  std::filesystem::create_directories(dir);
  io::write_matrix_market(a, dir / "A.mtx");
  io::write_vector_csv(y, dir / "y.csv");
  if (x_true) io::write_vector_csv(*x_true, dir / "x_true.csv");
  manifest["schema"] = kSchemaVersion;
  manifest["files"] = {{"a", "A.mtx"}, {"y", "y.csv"}};
  if (x_true) manifest["files"]["x_true"] = "x_true.csv";
  write_json(manifest, dir / "instance.json");
}

inline InstanceBundle load_instance(const std::filesystem::path& dir) {
  InstanceBundle inst;
  inst.manifest = read_json(dir / "instance.json");
  inst.a = io::read_matrix_market(dir / "A.mtx");
  inst.y = io::read_vector_csv(dir / "y.csv");
  if (std::filesystem::exists(dir / "x_true.csv"))
    inst.x_true = io::read_vector_csv(dir / "x_true.csv");
  if (inst.y.size() != inst.a.rows())
    throw IoError("instance in " + dir.string() +
                  ": y length does not match A rows");
  if (inst.x_true && inst.x_true->size() != inst.a.cols())
    throw IoError("instance in " + dir.string() +
                  ": x_true length does not match A cols");
  return inst;
}

}  // namespace mist::serialize
