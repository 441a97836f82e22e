#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphsplit/engine.hpp"
#include "graphsplit/error.hpp"
#include "graphsplit/factor.hpp"
#include "graphsplit/graph.hpp"
#include "graphsplit/io.hpp"
#include "graphsplit/presets.hpp"
#include "graphsplit/subspace.hpp"

namespace graphsplit {

// ---------------------------------------------------------------------------
// Deterministic randomness

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream `stream` of the generator family rooted at `seed`.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

inline Eigen::MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // Fill order is fixed (row-major) so draws do not depend on storage order.
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

/// n random subspaces of R^d with the given dimensions. With `common`, a random
/// unit vector q is planted in each subspace, so q lies in the intersection.
inline std::vector<LinearSubspace> random_subspaces(std::uint64_t seed, int n, int d, const std::vector<int>& dims,
                                                    bool common) {
  if (static_cast<int>(dims.size()) != n) throw ValidationError("random subspaces: need one dimension per operator");
  std::mt19937_64 rng = make_rng(seed, 1);
  Eigen::VectorXd q = gaussian(rng, d, 1);
  q.normalize();
  std::vector<LinearSubspace> out;
  for (int i = 0; i < n; ++i) {
    const int k = dims[i];
    if (k < 0 || k > d) {
      throw ValidationError("random subspaces: dimension " + std::to_string(k) + " outside [0, " + std::to_string(d) +
                            "]");
    }
    if (common && k == 0) throw ValidationError("random subspaces: a planted vector needs dimensions >= 1");
    Eigen::MatrixXd spanners = gaussian(rng, d, k);
    if (common) spanners.col(0) = q;
    out.push_back(LinearSubspace::span(spanners));
    if (out.back().dim() != k) throw NumericalError("random subspaces: degenerate draw");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration

enum class Algorithm { expanded, reduced };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::expanded ? "expanded" : "reduced"; }

inline Algorithm algorithm_from_string(std::string_view s) {
  if (s == "expanded") return Algorithm::expanded;
  if (s == "reduced") return Algorithm::reduced;
  throw ValidationError("algorithm must be 'expanded' or 'reduced', got '" + std::string(s) + "'");
}

struct RunConfig {
  std::optional<PresetName> preset;
  GraphPair pair;
  OntoDecomposition dec;
  int d = 0;
  std::vector<Resolvent> ops;
  RelaxationSchedule theta = RelaxationSchedule::constant(1.0);
  StopRule stop;
  Blocks w0;
  Blocks v0;
  Algorithm algorithm = Algorithm::reduced;
  std::uint64_t seed = 0;

  int n() const { return pair.g.n(); }
  SplittingProblem problem() const { return SplittingProblem(pair, dec, ops, d); }
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
  std::optional<Algorithm> algorithm;
};

namespace detail {

struct ProblemPart {
  std::optional<PresetName> preset;
  GraphPair pair;
  OntoDecomposition dec;
};

inline ProblemPart parse_problem(const io::json& j) {
  using io::member;
  if (!j.is_object()) throw ValidationError("problem: expected an object");
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) throw ValidationError("problem.preset: expected a string");
    const PresetName name = preset_name_from_string(j["preset"].get<std::string>());
    const int n = io::integer_at(member(j, "n", "problem"), "problem.n");
    Preset p = preset(name, n);
    return {name, std::move(p.pair), std::move(p.dec)};
  }
  const AlgorithmicGraph g = io::graph_from_json(member(j, "graph", "problem"), "problem.graph");
  const AlgorithmicGraph sub =
      j.contains("subgraph") ? io::graph_from_json(j["subgraph"], "problem.subgraph") : g;
  GraphPair pair = validate_pair(g, sub);
  OntoDecomposition dec;
  if (j.contains("factor")) {
    if (!j["factor"].is_string()) throw ValidationError("problem.factor: expected a string");
    dec = factor(pair.sub, factor_method_from_string(j["factor"].get<std::string>()));
  } else {
    dec = default_factor(pair.sub);
  }
  return {std::nullopt, std::move(pair), std::move(dec)};
}

inline Resolvent parse_operator(const io::json& j, int d, const std::string& field) {
  if (!j.is_object()) throw ValidationError(field + ": expected an object");
  if (j.contains("kind")) {
    const std::string kind = j["kind"].is_string() ? j["kind"].get<std::string>() : "";
    if (kind != "scaled_identity") throw ValidationError(field + ".kind: unknown operator kind '" + kind + "'");
    const double c = io::number_at(io::member(j, "scale", field), field + ".scale");
    if (!(c >= 0)) throw ValidationError(field + ".scale: must be nonnegative");
    return Resolvent::callback(
        d, [c](const Eigen::VectorXd& x, double gamma) -> Eigen::VectorXd { return x / (1.0 + gamma * c); },
        "scaled_identity");
  }
  return Resolvent::normal_cone(io::subspace_from_json(j, field, d));
}

inline std::vector<Resolvent> parse_operators(const io::json& j, int n, int d, std::uint64_t seed) {
  if (j.is_object() && j.contains("random")) {
    const io::json& r = j["random"];
    if (!r.is_object()) throw ValidationError("subspaces.random: expected an object");
    const std::uint64_t s =
        r.contains("seed") ? static_cast<std::uint64_t>(io::integer_at(r["seed"], "subspaces.random.seed")) : seed;
    std::vector<int> dims;
    const io::json& dj = io::member(r, "dims", "subspaces.random");
    if (dj.is_number_integer()) {
      dims.assign(n, dj.get<int>());
    } else if (dj.is_array()) {
      for (std::size_t i = 0; i < dj.size(); ++i)
        dims.push_back(io::integer_at(dj[i], "subspaces.random.dims[" + std::to_string(i) + "]"));
    } else {
      throw ValidationError("subspaces.random.dims: expected an integer or an array");
    }
    const bool common = r.value("common_vector", false);
    std::vector<Resolvent> ops;
    for (auto& u : random_subspaces(s, n, d, dims, common)) ops.push_back(Resolvent::normal_cone(std::move(u)));
    return ops;
  }
  if (!j.is_array()) throw ValidationError("subspaces: expected an array or {\"random\": ...}");
  if (static_cast<int>(j.size()) != n) {
    throw ValidationError("subspaces: expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  }
  std::vector<Resolvent> ops;
  for (std::size_t i = 0; i < j.size(); ++i) ops.push_back(parse_operator(j[i], d, "subspaces[" + std::to_string(i) + "]"));
  return ops;
}

/// "zero", "random", {"random": {"seed": s}} or an explicit array of rows.
inline Blocks parse_start(const io::json* j, const std::string& field, int rows, int d, std::uint64_t seed,
                          std::uint64_t stream) {
  if (j == nullptr || (j->is_string() && j->get<std::string>() == "zero")) return Blocks::Zero(rows, d);
  if (j->is_string() && j->get<std::string>() == "random") {
    std::mt19937_64 rng = make_rng(seed, stream);
    return gaussian(rng, rows, d);
  }
  if (j->is_object() && j->contains("random")) {
    const io::json& r = (*j)["random"];
    const std::uint64_t s =
        r.is_object() && r.contains("seed") ? static_cast<std::uint64_t>(io::integer_at(r["seed"], field + ".random.seed")) : seed;
    std::mt19937_64 rng = make_rng(s, stream);
    return gaussian(rng, rows, d);
  }
  if (j->is_array()) return io::matrix_from_json(*j, field, rows, d);
  throw ValidationError(field + ": expected \"zero\", \"random\" or an array of rows");
}

}  // namespace detail

inline RunConfig parse_config(const io::json& j, const ConfigOverrides& ov = {}) {
  using io::member;
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  const std::uint64_t seed =
      ov.seed.value_or(j.contains("seed") ? static_cast<std::uint64_t>(io::integer_at(j["seed"], "seed")) : 0);
  auto prob = detail::parse_problem(member(j, "problem", "config"));
  RunConfig c{prob.preset, std::move(prob.pair), std::move(prob.dec)};
  c.seed = seed;
  const int n = c.n();

  c.d = io::integer_at(member(j, "d", "config"), "d");
  if (c.d < 1) throw ValidationError("d: must be positive");
  c.ops = detail::parse_operators(member(j, "subspaces", "config"), n, c.d, c.seed);

  if (ov.theta) {
    c.theta = RelaxationSchedule::constant(*ov.theta);
  } else if (j.contains("theta")) {
    const io::json& t = j["theta"];
    if (t.is_array()) {
      std::vector<double> vals;
      for (std::size_t i = 0; i < t.size(); ++i) vals.push_back(io::number_at(t[i], "theta[" + std::to_string(i) + "]"));
      c.theta = RelaxationSchedule::list(std::move(vals));
    } else {
      c.theta = RelaxationSchedule::constant(io::number_at(t, "theta"));
    }
  }

  if (j.contains("max_iters")) {
    const int m = io::integer_at(j["max_iters"], "max_iters");
    if (m < 1) throw ValidationError("max_iters: must be positive");
    c.stop.max_iters = static_cast<std::size_t>(m);
  }
  if (ov.max_iters) c.stop.max_iters = *ov.max_iters;
  if (j.contains("tol")) c.stop.tol = io::number_at(j["tol"], "tol");
  if (ov.tol) c.stop.tol = *ov.tol;
  if (!(c.stop.tol >= 0)) throw ValidationError("tol: must be nonnegative");
  if (j.contains("record_stride")) c.stop.record_stride = static_cast<std::size_t>(io::integer_at(j["record_stride"], "record_stride"));

  if (j.contains("algorithm")) {
    if (!j["algorithm"].is_string()) throw ValidationError("algorithm: expected a string");
    c.algorithm = algorithm_from_string(j["algorithm"].get<std::string>());
  }
  if (ov.algorithm) c.algorithm = *ov.algorithm;

  c.w0 = detail::parse_start(j.contains("w0") ? &j["w0"] : nullptr, "w0", n, c.d, c.seed, 2);
  c.v0 = detail::parse_start(j.contains("v0") ? &j["v0"] : nullptr, "v0", n - 1, c.d, c.seed, 3);
  return c;
}

inline io::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  try {
    return io::json::parse(in);
  } catch (const io::json::parse_error& e) {
    throw ValidationError("config '" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace graphsplit
