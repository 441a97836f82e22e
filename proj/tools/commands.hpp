#pragma once

#include <cstdint>
#include <fstream>
#include <future>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "graphsplit/analysis.hpp"
#include "graphsplit/config.hpp"
#include "graphsplit/io.hpp"
#include "graphsplit/presets.hpp"

namespace graphsplit::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kValidation = 2, kDivergence = 3, kVerification = 4 };

struct Options {
  std::string config;
  std::string preset;
  int n = 0;
  std::optional<std::string> algorithm;
  std::optional<double> theta;
  std::optional<std::size_t> max_iters;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool all_presets = false;
};

using io::json;

/// Canonical order for a preset when -n is not given.
inline int default_order(PresetName p) { return p == PresetName::douglas_rachford ? 2 : 4; }

/// Config used when only --preset is given: random subspaces of R^4.
inline json preset_config(PresetName name, int n, std::uint64_t seed, bool common) {
  return {{"problem", {{"preset", std::string(to_string(name))}, {"n", n}}},
          {"d", 4},
          {"seed", seed},
          {"subspaces", {{"random", {{"dims", 2}, {"common_vector", common}}}}},
          {"w0", "random"},
          {"v0", "random"}};
}

inline json load_config_json(const Options& o) {
  if (!o.config.empty()) return read_json_file(o.config);
  if (o.preset.empty()) throw ValidationError("either --config or --preset is required");
  const PresetName name = preset_name_from_string(o.preset);
  return preset_config(name, o.n > 0 ? o.n : default_order(name), o.seed.value_or(0), false);
}

inline ConfigOverrides overrides(const Options& o) {
  ConfigOverrides ov;
  ov.seed = o.seed;
  ov.theta = o.theta;
  ov.max_iters = o.max_iters;
  ov.tol = o.tol;
  if (o.algorithm) ov.algorithm = algorithm_from_string(*o.algorithm);
  return ov;
}

/// Writes `text` to --out if given, else to `out`.
inline void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text << '\n';
    return;
  }
  std::ofstream f(o.out);
  if (!f) throw ValidationError("cannot write '" + o.out + "'");
  f << text << '\n';
}

/// Runs `body`, mapping library errors onto exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const DivergenceError& e) {
    err << "error: divergence at iteration " << e.iteration() << ": " << e.what() << '\n';
    return kDivergence;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
}

inline int cmd_list_presets(const Options&, std::ostream& out, std::ostream&) {
  out << presets_table();
  return kOk;
}

inline int cmd_decompose(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    GraphPair pair = validate_pair(named_graph(GraphKind::sequential, 2), named_graph(GraphKind::sequential, 2));
    OntoDecomposition dec;
    if (!o.preset.empty() && o.config.empty()) {
      const PresetName name = preset_name_from_string(o.preset);
      Preset p = preset(name, o.n > 0 ? o.n : default_order(name));
      pair = std::move(p.pair);
      dec = std::move(p.dec);
    } else {
      const json j = load_config_json(o);
      auto prob = detail::parse_problem(j.contains("problem") ? j["problem"] : j);
      pair = std::move(prob.pair);
      dec = std::move(prob.dec);
    }
    const DegreeBalance delta = degree_balance(pair.g);
    const AlphaVector a = alpha(dec, delta);
    spdlog::info("decompose: n = {}, method = {}", pair.g.n(), to_string(dec.method));
    const json doc = {{"Z", io::to_json(dec.z)},
                      {"Z_dagger", io::to_json(dec.z_dagger)},
                      {"alpha", io::to_json(a.alpha)},
                      {"delta", io::to_json(delta.delta)},
                      {"method", std::string(to_string(dec.method))}};
    emit(o, out, io::dump(doc));
    return int(kOk);
  });
}

inline Trace run_config(const RunConfig& c) {
  const SplittingProblem p = c.problem();
  return c.algorithm == Algorithm::expanded ? run_alg1(p, c.w0, c.v0, c.theta, c.stop)
                                            : run_alg2(p, c.v0, c.theta, c.stop);
}

inline int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = parse_config(load_config_json(o), overrides(o));
    spdlog::info("run: n = {}, d = {}, algorithm = {}", c.n(), c.d, to_string(c.algorithm));
    const Trace t = run_config(c);
    const TraceRecord& last = t.last();
    spdlog::info("run: {} after {} iterations, residual {}", to_string(t.stop_reason), last.k, last.residual);
    if (!o.out.empty()) {
      std::ofstream f(o.out);
      if (!f) throw ValidationError("cannot write '" + o.out + "'");
      if (o.out.ends_with(".json")) {
        f << io::dump(io::trace_to_json(t)) << '\n';
      } else {
        io::write_trace_csv(f, t, c.n(), c.d);
      }
    }
    json summary = {{"algorithm", std::string(to_string(c.algorithm))},
                    {"converged", t.converged},
                    {"stop_reason", std::string(to_string(t.stop_reason))},
                    {"iterations", last.k},
                    {"residual", last.residual},
                    {"x", io::to_json(last.x)},
                    {"v", io::to_json(last.v)}};
    if (last.w) summary["w"] = io::to_json(*last.w);
    out << io::dump(summary) << '\n';
    return int(kOk);
  });
}

inline void require_prediction(const RunConfig& c) {
  if (!c.theta.admits_prediction()) {
    throw ValidationError("limit prediction needs a constant relaxation parameter in (0, 2)");
  }
}

inline LimitPrediction predict(const SubspaceProblem& sp, const RunConfig& c) {
  return c.algorithm == Algorithm::expanded ? predict_limits_alg1(sp, c.w0, c.v0) : predict_limits_alg2(sp, c.v0);
}

inline int cmd_predict(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig c = parse_config(load_config_json(o), overrides(o));
    require_prediction(c);
    const SubspaceProblem sp(c.problem());
    const LimitPrediction pr = predict(sp, c);
    const json doc = {{"u_bar", io::to_json(pr.u_bar)},
                      {"e_bar", io::to_json(pr.e_bar)},
                      {"v_bar", io::to_json(pr.v_bar)},
                      {"alpha", io::to_json(sp.alpha().alpha)},
                      {"dim_E", sp.e().dim()},
                      {"dim_U", sp.intersection_space().dim()}};
    emit(o, out, io::dump(doc));
    return int(kOk);
  });
}

struct Verification {
  json report;
  bool pass = false;
};

/// Runs the configured algorithm, predicts its limit and compares at `tol`.
inline Verification verify_config(const RunConfig& c, double tol) {
  require_prediction(c);
  const SubspaceProblem sp(c.problem());
  const LimitPrediction pr = predict(sp, c);
  const Trace t = run_config(c);
  const TraceRecord& last = t.last();
  const double v_err = (last.v - pr.v_bar).norm();
  const double x_err = (last.x.rowwise() - pr.u_bar.transpose()).norm();
  const bool pass = v_err <= tol && x_err <= tol;
  json r = {{"algorithm", std::string(to_string(c.algorithm))},
            {"n", c.n()},
            {"d", c.d},
            {"dim_U", sp.intersection_space().dim()},
            {"dim_E", sp.e().dim()},
            {"iterations", last.k},
            {"converged", t.converged},
            {"v_error", v_err},
            {"x_error", x_err},
            {"tol", tol},
            {"pass", pass}};
  if (c.preset) r["preset"] = std::string(to_string(*c.preset));
  return {std::move(r), pass};
}

/// Every preset at its canonical order with random subspaces of R^4,
/// alternating U = {0} and a planted common vector, under both algorithms.
inline Verification verify_all_presets(const Options& o, double tol) {
  const std::uint64_t seed = o.seed.value_or(42);
  std::vector<std::future<std::vector<Verification>>> jobs;
  for (std::size_t i = 0; i < kAllPresets.size(); ++i) {
    jobs.push_back(std::async(std::launch::async, [&o, i, seed, tol] {
      const PresetName name = kAllPresets[i];
      const bool common = i % 2 == 1;
      const json cfg = preset_config(name, default_order(name), splitmix64(seed + i), common);
      std::vector<Verification> out;
      for (Algorithm a : {Algorithm::reduced, Algorithm::expanded}) {
        ConfigOverrides ov = overrides(o);
        ov.seed.reset();
        ov.algorithm = a;
        Verification v = verify_config(parse_config(cfg, ov), tol);
        v.report["common_vector"] = common;
        out.push_back(std::move(v));
      }
      return out;
    }));
  }
  json cases = json::array();
  bool pass = true;
  for (auto& job : jobs) {
    for (auto& v : job.get()) {
      pass = pass && v.pass;
      cases.push_back(std::move(v.report));
    }
  }
  return {{{"seed", seed}, {"tol", tol}, {"cases", cases}, {"pass", pass}}, pass};
}

inline int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const double tol = 1e-6;
    Options run_opts = o;
    run_opts.tol.reset();  // --tol is the comparison tolerance here
    const double cmp_tol = o.tol.value_or(tol);
    Verification v;
    if (o.all_presets) {
      v = verify_all_presets(run_opts, cmp_tol);
    } else {
      v = verify_config(parse_config(load_config_json(run_opts), overrides(run_opts)), cmp_tol);
    }
    spdlog::info("verify: {}", v.pass ? "pass" : "fail");
    emit(o, out, io::dump(v.report));
    if (!v.pass) err << "verification failed at tolerance " << io::format_double(cmp_tol) << '\n';
    return int(v.pass ? kOk : kVerification);
  });
}

}  // namespace graphsplit::cli
