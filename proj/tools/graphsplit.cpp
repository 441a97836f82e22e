#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("graphsplit");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::err);
  const char* env = std::getenv("GRAPH_SPLIT_LOG");
  if (env == nullptr) return;
  const std::string level = env;
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::error("GRAPH_SPLIT_LOG must be error, info or debug; got '{}'", level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  using namespace graphsplit::cli;
  setup_logging();

  CLI::App app{"Splitting iterations on algorithmic graphs: decompositions, runs and limit checks"};
  app.require_subcommand(1);
  Options o;

  auto add_problem = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration");
    sub->add_option("--preset", o.preset, "named algorithm");
    sub->add_option("-n", o.n, "number of operators");
  };
  auto add_run = [&](CLI::App* sub) {
    add_problem(sub);
    sub->add_option("--algorithm", o.algorithm, "expanded (lifted w, v) or reduced (v only)")
        ->check(CLI::IsMember({"expanded", "reduced"}));
    sub->add_option("--theta", o.theta, "constant relaxation parameter");
    sub->add_option("--max-iters", o.max_iters, "iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--out", o.out, "output file");
  };

  auto* decompose = app.add_subcommand("decompose", "onto decomposition, alpha and delta as JSON");
  add_problem(decompose);
  decompose->add_option("--out", o.out, "output file");

  auto* run = app.add_subcommand("run", "iterate and write a trace");
  add_run(run);
  run->add_option("--tol", o.tol, "stopping tolerance");

  auto* predict = app.add_subcommand("predict", "predicted limit points as JSON");
  add_run(predict);

  auto* verify = app.add_subcommand("verify", "compare a run against its predicted limit");
  add_run(verify);
  verify->add_option("--tol", o.tol, "comparison tolerance (default 1e-6)");
  verify->add_flag("--all-presets", o.all_presets, "verify every named algorithm");

  auto* list = app.add_subcommand("list-presets", "print the table of named algorithms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidation;
  }

  if (*decompose) return cmd_decompose(o, std::cout, std::cerr);
  if (*run) return cmd_run(o, std::cout, std::cerr);
  if (*predict) return cmd_predict(o, std::cout, std::cerr);
  if (*verify) return cmd_verify(o, std::cout, std::cerr);
  if (*list) return cmd_list_presets(o, std::cout, std::cerr);
  return kValidation;
}
