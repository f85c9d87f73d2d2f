// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "dpasr/harness.hpp"

int main(int argc, char **argv)
{
  dpasr::configure_logging();

  CLI::App app{"dpasr: symbolic regression with differentiable program architectures"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool parallel = false;

  using command = std::function<void(dpasr::run_config const &)>;
  std::map<std::string, command> const commands{
      {"dataset", dpasr::cmd_dataset}, {"train", dpasr::cmd_train},
      {"prune", dpasr::cmd_prune},     {"extract", dpasr::cmd_extract},
      {"report", dpasr::cmd_report},   {"pipeline", dpasr::cmd_pipeline}};
  std::map<std::string, std::string> const help{
      {"dataset", "sample the benchmark data and evaluation points"},
      {"train", "train one DPA per output variable"},
      {"prune", "prune trained models edge by edge"},
      {"extract", "write simplified symbolic expressions"},
      {"report", "score models on the evaluation set and write the results table"},
      {"pipeline", "run every stage in order"}};

  for (auto const &[name, fn] : commands) {
    auto *sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "run config (JSON)")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--out", out_dir, "override the output directory");
    sub->add_flag("--parallel-outputs", parallel, "train output variables concurrently");
  }

  try {
    app.parse(argc, argv);
  } catch (CLI::ParseError const &e) {
    int const rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    auto cfg = dpasr::load_run_config(config_path);
    if (seed) {
      cfg.seed = *seed;
      cfg.train.seed = *seed;
      cfg.prune.seed = *seed;
    }
    if (out_dir) cfg.output_dir = *out_dir;
    cfg.parallel_outputs = parallel;
    for (auto const *sub : app.get_subcommands()) commands.at(sub->get_name())(cfg);
  } catch (std::exception const &e) {
    spdlog::error("{}", e.what());
    return dpasr::exit_code_for(std::current_exception());
  }
  return 0;
}
