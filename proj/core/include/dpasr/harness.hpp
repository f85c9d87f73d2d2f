// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpasr/datasets.hpp"
#include "dpasr/grammar.hpp"
#include "dpasr/optimizer.hpp"
#include "dpasr/pruner.hpp"

namespace dpasr {

// One DPA is fitted per output variable.
struct output_entry
{
  std::string name;
  grammar_spec grammar;
  int depth = 2;
};

struct run_config
{
  benchmark_system system = benchmark_system::diffusion;
  std::vector<output_entry> outputs;
  sampling_options dataset;
  train_config train;
  prune_config prune;
  int precision = 3;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "dpasr_out";
  bool parallel_outputs = false;

  // Canonical document of every setting that affects results (the output
  // directory and the parallelism flag are excluded).
  nlohmann::json canonical() const;
  // 16 hex digits, FNV-1a over canonical().dump().
  std::string hash() const;
};

// Sections: system, seed, output_dir, grammar, depth, outputs, dataset, train,
// prune, report. Unknown keys are rejected. Throws config_error.
run_config parse_run_config(nlohmann::json const &doc);
run_config load_run_config(std::filesystem::path const &path);

// Artifact locations inside the output directory.
struct artifact_paths
{
  std::filesystem::path dir;

  std::filesystem::path dataset() const { return dir / "dataset.csv"; }
  std::filesystem::path evaluation() const { return dir / "evaluation.csv"; }
  std::filesystem::path manifest() const { return dir / "dataset_manifest.json"; }
  std::filesystem::path model(std::string const &output, std::string const &stage) const
  {
    return dir / ("model_" + output + "_" + stage + ".json");
  }
  std::filesystem::path training_curve(std::string const &output) const
  {
    return dir / ("training_" + output + ".csv");
  }
  std::filesystem::path prune_log(std::string const &output) const
  {
    return dir / ("prune_" + output + ".csv");
  }
  std::filesystem::path expressions() const { return dir / "expressions.json"; }
  std::filesystem::path metrics() const { return dir / "metrics.csv"; }
  std::filesystem::path results_table() const { return dir / "results_table.csv"; }
  std::filesystem::path report() const { return dir / "report.md"; }
};

void cmd_dataset(run_config const &config);
void cmd_train(run_config const &config);
void cmd_prune(run_config const &config);
void cmd_extract(run_config const &config);
void cmd_report(run_config const &config);
// dataset, train, prune, extract, report; stops at the first failing stage.
void cmd_pipeline(run_config const &config);

// 2 config error, 3 numerical failure, 4 I/O error, 1 anything else.
int exit_code_for(std::exception_ptr const &error);

// Reads DPASR_LOG (trace, debug, info, warn, error, off).
void configure_logging();

} // namespace dpasr
