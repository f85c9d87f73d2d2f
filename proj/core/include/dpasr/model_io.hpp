// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "dpasr/grammar.hpp"
#include "dpasr/program_graph.hpp"

namespace dpasr {

inline constexpr int schema_version = 1;

// Persisted DPA for one output variable.
struct model_file
{
  std::string output;
  std::string stage; // "unpruned" or "pruned"
  grammar_spec grammar;
  int depth = 0;
  weight_store weights;
  std::string config_hash;
  nlohmann::json summary = nlohmann::json::object();
};

nlohmann::json to_json(model_file const &model);
// Throws config_error when the weight count does not match the architecture.
model_file model_from_json(nlohmann::json const &doc);

// Throws io_error.
void save_model(std::filesystem::path const &path, model_file const &model);
model_file load_model(std::filesystem::path const &path);

} // namespace dpasr
