// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/model_io.hpp"

#include <fstream>

#include "dpasr/error.hpp"

namespace dpasr {

nlohmann::json to_json(model_file const &model)
{
  nlohmann::json doc;
  doc["schema_version"] = schema_version;
  doc["config_hash"] = model.config_hash;
  doc["output"] = model.output;
  doc["stage"] = model.stage;
  doc["grammar"] = to_json(model.grammar);
  doc["depth"] = model.depth;
  doc["weight_count"] = model.weights.size();
  doc["weights"] = std::vector<double>(model.weights.values().begin(), model.weights.values().end());
  std::vector<int> mask;
  for (auto m : model.weights.pruned_mask()) mask.push_back(m ? 1 : 0);
  doc["pruned"] = mask;
  doc["summary"] = model.summary;
  return doc;
}

model_file model_from_json(nlohmann::json const &doc)
{
  try {
    if (doc.at("schema_version").get<int>() != schema_version)
      throw config_error("unsupported model schema version");
    model_file m;
    m.config_hash = doc.value("config_hash", "");
    m.output = doc.at("output").get<std::string>();
    m.stage = doc.value("stage", "");
    m.grammar = parse_grammar(doc.at("grammar"));
    m.depth = doc.at("depth").get<int>();
    auto values = doc.at("weights").get<std::vector<double>>();
    auto mask_ints = doc.at("pruned").get<std::vector<int>>();
    std::vector<std::uint8_t> mask(mask_ints.begin(), mask_ints.end());
    auto const expected = count_parameters(m.grammar, m.depth);
    if (values.size() != expected)
      throw config_error("model has " + std::to_string(values.size()) + " weights, architecture needs " +
                         std::to_string(expected));
    m.weights = weight_store(std::move(values), std::move(mask));
    if (doc.contains("summary")) m.summary = doc.at("summary");
    return m;
  } catch (nlohmann::json::exception const &e) {
    throw config_error(std::string("malformed model document: ") + e.what());
  }
}

void save_model(std::filesystem::path const &path, model_file const &model)
{
  std::ofstream out(path);
  if (!out) throw io_error("cannot write model file " + path.string());
  out << to_json(model).dump(2) << '\n';
  if (!out) throw io_error("failed writing model file " + path.string());
}

model_file load_model(std::filesystem::path const &path)
{
  std::ifstream in(path);
  if (!in) throw io_error("cannot open model file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (nlohmann::json::exception const &e) {
    throw io_error("cannot parse model file " + path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

} // namespace dpasr
