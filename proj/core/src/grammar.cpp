// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/grammar.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "dpasr/error.hpp"

namespace dpasr {

std::string_view op_name(op_kind op)
{
  switch (op) {
  case op_kind::sin: return "sin";
  case op_kind::exp: return "exp";
  case op_kind::log: return "log";
  case op_kind::pow2: return "pow2";
  case op_kind::pow3: return "pow3";
  case op_kind::add: return "add";
  case op_kind::multiply: return "multiply";
  }
  return "?";
}

std::optional<op_kind> parse_op_name(std::string_view name)
{
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "+") return op_kind::add;
  if (lower == "*") return op_kind::multiply;
  for (auto op : {op_kind::sin, op_kind::exp, op_kind::log, op_kind::pow2, op_kind::pow3,
                  op_kind::add, op_kind::multiply}) {
    if (lower == op_name(op)) return op;
  }
  return std::nullopt;
}

grammar_spec make_grammar(std::vector<op_kind> unary, std::vector<op_kind> binary,
                          std::vector<std::string> terminals, bool include_constant)
{
  std::set<op_kind> seen;
  for (auto op : unary) {
    if (arity(op) != 1)
      throw config_error("operator '" + std::string(op_name(op)) + "' is binary, listed as unary");
    if (!seen.insert(op).second)
      throw config_error("duplicate operator '" + std::string(op_name(op)) + "'");
  }
  for (auto op : binary) {
    if (arity(op) != 2)
      throw config_error("operator '" + std::string(op_name(op)) + "' is unary, listed as binary");
    if (!seen.insert(op).second)
      throw config_error("duplicate operator '" + std::string(op_name(op)) + "'");
  }
  if (terminals.empty()) throw config_error("grammar needs at least one terminal");
  std::set<std::string> names;
  for (auto const &t : terminals) {
    if (t.empty()) throw config_error("empty terminal name");
    if (!names.insert(t).second) throw config_error("duplicate terminal '" + t + "'");
  }
  return grammar_spec{std::move(unary), std::move(binary), std::move(terminals), include_constant};
}

namespace {

std::vector<op_kind> parse_ops(nlohmann::json const &doc, char const *key)
{
  std::vector<op_kind> ops;
  if (!doc.contains(key)) return ops;
  auto const &list = doc.at(key);
  if (!list.is_array()) throw config_error(std::string("grammar.") + key + " must be a list");
  for (auto const &item : list) {
    if (!item.is_string()) throw config_error(std::string("grammar.") + key + " entries must be strings");
    auto const token = item.get<std::string>();
    auto op = parse_op_name(token);
    if (!op) throw config_error("unknown operator '" + token + "'");
    ops.push_back(*op);
  }
  return ops;
}

} // namespace

grammar_spec parse_grammar(nlohmann::json const &doc)
{
  if (!doc.is_object()) throw config_error("grammar section must be an object");
  auto unary = parse_ops(doc, "unary");
  auto binary = parse_ops(doc, "binary");
  std::vector<std::string> terminals;
  if (!doc.contains("terminals") || !doc.at("terminals").is_array())
    throw config_error("grammar.terminals must be a list");
  for (auto const &item : doc.at("terminals")) {
    if (!item.is_string()) throw config_error("grammar.terminals entries must be strings");
    terminals.push_back(item.get<std::string>());
  }
  bool constant = true;
  if (doc.contains("constant")) {
    if (!doc.at("constant").is_boolean()) throw config_error("grammar.constant must be a boolean");
    constant = doc.at("constant").get<bool>();
  }
  return make_grammar(std::move(unary), std::move(binary), std::move(terminals), constant);
}

nlohmann::json to_json(grammar_spec const &spec)
{
  nlohmann::json doc;
  doc["unary"] = nlohmann::json::array();
  for (auto op : spec.unary) doc["unary"].push_back(std::string(op_name(op)));
  doc["binary"] = nlohmann::json::array();
  for (auto op : spec.binary) doc["binary"].push_back(std::string(op_name(op)));
  doc["terminals"] = spec.terminals;
  doc["constant"] = spec.include_constant;
  return doc;
}

std::size_t summands_per_node(grammar_spec const &spec)
{
  return spec.unary.size() + spec.binary.size() + spec.terminals.size() +
         (spec.include_constant ? 1 : 0);
}

} // namespace dpasr
