// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dpasr {

enum class op_kind
{
  sin,
  exp,
  log,
  pow2,
  pow3,
  add,
  multiply
};

constexpr int arity(op_kind op)
{
  return (op == op_kind::add || op == op_kind::multiply) ? 2 : 1;
}

// Canonical lower-case name ("sin", ..., "add", "multiply").
std::string_view op_name(op_kind op);

// Case-insensitive lookup; also accepts "+" and "*".
std::optional<op_kind> parse_op_name(std::string_view name);

// Operator alphabet of the program grammar
//   a ::= u a | b a a | terminal | c
// with u drawn from `unary`, b from `binary`.
struct grammar_spec
{
  std::vector<op_kind> unary;
  std::vector<op_kind> binary;
  std::vector<std::string> terminals;
  bool include_constant = true;

  friend bool operator==(grammar_spec const &, grammar_spec const &) = default;
};

// Validates and returns the spec. Throws config_error naming the offending
// token on duplicates, arity mismatches or an empty terminal list.
grammar_spec make_grammar(std::vector<op_kind> unary, std::vector<op_kind> binary,
                          std::vector<std::string> terminals, bool include_constant);

// Parses the grammar section of a run config:
//   {"unary": [...], "binary": [...], "terminals": [...], "constant": bool}
grammar_spec parse_grammar(nlohmann::json const &doc);
nlohmann::json to_json(grammar_spec const &spec);

// Number of weighted summands at every internal node.
std::size_t summands_per_node(grammar_spec const &spec);

} // namespace dpasr
