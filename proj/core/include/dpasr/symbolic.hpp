// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "dpasr/grammar.hpp"
#include "dpasr/program_graph.hpp"

namespace dpasr {

enum class expr_kind
{
  constant,
  variable,
  sin,
  exp,
  log,
  pow2,
  pow3,
  sum,
  product,
  scale
};

// Closed-form expression tree. `value` is the number of a constant or the
// factor of a scale node; `name` is set for variables.
struct sym_expr
{
  expr_kind kind = expr_kind::constant;
  double value = 0.0;
  std::string name;
  std::vector<sym_expr> children;

  static sym_expr constant(double v);
  static sym_expr variable(std::string n);
  static sym_expr unary(op_kind op, sym_expr child);
  static sym_expr sum(std::vector<sym_expr> terms);
  static sym_expr product(std::vector<sym_expr> factors);
  static sym_expr scale(double factor, sym_expr child);

  bool is_constant() const { return kind == expr_kind::constant; }
  bool has_variables() const;
  std::size_t node_count() const;

  friend bool operator==(sym_expr const &, sym_expr const &) = default;
};

// Evaluates with the same protected log/exp as the program graph. Throws
// config_error for an unbound variable.
double evaluate(sym_expr const &expr, std::map<std::string, double> const &point);

// Weighted sum over unpruned, nonzero summands, recursively. Variable-free
// subtrees are folded and zero contributions dropped; an empty graph gives 0.
sym_expr extract(program_graph const &graph, weight_store const &weights);

// Constant folding, flattening of nested sums and products, scale merging and
// identity removal, applied to a fixed point.
sym_expr simplify(sym_expr const &expr);

// Infix text with coefficients shown to `precision` significant digits.
std::string render(sym_expr const &expr, int precision = 3);

// Full-precision S-expression, e.g. "(scale 0.5 (sin (var x)))".
std::string render_prefix(sym_expr const &expr);

// Inverse of render_prefix. Throws config_error on malformed text.
sym_expr parse_prefix(std::string_view text);

} // namespace dpasr
