// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit and acceptance suites.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dpasr/grammar.hpp"
#include "dpasr/optimizer.hpp"
#include "dpasr/program_graph.hpp"
#include "dpasr/table.hpp"

namespace dpasr::testing {

inline grammar_spec diffusion_grammar()
{
  return make_grammar({op_kind::sin, op_kind::exp}, {op_kind::add, op_kind::multiply}, {"x", "t"},
                      true);
}

inline grammar_spec five_unary_grammar(std::vector<std::string> terminals, bool constant)
{
  return make_grammar({op_kind::sin, op_kind::exp, op_kind::log, op_kind::pow2, op_kind::pow3},
                      {op_kind::add, op_kind::multiply}, std::move(terminals), constant);
}

inline input_table make_table(std::vector<std::string> names, std::vector<std::vector<double>> cols)
{
  input_table t;
  t.names = std::move(names);
  t.columns = std::move(cols);
  return t;
}

// Summand of `node` matching kind and operator (or terminal index).
inline summand const &find_summand(program_graph const &g, std::size_t node, summand_kind kind,
                                   op_kind op = op_kind::sin, std::size_t terminal = 0)
{
  for (auto const &s : g.summands_of(node)) {
    if (s.kind != kind) continue;
    if ((kind == summand_kind::unary || kind == summand_kind::binary) && s.op != op) continue;
    if (kind == summand_kind::terminal && s.terminal != terminal) continue;
    return s;
  }
  throw std::logic_error("summand not found");
}

inline std::size_t child(summand const &s, int which = 0)
{
  return static_cast<std::size_t>(s.children[static_cast<std::size_t>(which)]);
}

// Random grammar over terminals {x, y, t}, at least one terminal.
inline grammar_spec random_grammar(std::mt19937_64 &rng, int max_unary = 5, int max_binary = 2)
{
  std::vector<op_kind> unary_pool{op_kind::sin, op_kind::exp, op_kind::log, op_kind::pow2,
                                  op_kind::pow3};
  std::vector<op_kind> binary_pool{op_kind::add, op_kind::multiply};
  std::shuffle(unary_pool.begin(), unary_pool.end(), rng);
  std::shuffle(binary_pool.begin(), binary_pool.end(), rng);
  auto pick = [&](int hi) { return std::uniform_int_distribution<int>(0, hi)(rng); };
  unary_pool.resize(static_cast<std::size_t>(pick(max_unary)));
  binary_pool.resize(static_cast<std::size_t>(pick(max_binary)));
  std::vector<std::string> terms{"x", "y", "t"};
  terms.resize(static_cast<std::size_t>(1 + pick(2)));
  return make_grammar(unary_pool, binary_pool, terms, pick(1) == 1);
}

inline std::vector<std::vector<double>> random_columns(std::mt19937_64 &rng, std::size_t n_cols,
                                                       std::size_t rows, double lo = -1.0,
                                                       double hi = 1.0)
{
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<std::vector<double>> cols(n_cols, std::vector<double>(rows));
  for (auto &c : cols)
    for (auto &v : c) v = u(rng);
  return cols;
}

inline weight_store random_weights(program_graph const &g, std::mt19937_64 &rng, double scale = 0.5)
{
  std::uniform_real_distribution<double> u(-scale, scale);
  weight_store w(g.weight_count());
  for (std::size_t i = 0; i < w.size(); ++i) w.set(i, u(rng));
  return w;
}

// Appendix toy: depth 2, unary {sin, exp, log}, terminals {x, y}, constant.
// Edges drawn in the walkthrough figure carry its printed weights; the
// remaining edges get magnitudes above every printed value on their level so
// they never lead the traversal.
struct walkthrough_fixture
{
  program_graph graph;
  weight_store weights;
  std::size_t root_exp = 0;
  std::size_t exp_log = 0;
  std::size_t exp_log_const = 0;
};

inline walkthrough_fixture make_walkthrough()
{
  auto spec = make_grammar({op_kind::sin, op_kind::exp, op_kind::log}, {}, {"x", "y"}, true);
  walkthrough_fixture f{program_graph::build(spec, 2), weight_store{}, 0, 0, 0};
  auto const &g = f.graph;
  f.weights = weight_store(g.weight_count());
  for (std::size_t i = 0; i < g.weight_count(); ++i) f.weights.set(i, 4.0 + 0.01 * double(i));

  auto const &r_sin = find_summand(g, 0, summand_kind::unary, op_kind::sin);
  auto const &r_exp = find_summand(g, 0, summand_kind::unary, op_kind::exp);
  auto const &r_log = find_summand(g, 0, summand_kind::unary, op_kind::log);
  f.weights.set(r_sin.weight, -0.34);
  f.weights.set(r_exp.weight, 0.16);
  f.weights.set(r_log.weight, -3.71);

  auto const e = child(r_exp);
  f.weights.set(find_summand(g, e, summand_kind::unary, op_kind::sin).weight, -1.37);
  f.weights.set(find_summand(g, e, summand_kind::unary, op_kind::exp).weight, 1.24);
  auto const &e_log = find_summand(g, e, summand_kind::unary, op_kind::log);
  f.weights.set(e_log.weight, -0.05);

  auto const l = child(e_log);
  f.weights.set(find_summand(g, l, summand_kind::terminal, op_kind::sin, 0).weight, 1.19);
  f.weights.set(find_summand(g, l, summand_kind::terminal, op_kind::sin, 1).weight, 2.32);
  auto const &l_const = find_summand(g, l, summand_kind::constant);
  f.weights.set(l_const.weight, 0.35);

  f.root_exp = r_exp.weight;
  f.exp_log = e_log.weight;
  f.exp_log_const = l_const.weight;
  return f;
}

} // namespace dpasr::testing
