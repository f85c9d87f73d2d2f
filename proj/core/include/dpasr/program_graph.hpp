// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpasr/grammar.hpp"
#include "dpasr/table.hpp"

namespace dpasr {

inline constexpr std::uint64_t default_max_weights = 10'000'000;

enum class summand_kind
{
  unary,
  binary,
  terminal,
  constant
};

// One weighted production at a node. Summands are stored in weight order, so
// the position of a summand in program_graph::summands() is its weight index.
struct summand
{
  summand_kind kind = summand_kind::constant;
  op_kind op = op_kind::sin;      // unary/binary only
  std::size_t terminal = 0;       // terminal only: index into spec.terminals
  std::size_t weight = 0;
  std::size_t node = 0;           // owning node
  std::array<std::int64_t, 2> children{-1, -1};
};

struct node_record
{
  int depth = 0;
  std::size_t first_summand = 0;
  std::size_t summand_count = 0;
  // Weight indices of this node and everything below it: [weight_begin, weight_end).
  std::size_t weight_begin = 0;
  std::size_t weight_end = 0;
  std::int64_t parent_summand = -1;
};

// P(D) = n_t + c at the leaves, P(d) = (n_u + n_b + n_t + c) + (n_u + 2 n_b) P(d+1).
// Saturates at UINT64_MAX.
std::uint64_t count_parameters(grammar_spec const &spec, int depth);

// Depth-bounded derivation tree of the grammar with one weight per summand.
// Children are never shared. Weights are laid out depth-first: a node's own
// summands get consecutive indices, then each child subtree follows in
// summand order.
class program_graph
{
public:
  // Throws config_error for negative depth or when the weight count exceeds max_weights.
  static program_graph build(grammar_spec spec, int depth,
                             std::uint64_t max_weights = default_max_weights);

  grammar_spec const &spec() const { return spec_; }
  int depth() const { return depth_; }
  std::size_t weight_count() const { return summands_.size(); }

  // nodes()[0] is the root; parents precede their children.
  std::span<node_record const> nodes() const { return nodes_; }
  std::span<summand const> summands() const { return summands_; }
  std::span<summand const> summands_of(std::size_t node) const;

  // Weight range hanging below an operator summand (empty for leaves).
  std::pair<std::size_t, std::size_t> subtree_weights(std::size_t summand_index) const;

  // Column index in `names` for each terminal; throws config_error if one is missing.
  std::vector<std::size_t> bind_terminals(std::span<std::string const> names) const;

private:
  program_graph() = default;
  std::size_t build_node(int depth, std::int64_t parent);

  grammar_spec spec_;
  int depth_ = 0;
  std::vector<node_record> nodes_;
  std::vector<summand> summands_;
};

// Edge weights plus the pruned mask. Pruned entries are held at exactly 0.
class weight_store
{
public:
  weight_store() = default;
  explicit weight_store(std::size_t n) : values_(n, 0.0), pruned_(n, 0) {}
  weight_store(std::vector<double> values, std::vector<std::uint8_t> pruned);

  std::size_t size() const { return values_.size(); }
  std::span<double const> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::span<std::uint8_t const> pruned_mask() const { return pruned_; }

  double operator[](std::size_t i) const { return values_[i]; }
  bool is_pruned(std::size_t i) const { return pruned_[i] != 0; }

  // No-op on pruned entries.
  void set(std::size_t i, double v);
  void prune(std::size_t i);
  void prune_range(std::size_t begin, std::size_t end);
  // Re-zeroes every pruned entry.
  void apply_mask();

  std::size_t unpruned_count() const;

  // Compares value bit patterns and masks.
  friend bool bitwise_equal(weight_store const &a, weight_store const &b);

private:
  std::vector<double> values_;
  std::vector<std::uint8_t> pruned_;
};

struct eval_diagnostics
{
  std::size_t exp_clamp_hits = 0;
};

// Value of the root for one point. `terminal_values` follows spec().terminals.
// Throws config_error for a wrong arity and numerical_error for non-finite input.
double forward(program_graph const &graph, weight_store const &weights,
               std::span<double const> terminal_values, eval_diagnostics *diag = nullptr);
double forward(program_graph const &graph, weight_store const &weights,
               std::map<std::string, double> const &point, eval_diagnostics *diag = nullptr);

namespace detail {
class batch_kernel;
}

// Reusable batch forward bound to one input table.
class batch_evaluator
{
public:
  batch_evaluator(program_graph const &graph, input_table const &inputs);
  ~batch_evaluator();
  batch_evaluator(batch_evaluator &&) noexcept;
  batch_evaluator &operator=(batch_evaluator &&) noexcept;

  std::span<double const> predict(weight_store const &weights, eval_diagnostics *diag = nullptr);

private:
  program_graph const *graph_;
  std::size_t rows_ = 0;
  std::vector<double const *> columns_;
  std::unique_ptr<detail::batch_kernel> kernel_;
  std::vector<double> out_;
};

// Row-wise forward over a table; element i equals forward() on row i bit for bit.
std::vector<double> batch_forward(program_graph const &graph, weight_store const &weights,
                                  input_table const &inputs, eval_diagnostics *diag = nullptr);

} // namespace dpasr
