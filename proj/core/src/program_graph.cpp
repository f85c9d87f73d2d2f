// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/program_graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

#include "batch_kernel.hpp"
#include "dpasr/error.hpp"
#include "dpasr/operators.hpp"

namespace dpasr {

namespace {

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b)
{
  auto const max = std::numeric_limits<std::uint64_t>::max();
  return (a > max - b) ? max : a + b;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b)
{
  auto const max = std::numeric_limits<std::uint64_t>::max();
  if (a != 0 && b > max / a) return max;
  return a * b;
}

} // namespace

std::uint64_t count_parameters(grammar_spec const &spec, int depth)
{
  std::uint64_t const leaf = spec.terminals.size() + (spec.include_constant ? 1 : 0);
  std::uint64_t const per_node = summands_per_node(spec);
  std::uint64_t const fan = spec.unary.size() + 2 * spec.binary.size();
  std::uint64_t p = leaf;
  for (int d = depth - 1; d >= 0; --d) p = sat_add(per_node, sat_mul(fan, p));
  return p;
}

program_graph program_graph::build(grammar_spec spec, int depth, std::uint64_t max_weights)
{
  if (depth < 0) throw config_error("depth must be non-negative, got " + std::to_string(depth));
  auto const count = count_parameters(spec, depth);
  if (count > max_weights) {
    throw config_error("architecture has " + std::to_string(count) +
                       " weights, above the limit of " + std::to_string(max_weights));
  }
  program_graph g;
  g.spec_ = std::move(spec);
  g.depth_ = depth;
  g.summands_.reserve(count);
  g.build_node(0, -1);
  return g;
}

std::size_t program_graph::build_node(int depth, std::int64_t parent)
{
  auto const id = nodes_.size();
  node_record rec;
  rec.depth = depth;
  rec.first_summand = summands_.size();
  rec.weight_begin = summands_.size();
  rec.parent_summand = parent;
  nodes_.push_back(rec);

  auto push = [&](summand s) {
    s.weight = summands_.size();
    s.node = id;
    summands_.push_back(s);
  };
  bool const leaf = depth == depth_;
  if (!leaf) {
    for (auto op : spec_.unary) push({summand_kind::unary, op});
    for (auto op : spec_.binary) push({summand_kind::binary, op});
  }
  for (std::size_t t = 0; t < spec_.terminals.size(); ++t) {
    summand s{summand_kind::terminal};
    s.terminal = t;
    push(s);
  }
  if (spec_.include_constant) push({summand_kind::constant});

  auto const first = nodes_[id].first_summand;
  auto const count = summands_.size() - first;
  nodes_[id].summand_count = count;
  for (std::size_t i = first; i < first + count; ++i) {
    auto const kind = summands_[i].kind;
    int const arity_here = kind == summand_kind::unary ? 1 : (kind == summand_kind::binary ? 2 : 0);
    for (int c = 0; c < arity_here; ++c) {
      auto const child = build_node(depth + 1, static_cast<std::int64_t>(i));
      summands_[i].children[static_cast<std::size_t>(c)] = static_cast<std::int64_t>(child);
    }
  }
  nodes_[id].weight_end = summands_.size();
  return id;
}

std::span<summand const> program_graph::summands_of(std::size_t node) const
{
  auto const &rec = nodes_[node];
  return std::span<summand const>(summands_).subspan(rec.first_summand, rec.summand_count);
}

std::pair<std::size_t, std::size_t> program_graph::subtree_weights(std::size_t summand_index) const
{
  auto const &s = summands_[summand_index];
  if (s.children[0] < 0) return {0, 0};
  auto const first = nodes_[static_cast<std::size_t>(s.children[0])];
  auto const last = nodes_[static_cast<std::size_t>(s.children[s.children[1] < 0 ? 0 : 1])];
  return {first.weight_begin, last.weight_end};
}

std::vector<std::size_t> program_graph::bind_terminals(std::span<std::string const> names) const
{
  std::vector<std::size_t> out;
  out.reserve(spec_.terminals.size());
  for (auto const &t : spec_.terminals) {
    auto it = std::find(names.begin(), names.end(), t);
    if (it == names.end()) throw config_error("no input value for terminal '" + t + "'");
    out.push_back(static_cast<std::size_t>(it - names.begin()));
  }
  return out;
}

weight_store::weight_store(std::vector<double> values, std::vector<std::uint8_t> pruned)
    : values_(std::move(values)), pruned_(std::move(pruned))
{
  if (values_.size() != pruned_.size())
    throw config_error("weight and mask lengths differ");
  apply_mask();
}

void weight_store::set(std::size_t i, double v)
{
  if (!pruned_[i]) values_[i] = v;
}

void weight_store::prune(std::size_t i)
{
  pruned_[i] = 1;
  values_[i] = 0.0;
}

void weight_store::prune_range(std::size_t begin, std::size_t end)
{
  for (auto i = begin; i < end; ++i) prune(i);
}

void weight_store::apply_mask()
{
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (pruned_[i]) values_[i] = 0.0;
}

std::size_t weight_store::unpruned_count() const
{
  return static_cast<std::size_t>(std::count(pruned_.begin(), pruned_.end(), std::uint8_t{0}));
}

bool bitwise_equal(weight_store const &a, weight_store const &b)
{
  return a.values_.size() == b.values_.size() && a.pruned_ == b.pruned_ &&
         (a.values_.empty() ||
          std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(double)) == 0);
}

namespace {

double eval_node(program_graph const &graph, weight_store const &weights, std::size_t node,
                 std::span<double const> x, eval_diagnostics *diag)
{
  double acc = 0.0;
  for (auto const &s : graph.summands_of(node)) {
    if (weights.is_pruned(s.weight)) continue;
    double const w = weights[s.weight];
    switch (s.kind) {
    case summand_kind::unary: {
      double const a = eval_node(graph, weights, static_cast<std::size_t>(s.children[0]), x, diag);
      if (diag && s.op == op_kind::exp && exp_clamped(a)) ++diag->exp_clamp_hits;
      acc += w * apply_unary(s.op, a);
      break;
    }
    case summand_kind::binary: {
      double const a = eval_node(graph, weights, static_cast<std::size_t>(s.children[0]), x, diag);
      double const b = eval_node(graph, weights, static_cast<std::size_t>(s.children[1]), x, diag);
      acc += w * apply_binary(s.op, a, b);
      break;
    }
    case summand_kind::terminal: acc += w * x[s.terminal]; break;
    case summand_kind::constant: acc += w; break;
    }
  }
  return acc;
}

void check_weights(program_graph const &graph, weight_store const &weights)
{
  if (weights.size() != graph.weight_count()) {
    throw config_error("weight store has " + std::to_string(weights.size()) +
                       " entries, graph needs " + std::to_string(graph.weight_count()));
  }
}

} // namespace

double forward(program_graph const &graph, weight_store const &weights,
               std::span<double const> terminal_values, eval_diagnostics *diag)
{
  check_weights(graph, weights);
  if (terminal_values.size() != graph.spec().terminals.size())
    throw config_error("expected " + std::to_string(graph.spec().terminals.size()) +
                       " terminal values, got " + std::to_string(terminal_values.size()));
  for (std::size_t i = 0; i < terminal_values.size(); ++i) {
    if (!std::isfinite(terminal_values[i]))
      throw numerical_error("non-finite value for terminal '" + graph.spec().terminals[i] + "'");
  }
  return eval_node(graph, weights, 0, terminal_values, diag);
}

double forward(program_graph const &graph, weight_store const &weights,
               std::map<std::string, double> const &point, eval_diagnostics *diag)
{
  std::vector<double> x;
  for (auto const &t : graph.spec().terminals) {
    auto it = point.find(t);
    if (it == point.end()) throw config_error("no input value for terminal '" + t + "'");
    x.push_back(it->second);
  }
  return forward(graph, weights, x, diag);
}

batch_evaluator::batch_evaluator(program_graph const &graph, input_table const &inputs)
    : graph_(&graph), rows_(inputs.rows())
{
  for (auto c : graph.bind_terminals(inputs.names)) {
    for (double v : inputs.columns[c])
      if (!std::isfinite(v)) throw numerical_error("non-finite value in column '" + inputs.names[c] + "'");
    columns_.push_back(inputs.columns[c].data());
  }
  out_.resize(rows_);
  if (rows_ > 0)
    kernel_ = std::make_unique<detail::batch_kernel>(
        graph, std::min(rows_, detail::batch_kernel::default_chunk));
}

batch_evaluator::~batch_evaluator() = default;
batch_evaluator::batch_evaluator(batch_evaluator &&) noexcept = default;
batch_evaluator &batch_evaluator::operator=(batch_evaluator &&) noexcept = default;

std::span<double const> batch_evaluator::predict(weight_store const &weights, eval_diagnostics *diag)
{
  check_weights(*graph_, weights);
  if (rows_ == 0) return out_;
  kernel_->refresh_active(weights);
  for (std::size_t r0 = 0; r0 < rows_; r0 += kernel_->chunk_size()) {
    auto const n = std::min(kernel_->chunk_size(), rows_ - r0);
    kernel_->forward(weights, columns_, r0, n, diag);
    auto res = kernel_->output(n);
    std::copy(res.begin(), res.end(), out_.begin() + static_cast<std::ptrdiff_t>(r0));
  }
  return out_;
}

std::vector<double> batch_forward(program_graph const &graph, weight_store const &weights,
                                  input_table const &inputs, eval_diagnostics *diag)
{
  batch_evaluator eval(graph, inputs);
  auto out = eval.predict(weights, diag);
  return {out.begin(), out.end()};
}

} // namespace dpasr
