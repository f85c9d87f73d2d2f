// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dpasr/program_graph.hpp"

namespace dpasr::detail {

// Chunked evaluation of a program graph over table rows. Node values are held
// for one chunk at a time so the backward sweep can reuse them. Subtrees under
// pruned summands are skipped entirely.
class batch_kernel
{
public:
  static constexpr std::size_t default_chunk = 256;

  explicit batch_kernel(program_graph const &graph, std::size_t chunk = default_chunk);

  std::size_t chunk_size() const { return chunk_; }

  // Marks nodes reachable through unpruned summands. Call after the mask changes.
  void refresh_active(weight_store const &weights);

  // Evaluates rows [row0, row0 + n) with n <= chunk_size(); `columns` follows spec terminals.
  void forward(weight_store const &weights, std::span<double const *const> columns,
               std::size_t row0, std::size_t n, eval_diagnostics *diag);

  std::span<double const> output(std::size_t n) const { return {values_.data(), n}; }

  // Accumulates d(sum_r seed[r] * root[r]) / dw into grad for the rows of the last forward().
  void backward(weight_store const &weights, std::span<double const *const> columns,
                std::size_t row0, std::size_t n, std::span<double const> seed,
                std::span<double> grad);

private:
  double *node_values(std::size_t node) { return values_.data() + node * chunk_; }
  double *node_activation(std::size_t node) { return activation_.data() + node * chunk_; }
  double *node_adjoint(std::size_t node) { return adjoint_.data() + node * chunk_; }

  program_graph const *graph_;
  std::size_t chunk_;
  std::vector<std::uint8_t> active_;
  std::vector<double> values_;
  std::vector<double> activation_; // unary-operator output feeding the parent, per child node
  std::vector<double> adjoint_;
};

} // namespace dpasr::detail
