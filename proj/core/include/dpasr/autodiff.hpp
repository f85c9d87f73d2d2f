// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dpasr/program_graph.hpp"
#include "dpasr/table.hpp"

namespace dpasr {

struct loss_gradient
{
  double loss = 0.0;      // data_loss + l1 * sum |w| over unpruned weights
  double data_loss = 0.0; // mean squared error
  std::vector<double> grad; // zero at pruned indices
};

namespace detail {
class batch_kernel;
}

// Reusable reverse-mode evaluator bound to one graph and one data set. Scratch
// buffers live across calls, which is what the training loop relies on.
// Rows are reduced in a fixed order, so results are reproducible.
class loss_evaluator
{
public:
  // Throws config_error on row-count mismatch, empty data or missing terminals.
  loss_evaluator(program_graph const &graph, input_table const &inputs,
                 std::span<double const> targets);
  ~loss_evaluator();
  loss_evaluator(loss_evaluator &&) noexcept;
  loss_evaluator &operator=(loss_evaluator &&) noexcept;

  // Throws numerical_error naming the first sample whose prediction is not finite.
  loss_gradient const &evaluate(weight_store const &weights, double l1_coefficient);

private:
  program_graph const *graph_;
  input_table const *inputs_;
  std::span<double const> targets_;
  std::vector<double const *> columns_;
  std::unique_ptr<detail::batch_kernel> kernel_;
  std::vector<double> seed_;
  loss_gradient result_;
};

loss_gradient loss_and_grad(program_graph const &graph, weight_store const &weights,
                            input_table const &inputs, std::span<double const> targets,
                            double l1_coefficient);

} // namespace dpasr
