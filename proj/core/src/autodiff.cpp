// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "batch_kernel.hpp"
#include "dpasr/error.hpp"

namespace dpasr {

loss_evaluator::loss_evaluator(program_graph const &graph, input_table const &inputs,
                               std::span<double const> targets)
    : graph_(&graph), inputs_(&inputs), targets_(targets)
{
  if (inputs.rows() == 0) throw config_error("loss needs at least one sample");
  if (inputs.rows() != targets.size())
    throw config_error("inputs have " + std::to_string(inputs.rows()) + " rows but " +
                       std::to_string(targets.size()) + " targets");
  for (auto c : graph.bind_terminals(inputs.names)) columns_.push_back(inputs.columns[c].data());
  auto const chunk = std::min(inputs.rows(), detail::batch_kernel::default_chunk);
  kernel_ = std::make_unique<detail::batch_kernel>(graph, chunk);
  seed_.resize(chunk);
  result_.grad.resize(graph.weight_count());
}

loss_evaluator::~loss_evaluator() = default;
loss_evaluator::loss_evaluator(loss_evaluator &&) noexcept = default;
loss_evaluator &loss_evaluator::operator=(loss_evaluator &&) noexcept = default;

loss_gradient const &loss_evaluator::evaluate(weight_store const &weights, double l1_coefficient)
{
  if (weights.size() != graph_->weight_count()) throw config_error("weight store size mismatch");
  if (!(l1_coefficient >= 0.0)) throw config_error("l1 coefficient must be non-negative");
  std::fill(result_.grad.begin(), result_.grad.end(), 0.0);
  kernel_->refresh_active(weights);

  auto const rows = inputs_->rows();
  double const scale = 2.0 / static_cast<double>(rows);
  double sse = 0.0;
  for (std::size_t r0 = 0; r0 < rows; r0 += kernel_->chunk_size()) {
    auto const n = std::min(kernel_->chunk_size(), rows - r0);
    kernel_->forward(weights, columns_, r0, n, nullptr);
    auto pred = kernel_->output(n);
    for (std::size_t r = 0; r < n; ++r) {
      double const res = pred[r] - targets_[r0 + r];
      if (!std::isfinite(res))
        throw numerical_error("non-finite prediction at sample " + std::to_string(r0 + r));
      sse += res * res;
      seed_[r] = scale * res;
    }
    kernel_->backward(weights, columns_, r0, n, std::span<double const>(seed_).first(n),
                      result_.grad);
  }
  result_.data_loss = sse / static_cast<double>(rows);

  double l1 = 0.0;
  auto w = weights.values();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (weights.is_pruned(i)) continue;
    l1 += std::abs(w[i]);
    if (l1_coefficient > 0.0 && w[i] != 0.0)
      result_.grad[i] += l1_coefficient * (w[i] > 0.0 ? 1.0 : -1.0);
  }
  result_.loss = result_.data_loss + l1_coefficient * l1;
  if (!std::isfinite(result_.loss)) throw numerical_error("non-finite loss");
  return result_;
}

loss_gradient loss_and_grad(program_graph const &graph, weight_store const &weights,
                            input_table const &inputs, std::span<double const> targets,
                            double l1_coefficient)
{
  loss_evaluator eval(graph, inputs, targets);
  return eval.evaluate(weights, l1_coefficient);
}

} // namespace dpasr
