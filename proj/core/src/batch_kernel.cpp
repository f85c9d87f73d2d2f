// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "batch_kernel.hpp"

#include <algorithm>

#include "dpasr/operators.hpp"

namespace dpasr::detail {

batch_kernel::batch_kernel(program_graph const &graph, std::size_t chunk)
    : graph_(&graph), chunk_(chunk), active_(graph.nodes().size(), 1),
      values_(graph.nodes().size() * chunk), activation_(graph.nodes().size() * chunk),
      adjoint_(graph.nodes().size() * chunk)
{
}

void batch_kernel::refresh_active(weight_store const &weights)
{
  auto nodes = graph_->nodes();
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    auto parent = nodes[n].parent_summand;
    if (parent < 0) {
      active_[n] = 1;
      continue;
    }
    auto const &s = graph_->summands()[static_cast<std::size_t>(parent)];
    active_[n] = (active_[s.node] && !weights.is_pruned(s.weight)) ? 1 : 0;
  }
}

void batch_kernel::forward(weight_store const &weights, std::span<double const *const> columns,
                           std::size_t row0, std::size_t n, eval_diagnostics *diag)
{
  auto nodes = graph_->nodes();
  // Children have larger indices than their parent, so a reverse sweep is post-order.
  for (std::size_t idx = nodes.size(); idx-- > 0;) {
    if (!active_[idx]) continue;
    double *out = node_values(idx);
    std::fill(out, out + n, 0.0);
    for (auto const &s : graph_->summands_of(idx)) {
      if (weights.is_pruned(s.weight)) continue;
      double const w = weights[s.weight];
      switch (s.kind) {
      case summand_kind::unary: {
        auto const child = static_cast<std::size_t>(s.children[0]);
        double const *in = node_values(child);
        double *act = node_activation(child);
        switch (s.op) {
        case op_kind::sin:
          for (std::size_t r = 0; r < n; ++r) act[r] = std::sin(in[r]);
          break;
        case op_kind::exp:
          for (std::size_t r = 0; r < n; ++r) {
            if (diag && exp_clamped(in[r])) ++diag->exp_clamp_hits;
            act[r] = protected_exp(in[r]);
          }
          break;
        case op_kind::log:
          for (std::size_t r = 0; r < n; ++r) act[r] = protected_log(in[r]);
          break;
        case op_kind::pow2:
          for (std::size_t r = 0; r < n; ++r) act[r] = in[r] * in[r];
          break;
        case op_kind::pow3:
          for (std::size_t r = 0; r < n; ++r) act[r] = in[r] * in[r] * in[r];
          break;
        default: break;
        }
        for (std::size_t r = 0; r < n; ++r) out[r] += w * act[r];
        break;
      }
      case summand_kind::binary: {
        double const *a = node_values(static_cast<std::size_t>(s.children[0]));
        double const *b = node_values(static_cast<std::size_t>(s.children[1]));
        if (s.op == op_kind::add) {
          for (std::size_t r = 0; r < n; ++r) out[r] += w * (a[r] + b[r]);
        } else {
          for (std::size_t r = 0; r < n; ++r) out[r] += w * (a[r] * b[r]);
        }
        break;
      }
      case summand_kind::terminal: {
        double const *x = columns[s.terminal] + row0;
        for (std::size_t r = 0; r < n; ++r) out[r] += w * x[r];
        break;
      }
      case summand_kind::constant:
        for (std::size_t r = 0; r < n; ++r) out[r] += w;
        break;
      }
    }
  }
}

void batch_kernel::backward(weight_store const &weights, std::span<double const *const> columns,
                            std::size_t row0, std::size_t n, std::span<double const> seed,
                            std::span<double> grad)
{
  auto nodes = graph_->nodes();
  std::copy(seed.begin(), seed.begin() + static_cast<std::ptrdiff_t>(n), node_adjoint(0));
  for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
    if (!active_[idx]) continue;
    double const *g = node_adjoint(idx);
    for (auto const &s : graph_->summands_of(idx)) {
      if (weights.is_pruned(s.weight)) continue;
      double const w = weights[s.weight];
      double acc = 0.0;
      switch (s.kind) {
      case summand_kind::unary: {
        auto const child = static_cast<std::size_t>(s.children[0]);
        double const *in = node_values(child);
        double const *act = node_activation(child);
        double *gc = node_adjoint(child);
        for (std::size_t r = 0; r < n; ++r) {
          acc += g[r] * act[r];
          double d = 0.0;
          switch (s.op) {
          case op_kind::exp: d = exp_clamped(in[r]) ? 0.0 : act[r]; break;
          default: d = unary_derivative(s.op, in[r]); break;
          }
          gc[r] = g[r] * w * d;
        }
        break;
      }
      case summand_kind::binary: {
        auto const c0 = static_cast<std::size_t>(s.children[0]);
        auto const c1 = static_cast<std::size_t>(s.children[1]);
        double const *a = node_values(c0);
        double const *b = node_values(c1);
        double *ga = node_adjoint(c0);
        double *gb = node_adjoint(c1);
        if (s.op == op_kind::add) {
          for (std::size_t r = 0; r < n; ++r) {
            acc += g[r] * (a[r] + b[r]);
            ga[r] = g[r] * w;
            gb[r] = g[r] * w;
          }
        } else {
          for (std::size_t r = 0; r < n; ++r) {
            acc += g[r] * (a[r] * b[r]);
            ga[r] = g[r] * w * b[r];
            gb[r] = g[r] * w * a[r];
          }
        }
        break;
      }
      case summand_kind::terminal: {
        double const *x = columns[s.terminal] + row0;
        for (std::size_t r = 0; r < n; ++r) acc += g[r] * x[r];
        break;
      }
      case summand_kind::constant:
        for (std::size_t r = 0; r < n; ++r) acc += g[r];
        break;
      }
      grad[s.weight] += acc;
    }
  }
}

} // namespace dpasr::detail
