// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace dpasr {

// ||pred - truth||_2 / ||truth||_2. Throws config_error on length mismatch,
// empty input or a zero-norm truth.
double relative_l2(std::span<double const> pred, std::span<double const> truth);

// Mean absolute error.
double mae(std::span<double const> pred, std::span<double const> truth);

// Headline metric per output; APH outputs are scored by MAE, everything else
// by relative L2.
enum class headline_metric
{
  relative_l2,
  mae
};

struct eval_report
{
  std::string output;
  double relative_l2 = 0.0;
  double mae = 0.0;
  std::size_t surviving_params = 0;
  std::size_t unpruned_params = 0;
  std::string expression_text;

  double reduction_fraction() const
  {
    return unpruned_params == 0
               ? 0.0
               : 1.0 - static_cast<double>(surviving_params) / static_cast<double>(unpruned_params);
  }
};

} // namespace dpasr
