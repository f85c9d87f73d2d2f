// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/metrics.hpp"

#include <cmath>

#include "dpasr/error.hpp"

namespace dpasr {

namespace {

void check_lengths(std::span<double const> pred, std::span<double const> truth)
{
  if (pred.size() != truth.size())
    throw config_error("prediction and truth lengths differ (" + std::to_string(pred.size()) +
                       " vs " + std::to_string(truth.size()) + ")");
  if (pred.empty()) throw config_error("metric needs at least one sample");
}

} // namespace

double relative_l2(std::span<double const> pred, std::span<double const> truth)
{
  check_lengths(pred, truth);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    double const d = pred[i] - truth[i];
    num += d * d;
    den += truth[i] * truth[i];
  }
  if (den == 0.0) throw config_error("relative L2 undefined for an all-zero truth vector");
  return std::sqrt(num) / std::sqrt(den);
}

double mae(std::span<double const> pred, std::span<double const> truth)
{
  check_lengths(pred, truth);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
  return sum / static_cast<double>(pred.size());
}

} // namespace dpasr
