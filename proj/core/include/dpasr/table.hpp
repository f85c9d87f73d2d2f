// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace dpasr {

// Column-major table of input coordinates. Every column has rows() entries.
struct input_table
{
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }

  // Throws config_error when the name is missing.
  std::span<double const> column(std::string const &name) const;

  // Rows selected by index, in the given order.
  input_table select(std::span<std::size_t const> rows) const;
};

} // namespace dpasr
