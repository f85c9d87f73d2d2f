// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/table.hpp"

#include <algorithm>

#include "dpasr/error.hpp"

namespace dpasr {

std::span<double const> input_table::column(std::string const &name) const
{
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw config_error("input column '" + name + "' not found");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

input_table input_table::select(std::span<std::size_t const> rows) const
{
  input_table out;
  out.names = names;
  out.columns.resize(columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    out.columns[c].reserve(rows.size());
    for (auto r : rows) out.columns[c].push_back(columns[c][r]);
  }
  return out;
}

} // namespace dpasr
