// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>

#include "dpasr/grammar.hpp"

namespace dpasr {

// log is evaluated as log(|a| + log_epsilon).
inline constexpr double log_epsilon = 1e-12;
// exp arguments are clamped to [-exp_clamp, exp_clamp].
inline constexpr double exp_clamp = 30.0;

inline bool exp_clamped(double a) { return a < -exp_clamp || a > exp_clamp; }

inline double protected_exp(double a) { return std::exp(std::clamp(a, -exp_clamp, exp_clamp)); }

inline double protected_log(double a) { return std::log(std::abs(a) + log_epsilon); }

inline double apply_unary(op_kind op, double a)
{
  switch (op) {
  case op_kind::sin: return std::sin(a);
  case op_kind::exp: return protected_exp(a);
  case op_kind::log: return protected_log(a);
  case op_kind::pow2: return a * a;
  case op_kind::pow3: return a * a * a;
  default: return 0.0;
  }
}

// d/da of apply_unary. The exp derivative vanishes outside the clamp and the
// log derivative uses sign(0) = 0.
inline double unary_derivative(op_kind op, double a)
{
  switch (op) {
  case op_kind::sin: return std::cos(a);
  case op_kind::exp: return exp_clamped(a) ? 0.0 : std::exp(a);
  case op_kind::log: {
    double const s = (a > 0.0) ? 1.0 : ((a < 0.0) ? -1.0 : 0.0);
    return s / (std::abs(a) + log_epsilon);
  }
  case op_kind::pow2: return 2.0 * a;
  case op_kind::pow3: return 3.0 * a * a;
  default: return 0.0;
  }
}

inline double apply_binary(op_kind op, double a, double b)
{
  return op == op_kind::add ? a + b : a * b;
}

} // namespace dpasr
