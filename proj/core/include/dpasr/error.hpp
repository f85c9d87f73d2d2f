// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace dpasr {

// Base for every error the library raises. The CLI maps the concrete type to
// an exit code (config 2, numerical 3, I/O 4).
class error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

class config_error : public error
{
public:
  using error::error;
};

class numerical_error : public error
{
public:
  using error::error;
};

class io_error : public error
{
public:
  using error::error;
};

} // namespace dpasr
