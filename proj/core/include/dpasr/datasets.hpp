// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dpasr/aph_solver.hpp"
#include "dpasr/optimizer.hpp"
#include "dpasr/table.hpp"

namespace dpasr {

enum class benchmark_system
{
  diffusion,
  kovasznay,
  taylor_green,
  diffusion_reaction,
  aph
};

std::string_view to_string(benchmark_system s);
// Throws config_error for an unknown id.
benchmark_system parse_system(std::string_view id);
std::vector<std::string> system_inputs(benchmark_system s);
std::vector<std::string> system_outputs(benchmark_system s);

// u = e^{-t} sin(pi x)
double diffusion_truth(double x, double t);

struct flow_fields
{
  double u = 0.0;
  double v = 0.0;
  double p = 0.0;
};

// lambda = Re/2 - sqrt(Re^2/4 + 4 pi^2)
double kovasznay_lambda(double reynolds);
flow_fields kovasznay_truth(double x, double y, double reynolds);
flow_fields taylor_green_truth(double x, double y, double t, double nu);

// u = e^{-t} (p(x) + q(x)) and the forcing f(x) of u_t = u_xx + e^{-t} f(x).
double diffusion_reaction_truth(double x, double t);
double diffusion_reaction_forcing(double x);

enum class split_kind : std::uint8_t
{
  train,
  validation,
  test
};

std::string_view to_string(split_kind s);

struct dataset
{
  benchmark_system system = benchmark_system::diffusion;
  input_table inputs;
  // One column per output variable, in system_outputs() order.
  std::vector<std::pair<std::string, std::vector<double>>> targets;
  std::vector<split_kind> split;

  std::size_t rows() const { return inputs.rows(); }
  // Throws config_error for an unknown output.
  std::span<double const> target(std::string const &output) const;
  std::vector<std::size_t> rows_in(split_kind s) const;
  labeled_data labeled(std::string const &output, split_kind s) const;
  // All rows, for evaluation sets.
  labeled_data labeled(std::string const &output) const;
};

struct sampling_options
{
  std::size_t grid = 101;               // per axis, grid-based systems
  std::size_t taylor_green_points = 25000;
  std::size_t train_points = 7500;      // out of 10201; scaled to other sizes
  double validation_fraction = 0.1;     // carved out of the training rows
  std::size_t evaluation_points = 10000;
  double reynolds = 20.0;
  double nu = 0.01;
  aph_config aph;

  void validate() const;
};

// Training data for a benchmark system, split into train/validation/test.
// Deterministic given the seed.
dataset sample_dataset(benchmark_system system, sampling_options const &options,
                       std::uint64_t seed);

// Uniform random evaluation points over the system's domain; every row is in
// the test split. APH targets are interpolated from the finite-difference fields.
dataset sample_evaluation_set(benchmark_system system, sampling_options const &options,
                              std::uint64_t seed);

// Header row: inputs, outputs, "split". Lines starting with '#' are comments.
void write_dataset_csv(std::ostream &out, dataset const &data, std::string const &comment = {});
// Throws io_error on malformed content.
dataset read_dataset_csv(std::istream &in, benchmark_system system);

} // namespace dpasr
