// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dpasr/program_graph.hpp"
#include "dpasr/table.hpp"

namespace dpasr {

// Inputs and one target column.
struct labeled_data
{
  input_table inputs;
  std::vector<double> targets;

  std::size_t rows() const { return targets.size(); }
};

struct train_config
{
  int max_epochs = 100000;
  double initial_lr = 1e-2;
  double lr_decay_factor = 0.1;
  int lr_decay_every = 25000;
  double l1_coefficient = 1e-5;
  int early_stop_patience = 5000;
  std::uint64_t seed = 0;

  // Throws config_error.
  void validate() const;
  // Learning rate used during 1-based `epoch`.
  double lr_at(int epoch) const;
};

enum class stop_reason
{
  max_epochs,
  early_stop
};

std::string_view to_string(stop_reason r);

struct epoch_record
{
  int epoch = 0;
  double train_loss = 0.0;       // loss at the start of the epoch
  double validation_score = 0.0; // relative L2 after the update
  double lr = 0.0;
};

struct train_report
{
  int epochs_run = 0;
  int best_epoch = 0;
  double best_validation_score = 0.0;
  // Entry 0 describes the initial weights.
  std::vector<epoch_record> history;
  stop_reason reason = stop_reason::max_epochs;
};

// Per-node Uniform(-b, b) with b = sqrt(6 / (summands at node + 1)).
weight_store glorot_init(program_graph const &graph, std::uint64_t seed);

// Adam with the usual defaults. Pruned entries are never touched.
class adam
{
public:
  explicit adam(std::size_t n, double beta1 = 0.9, double beta2 = 0.999, double epsilon = 1e-8);

  void step(weight_store &weights, std::span<double const> grad, double lr);
  void reset();
  std::int64_t steps() const { return t_; }

private:
  double beta1_;
  double beta2_;
  double epsilon_;
  std::int64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

using epoch_observer = std::function<void(epoch_record const &)>;

// Full-batch Adam on MSE + L1 with step decay and early stopping on the
// validation relative L2. Returns the best-scoring weights seen, including the
// initial ones. Throws numerical_error with the epoch index on divergence.
std::pair<weight_store, train_report> train(program_graph const &graph, weight_store weights,
                                            labeled_data const &train_data,
                                            labeled_data const &validation_data,
                                            train_config const &config,
                                            epoch_observer const &observer = {});

// epoch,train_loss,val_rel_l2,lr
void write_training_csv(std::ostream &out, train_report const &report);

} // namespace dpasr
