// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dpasr/optimizer.hpp"
#include "dpasr/program_graph.hpp"

namespace dpasr {

struct prune_config
{
  int finetune_epochs = 500;
  double finetune_lr = 1e-3;
  // Additive slack on the "no worse" acceptance test.
  double score_tolerance = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct prune_attempt
{
  std::size_t weight_index = 0;
  bool accepted = false;
  double score = 0.0;   // best validation score after fine-tuning; NaN if it diverged
  bool diverged = false;
};

struct prune_result
{
  weight_store weights;
  double initial_score = 0.0;
  double final_score = 0.0;
  std::vector<prune_attempt> attempts;
  std::size_t surviving_count = 0;
};

// Relative L2 of the graph's predictions on `data`.
double score(program_graph const &graph, weight_store const &weights, labeled_data const &data);

using attempt_observer = std::function<void(prune_attempt const &)>;

// Depth-first magnitude pruning. At every node the unpruned summands are
// visited in ascending |weight| (ties by index). Operator summands first
// recurse into their children, then their own edge is tried; terminal and
// constant summands are tried directly. A trial zeroes and masks the edge and
// everything below it, fine-tunes the remaining weights on `train_data`, and is
// kept when its score on `score_data` does not exceed the running score plus
// the tolerance. Rejected trials leave the weights untouched.
prune_result prune(program_graph const &graph, weight_store const &weights,
                   labeled_data const &train_data, labeled_data const &score_data,
                   prune_config const &config, attempt_observer const &observer = {});

// attempt_index,weight_index,accepted,score
void write_attempts_csv(std::ostream &out, prune_result const &result);

} // namespace dpasr
