// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/pruner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "dpasr/error.hpp"
#include "dpasr/metrics.hpp"

namespace dpasr {

void prune_config::validate() const
{
  if (finetune_epochs < 0) throw config_error("prune.finetune_epochs must be non-negative");
  if (!(finetune_lr > 0.0)) throw config_error("prune.finetune_lr must be positive");
  if (!(score_tolerance >= 0.0)) throw config_error("prune.score_tolerance must be non-negative");
}

double score(program_graph const &graph, weight_store const &weights, labeled_data const &data)
{
  if (data.rows() == 0) throw config_error("scoring needs at least one sample");
  auto pred = batch_forward(graph, weights, data.inputs);
  return relative_l2(pred, data.targets);
}

namespace {

class pruner
{
public:
  pruner(program_graph const &graph, labeled_data const &train_data,
         labeled_data const &score_data, prune_config const &config,
         attempt_observer const &observer)
      : graph_(graph), train_(train_data), score_(score_data), config_(config),
        observer_(observer)
  {
    finetune_.max_epochs = std::max(config.finetune_epochs, 1);
    finetune_.initial_lr = config.finetune_lr;
    finetune_.lr_decay_factor = 1.0;
    finetune_.lr_decay_every = std::numeric_limits<int>::max();
    finetune_.l1_coefficient = 0.0;
    finetune_.early_stop_patience = finetune_.max_epochs;
    finetune_.seed = config.seed;
  }

  prune_result run(weight_store weights)
  {
    weights.apply_mask();
    current_ = std::move(weights);
    initial_ = score(graph_, current_, score_);
    if (!std::isfinite(initial_)) throw numerical_error("initial score is not finite");
    best_ = initial_;
    visit(0);

    prune_result result;
    result.initial_score = initial_;
    result.final_score = best_;
    result.surviving_count = current_.unpruned_count();
    result.weights = std::move(current_);
    result.attempts = std::move(attempts_);
    return result;
  }

private:
  void visit(std::size_t node)
  {
    auto const summands = graph_.summands_of(node);
    std::vector<std::size_t> order;
    for (auto const &s : summands)
      if (!current_.is_pruned(s.weight)) order.push_back(s.weight);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(current_[a]) < std::abs(current_[b]);
    });
    for (auto w : order) {
      if (current_.is_pruned(w)) continue;
      auto const &s = graph_.summands()[w];
      for (auto child : s.children)
        if (child >= 0) visit(static_cast<std::size_t>(child));
      attempt(w);
    }
  }

  void attempt(std::size_t w)
  {
    weight_store trial = current_;
    trial.prune(w);
    auto [begin, end] = graph_.subtree_weights(w);
    trial.prune_range(begin, end);

    prune_attempt log;
    log.weight_index = w;
    try {
      if (config_.finetune_epochs == 0) {
        log.score = score(graph_, trial, score_);
      } else {
        auto [tuned, report] = train(graph_, std::move(trial), train_, score_, finetune_);
        trial = std::move(tuned);
        log.score = report.best_validation_score;
      }
    } catch (numerical_error const &) {
      log.diverged = true;
      log.score = std::numeric_limits<double>::quiet_NaN();
    }

    double const slack = config_.score_tolerance;
    if (!log.diverged && std::isfinite(log.score) && log.score <= best_ + slack &&
        log.score <= initial_ + slack) {
      log.accepted = true;
      current_ = std::move(trial);
      best_ = log.score;
    }
    attempts_.push_back(log);
    if (observer_) observer_(log);
  }

  program_graph const &graph_;
  labeled_data const &train_;
  labeled_data const &score_;
  prune_config const &config_;
  attempt_observer const &observer_;
  train_config finetune_;

  weight_store current_;
  double initial_ = 0.0;
  double best_ = 0.0;
  std::vector<prune_attempt> attempts_;
};

} // namespace

prune_result prune(program_graph const &graph, weight_store const &weights,
                   labeled_data const &train_data, labeled_data const &score_data,
                   prune_config const &config, attempt_observer const &observer)
{
  config.validate();
  if (weights.size() != graph.weight_count()) throw config_error("weight store size mismatch");
  if (train_data.rows() == 0 || score_data.rows() == 0)
    throw config_error("pruning needs non-empty train and scoring data");
  pruner p(graph, train_data, score_data, config, observer);
  return p.run(weights);
}

void write_attempts_csv(std::ostream &out, prune_result const &result)
{
  out << "attempt_index,weight_index,accepted,score\n";
  char buf[128];
  for (std::size_t i = 0; i < result.attempts.size(); ++i) {
    auto const &a = result.attempts[i];
    std::snprintf(buf, sizeof buf, "%zu,%zu,%d,%.17g\n", i, a.weight_index, a.accepted ? 1 : 0,
                  a.score);
    out << buf;
  }
}

} // namespace dpasr
