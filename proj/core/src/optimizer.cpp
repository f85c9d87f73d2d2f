// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "dpasr/autodiff.hpp"
#include "dpasr/error.hpp"
#include "dpasr/metrics.hpp"

namespace dpasr {

void train_config::validate() const
{
  if (!(initial_lr > 0.0)) throw config_error("train.initial_lr must be positive");
  if (!(lr_decay_factor > 0.0 && lr_decay_factor <= 1.0))
    throw config_error("train.lr_decay_factor must be in (0, 1]");
  if (lr_decay_every < 1) throw config_error("train.lr_decay_every must be at least 1");
  if (max_epochs < 1) throw config_error("train.max_epochs must be at least 1");
  if (early_stop_patience < 0) throw config_error("train.early_stop_patience must be non-negative");
  if (!(l1_coefficient >= 0.0)) throw config_error("train.l1_coefficient must be non-negative");
}

double train_config::lr_at(int epoch) const
{
  int const drops = (epoch - 1) / lr_decay_every;
  return initial_lr * std::pow(lr_decay_factor, drops);
}

std::string_view to_string(stop_reason r)
{
  return r == stop_reason::early_stop ? "early_stop" : "max_epochs";
}

weight_store glorot_init(program_graph const &graph, std::uint64_t seed)
{
  weight_store w(graph.weight_count());
  std::mt19937_64 rng(seed);
  for (auto const &node : graph.nodes()) {
    double const bound = std::sqrt(6.0 / (static_cast<double>(node.summand_count) + 1.0));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (std::size_t i = node.first_summand; i < node.first_summand + node.summand_count; ++i)
      w.set(i, dist(rng));
  }
  return w;
}

adam::adam(std::size_t n, double beta1, double beta2, double epsilon)
    : beta1_(beta1), beta2_(beta2), epsilon_(epsilon), m_(n, 0.0), v_(n, 0.0)
{
}

void adam::reset()
{
  t_ = 0;
  std::fill(m_.begin(), m_.end(), 0.0);
  std::fill(v_.begin(), v_.end(), 0.0);
}

void adam::step(weight_store &weights, std::span<double const> grad, double lr)
{
  ++t_;
  double const c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  double const c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  auto w = weights.values();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (weights.is_pruned(i)) continue;
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    double const m_hat = m_[i] / c1;
    double const v_hat = v_[i] / c2;
    w[i] -= lr * m_hat / (std::sqrt(v_hat) + epsilon_);
  }
}

std::pair<weight_store, train_report> train(program_graph const &graph, weight_store weights,
                                            labeled_data const &train_data,
                                            labeled_data const &validation_data,
                                            train_config const &config,
                                            epoch_observer const &observer)
{
  config.validate();
  if (train_data.rows() == 0 || validation_data.rows() == 0)
    throw config_error("training needs non-empty train and validation sets");
  weights.apply_mask();

  loss_evaluator objective(graph, train_data.inputs, train_data.targets);
  batch_evaluator validator(graph, validation_data.inputs);
  auto validation_score = [&](weight_store const &w, int epoch) {
    double const s = relative_l2(validator.predict(w), validation_data.targets);
    if (!std::isfinite(s))
      throw numerical_error("training diverged at epoch " + std::to_string(epoch) +
                            ": validation score is not finite");
    return s;
  };
  auto train_loss = [&](weight_store const &w, int epoch) -> loss_gradient const & {
    try {
      return objective.evaluate(w, config.l1_coefficient);
    } catch (numerical_error const &e) {
      throw numerical_error("training diverged at epoch " + std::to_string(epoch) + ": " + e.what());
    }
  };

  train_report report;
  double const initial_score = validation_score(weights, 0);
  report.history.push_back({0, train_loss(weights, 0).loss, initial_score, config.lr_at(1)});
  if (observer) observer(report.history.back());

  weight_store best = weights;
  double best_score = initial_score;
  int best_epoch = 0;
  adam opt(weights.size());
  report.reason = stop_reason::max_epochs;

  int epoch = 1;
  for (; epoch <= config.max_epochs; ++epoch) {
    double const lr = config.lr_at(epoch);
    auto const &lg = train_loss(weights, epoch);
    double const loss = lg.loss;
    opt.step(weights, lg.grad, lr);
    double const score = validation_score(weights, epoch);
    report.history.push_back({epoch, loss, score, lr});
    if (observer) observer(report.history.back());
    if (score < best_score) {
      best_score = score;
      best_epoch = epoch;
      best = weights;
    } else if (epoch - best_epoch > config.early_stop_patience) {
      report.reason = stop_reason::early_stop;
      break;
    }
  }
  report.epochs_run = std::min(epoch, config.max_epochs);
  report.best_epoch = best_epoch;
  report.best_validation_score = best_score;
  return {std::move(best), std::move(report)};
}

void write_training_csv(std::ostream &out, train_report const &report)
{
  out << "epoch,train_loss,val_rel_l2,lr\n";
  char buf[128];
  for (auto const &r : report.history) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", r.epoch, r.train_loss,
                  r.validation_score, r.lr);
    out << buf;
  }
}

} // namespace dpasr
