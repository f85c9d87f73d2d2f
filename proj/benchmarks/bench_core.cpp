// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "dpasr/aph_solver.hpp"
#include "dpasr/autodiff.hpp"
#include "dpasr/symbolic.hpp"
#include "fixtures.hpp"

using namespace dpasr;
using namespace dpasr::testing;

namespace {

struct problem
{
  program_graph graph;
  weight_store weights;
  input_table inputs;
  std::vector<double> targets;
};

// state.range(0): depth, state.range(1): rows
problem make_problem(benchmark::State const &state)
{
  std::mt19937_64 rng(1);
  auto g = program_graph::build(five_unary_grammar({"x", "y"}, true), static_cast<int>(state.range(0)));
  auto w = random_weights(g, rng, 0.3);
  auto rows = static_cast<std::size_t>(state.range(1));
  auto in = make_table({"x", "y"}, random_columns(rng, 2, rows));
  std::vector<double> y(rows, 0.5);
  return {std::move(g), std::move(w), std::move(in), std::move(y)};
}

void bm_batch_forward(benchmark::State &state)
{
  auto p = make_problem(state);
  batch_evaluator ev(p.graph, p.inputs);
  for (auto _ : state) benchmark::DoNotOptimize(ev.predict(p.weights).data());
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.counters["weights"] = double(p.graph.weight_count());
}
BENCHMARK(bm_batch_forward)->Args({2, 7500})->Args({3, 7500})->Unit(benchmark::kMicrosecond);

void bm_loss_and_grad(benchmark::State &state)
{
  auto p = make_problem(state);
  loss_evaluator ev(p.graph, p.inputs, p.targets);
  for (auto _ : state) benchmark::DoNotOptimize(ev.evaluate(p.weights, 1e-5).loss);
  state.SetItemsProcessed(state.iterations() * state.range(1));
}
BENCHMARK(bm_loss_and_grad)->Args({2, 7500})->Args({3, 7500})->Unit(benchmark::kMicrosecond);

void bm_scalar_forward(benchmark::State &state)
{
  auto p = make_problem(state);
  std::vector<double> x{0.3, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(forward(p.graph, p.weights, x));
}
BENCHMARK(bm_scalar_forward)->Args({2, 1})->Args({3, 1});

void bm_extract_simplify(benchmark::State &state)
{
  auto p = make_problem(state);
  for (auto _ : state) {
    auto e = simplify(extract(p.graph, p.weights));
    benchmark::DoNotOptimize(e.node_count());
  }
}
BENCHMARK(bm_extract_simplify)->Args({2, 1})->Unit(benchmark::kMicrosecond);

void bm_aph_solve(benchmark::State &state)
{
  aph_config cfg;
  cfg.n_phi = cfg.n_z = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(aph_fd_solve(cfg).sweeps);
}
BENCHMARK(bm_aph_solve)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
