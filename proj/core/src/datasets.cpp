// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "dpasr/error.hpp"

namespace dpasr {

using std::numbers::pi;

std::string_view to_string(benchmark_system s)
{
  switch (s) {
  case benchmark_system::diffusion: return "diffusion";
  case benchmark_system::kovasznay: return "kovasznay";
  case benchmark_system::taylor_green: return "taylor_green";
  case benchmark_system::diffusion_reaction: return "diffusion_reaction";
  case benchmark_system::aph: return "aph";
  }
  return "?";
}

benchmark_system parse_system(std::string_view id)
{
  for (auto s : {benchmark_system::diffusion, benchmark_system::kovasznay,
                 benchmark_system::taylor_green, benchmark_system::diffusion_reaction,
                 benchmark_system::aph}) {
    if (id == to_string(s)) return s;
  }
  throw config_error("unknown system id '" + std::string(id) + "'");
}

std::vector<std::string> system_inputs(benchmark_system s)
{
  switch (s) {
  case benchmark_system::diffusion:
  case benchmark_system::diffusion_reaction: return {"x", "t"};
  case benchmark_system::kovasznay: return {"x", "y"};
  case benchmark_system::taylor_green: return {"x", "y", "t"};
  case benchmark_system::aph: return {"theta", "z"};
  }
  return {};
}

std::vector<std::string> system_outputs(benchmark_system s)
{
  switch (s) {
  case benchmark_system::diffusion:
  case benchmark_system::diffusion_reaction: return {"u"};
  case benchmark_system::kovasznay:
  case benchmark_system::taylor_green: return {"u", "v", "p"};
  case benchmark_system::aph: return {"T_fg", "T_mg", "T_fa1", "T_ma1", "T_fa2", "T_ma2"};
  }
  return {};
}

double diffusion_truth(double x, double t) { return std::exp(-t) * std::sin(pi * x); }

double kovasznay_lambda(double reynolds)
{
  return reynolds / 2.0 - std::sqrt(reynolds * reynolds / 4.0 + 4.0 * pi * pi);
}

flow_fields kovasznay_truth(double x, double y, double reynolds)
{
  double const lam = kovasznay_lambda(reynolds);
  double const e = std::exp(lam * x);
  return {1.0 - e * std::cos(2.0 * pi * y), lam / (2.0 * pi) * e * std::sin(2.0 * pi * y),
          (1.0 - std::exp(2.0 * lam * x)) / 2.0};
}

flow_fields taylor_green_truth(double x, double y, double t, double nu)
{
  double const decay = std::exp(-2.0 * pi * pi * nu * t);
  return {-std::cos(pi * x) * std::sin(pi * y) * decay, std::sin(pi * x) * std::cos(pi * y) * decay,
          -(std::cos(2.0 * pi * x) + std::cos(2.0 * pi * y)) * decay / 4.0};
}

double diffusion_reaction_truth(double x, double t)
{
  double const p = (12.0 * std::sin(x) * (1.0 + std::cos(x)) + 4.0 * std::sin(3.0 * x)) / 12.0;
  double const q = std::sin(4.0 * x) * (1.0 + std::cos(4.0 * x)) / 4.0;
  return std::exp(-t) * (p + q);
}

double diffusion_reaction_forcing(double x)
{
  return (36.0 * std::sin(2.0 * x) + 64.0 * std::sin(3.0 * x) + 90.0 * std::sin(4.0 * x) +
          189.0 * std::sin(8.0 * x)) /
         24.0;
}

std::string_view to_string(split_kind s)
{
  switch (s) {
  case split_kind::train: return "train";
  case split_kind::validation: return "validation";
  case split_kind::test: return "test";
  }
  return "?";
}

std::span<double const> dataset::target(std::string const &output) const
{
  for (auto const &[name, column] : targets)
    if (name == output) return column;
  throw config_error("dataset has no output '" + output + "'");
}

std::vector<std::size_t> dataset::rows_in(split_kind s) const
{
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < split.size(); ++i)
    if (split[i] == s) rows.push_back(i);
  return rows;
}

labeled_data dataset::labeled(std::string const &output, split_kind s) const
{
  auto const rows = rows_in(s);
  auto const column = target(output);
  labeled_data out;
  out.inputs = inputs.select(rows);
  out.targets.reserve(rows.size());
  for (auto r : rows) out.targets.push_back(column[r]);
  return out;
}

labeled_data dataset::labeled(std::string const &output) const
{
  auto const column = target(output);
  return {inputs, std::vector<double>(column.begin(), column.end())};
}

void sampling_options::validate() const
{
  if (grid < 2) throw config_error("dataset.grid must be at least 2");
  if (!(validation_fraction >= 0.0 && validation_fraction < 1.0))
    throw config_error("dataset.validation_fraction must be in [0, 1)");
  if (taylor_green_points < 2) throw config_error("dataset.taylor_green_points must be at least 2");
  if (train_points < 1) throw config_error("dataset.train_points must be positive");
  if (!(reynolds > 0.0)) throw config_error("dataset.reynolds must be positive");
  if (!(nu > 0.0)) throw config_error("dataset.nu must be positive");
  aph.validate();
}

namespace {

struct box
{
  double lo;
  double hi;
};

std::array<box, 3> domain_of(benchmark_system s)
{
  switch (s) {
  case benchmark_system::diffusion: return {{{0.0, 1.0}, {0.0, 1.0}, {0, 0}}};
  case benchmark_system::diffusion_reaction: return {{{-pi, pi}, {0.0, 1.0}, {0, 0}}};
  case benchmark_system::kovasznay: return {{{-0.5, 1.0}, {-0.5, 1.5}, {0, 0}}};
  case benchmark_system::taylor_green: return {{{0.0, 2.0}, {0.0, 2.0}, {0.0, 1.0}}};
  case benchmark_system::aph: return {{{0.0, 1.0}, {0.0, 1.0}, {0, 0}}};
  }
  return {};
}

class target_filler
{
public:
  target_filler(benchmark_system system, sampling_options const &opt)
      : system_(system), opt_(opt)
  {
    if (system == benchmark_system::aph) aph_ = aph_fd_solve(opt.aph);
  }

  // Appends the target values at one input point, in system_outputs order.
  void append(std::span<double const> x, dataset &data) const
  {
    auto &t = data.targets;
    switch (system_) {
    case benchmark_system::diffusion: t[0].second.push_back(diffusion_truth(x[0], x[1])); break;
    case benchmark_system::diffusion_reaction:
      t[0].second.push_back(diffusion_reaction_truth(x[0], x[1]));
      break;
    case benchmark_system::kovasznay: {
      auto f = kovasznay_truth(x[0], x[1], opt_.reynolds);
      t[0].second.push_back(f.u);
      t[1].second.push_back(f.v);
      t[2].second.push_back(f.p);
      break;
    }
    case benchmark_system::taylor_green: {
      auto f = taylor_green_truth(x[0], x[1], x[2], opt_.nu);
      t[0].second.push_back(f.u);
      t[1].second.push_back(f.v);
      t[2].second.push_back(f.p);
      break;
    }
    case benchmark_system::aph:
      for (int j = 0; j < 3; ++j) {
        t[2 * j].second.push_back(aph_.fluid[j].sample(x[0], x[1]));
        t[2 * j + 1].second.push_back(aph_.metal[j].sample(x[0], x[1]));
      }
      break;
    }
  }

  aph_solution const &aph() const { return aph_; }

private:
  benchmark_system system_;
  sampling_options const &opt_;
  aph_solution aph_;
};

dataset empty_dataset(benchmark_system system)
{
  dataset d;
  d.system = system;
  d.inputs.names = system_inputs(system);
  d.inputs.columns.resize(d.inputs.names.size());
  for (auto const &o : system_outputs(system)) d.targets.emplace_back(o, std::vector<double>{});
  return d;
}

void push_point(dataset &d, std::span<double const> x, target_filler const &filler)
{
  for (std::size_t c = 0; c < d.inputs.columns.size(); ++c) d.inputs.columns[c].push_back(x[c]);
  filler.append(x, d);
}

void assign_splits(dataset &d, sampling_options const &opt, std::mt19937_64 &rng)
{
  auto const n = d.rows();
  // 7500 of 10201 rows train on the reference grid; other sizes keep the ratio.
  auto n_train = static_cast<std::size_t>(
      std::llround(static_cast<double>(n) * static_cast<double>(opt.train_points) / 10201.0));
  n_train = std::clamp<std::size_t>(n_train, 1, n);
  auto const n_val =
      static_cast<std::size_t>(std::llround(static_cast<double>(n_train) * opt.validation_fraction));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  d.split.assign(n, split_kind::test);
  for (std::size_t i = 0; i < n_train; ++i)
    d.split[order[i]] = i < n_val ? split_kind::validation : split_kind::train;
}

void check_finite(dataset const &d)
{
  for (auto const &[name, column] : d.targets)
    for (std::size_t i = 0; i < column.size(); ++i)
      if (!std::isfinite(column[i]))
        throw numerical_error("non-finite target '" + name + "' at row " + std::to_string(i));
}

} // namespace

dataset sample_dataset(benchmark_system system, sampling_options const &options, std::uint64_t seed)
{
  options.validate();
  std::mt19937_64 rng(seed);
  target_filler filler(system, options);
  dataset d = empty_dataset(system);
  auto const dom = domain_of(system);

  if (system == benchmark_system::taylor_green) {
    std::uniform_real_distribution<double> ux(dom[0].lo, dom[0].hi);
    std::uniform_real_distribution<double> uy(dom[1].lo, dom[1].hi);
    std::uniform_int_distribution<int> step(0, 10);
    while (d.rows() < options.taylor_green_points) {
      double const x = ux(rng);
      double const y = uy(rng);
      double const t = 0.1 * step(rng);
      // interior points only
      if (x <= dom[0].lo || y <= dom[1].lo) continue;
      double const p[3] = {x, y, t};
      push_point(d, p, filler);
    }
  } else if (system == benchmark_system::aph) {
    auto const &cfg = options.aph;
    for (std::size_t i = 0; i < cfg.n_phi; ++i) {
      for (std::size_t k = 0; k < cfg.n_z; ++k) {
        double const theta = static_cast<double>(i) / static_cast<double>(cfg.n_phi - 1);
        double const z = static_cast<double>(k) / static_cast<double>(cfg.n_z - 1);
        for (std::size_t c = 0; c < 2; ++c) d.inputs.columns[c].push_back(c == 0 ? theta : z);
        for (int j = 0; j < 3; ++j) {
          d.targets[2 * j].second.push_back(filler.aph().fluid[j].at(i, k));
          d.targets[2 * j + 1].second.push_back(filler.aph().metal[j].at(i, k));
        }
      }
    }
  } else {
    auto const n = options.grid;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        double const a = dom[0].lo + (dom[0].hi - dom[0].lo) * static_cast<double>(i) /
                                         static_cast<double>(n - 1);
        double const b = dom[1].lo + (dom[1].hi - dom[1].lo) * static_cast<double>(k) /
                                         static_cast<double>(n - 1);
        double const p[2] = {a, b};
        push_point(d, p, filler);
      }
    }
  }
  assign_splits(d, options, rng);
  check_finite(d);
  return d;
}

dataset sample_evaluation_set(benchmark_system system, sampling_options const &options,
                              std::uint64_t seed)
{
  options.validate();
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  target_filler filler(system, options);
  dataset d = empty_dataset(system);
  auto const dom = domain_of(system);
  auto const dims = d.inputs.names.size();
  std::vector<std::uniform_real_distribution<double>> dist;
  for (std::size_t c = 0; c < dims; ++c) dist.emplace_back(dom[c].lo, dom[c].hi);
  std::vector<double> p(dims);
  for (std::size_t r = 0; r < options.evaluation_points; ++r) {
    for (std::size_t c = 0; c < dims; ++c) p[c] = dist[c](rng);
    push_point(d, p, filler);
  }
  d.split.assign(d.rows(), split_kind::test);
  check_finite(d);
  return d;
}

void write_dataset_csv(std::ostream &out, dataset const &data, std::string const &comment)
{
  if (!comment.empty()) out << "# " << comment << '\n';
  for (auto const &n : data.inputs.names) out << n << ',';
  for (auto const &t : data.targets) out << t.first << ',';
  out << "split\n";
  char buf[40];
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (auto const &c : data.inputs.columns) {
      std::snprintf(buf, sizeof buf, "%.17g,", c[r]);
      out << buf;
    }
    for (auto const &t : data.targets) {
      std::snprintf(buf, sizeof buf, "%.17g,", t.second[r]);
      out << buf;
    }
    out << to_string(data.split[r]) << '\n';
  }
}

dataset read_dataset_csv(std::istream &in, benchmark_system system)
{
  dataset d = empty_dataset(system);
  auto const n_in = d.inputs.names.size();
  auto const n_out = d.targets.size();
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != n_in + n_out + 1)
      throw io_error("dataset line " + std::to_string(line_no) + ": expected " +
                     std::to_string(n_in + n_out + 1) + " columns");
    if (!header) {
      for (std::size_t c = 0; c < n_in; ++c)
        if (cells[c] != d.inputs.names[c]) throw io_error("dataset header mismatch at '" + cells[c] + "'");
      for (std::size_t c = 0; c < n_out; ++c)
        if (cells[n_in + c] != d.targets[c].first)
          throw io_error("dataset header mismatch at '" + cells[n_in + c] + "'");
      header = true;
      continue;
    }
    for (std::size_t c = 0; c < n_in + n_out; ++c) {
      char *end = nullptr;
      double const v = std::strtod(cells[c].c_str(), &end);
      if (end == cells[c].c_str() || *end != '\0')
        throw io_error("dataset line " + std::to_string(line_no) + ": bad number '" + cells[c] + "'");
      if (c < n_in)
        d.inputs.columns[c].push_back(v);
      else
        d.targets[c - n_in].second.push_back(v);
    }
    auto const &s = cells.back();
    if (s == "train")
      d.split.push_back(split_kind::train);
    else if (s == "validation")
      d.split.push_back(split_kind::validation);
    else if (s == "test")
      d.split.push_back(split_kind::test);
    else
      throw io_error("dataset line " + std::to_string(line_no) + ": bad split '" + s + "'");
  }
  if (!header) throw io_error("dataset file has no header");
  return d;
}

} // namespace dpasr
