// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#include "dpasr/aph_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>

#include "dpasr/error.hpp"

namespace dpasr {

void aph_config::validate() const
{
  for (int j = 0; j < 3; ++j) {
    if (!(ntu[j] > 0.0)) throw config_error("aph.ntu values must be positive");
    if (!(pe[j] > 0.0)) throw config_error("aph.pe values must be positive");
    if (!std::isfinite(inlet[j])) throw config_error("aph.inlet values must be finite");
  }
  if (n_phi < 16 || n_z < 16) throw config_error("aph grid must be at least 16 x 16");
  if (!(tolerance > 0.0)) throw config_error("aph.tolerance must be positive");
  if (max_sweeps < 1) throw config_error("aph.max_sweeps must be at least 1");
}

double grid_field::sample(double phi, double z) const
{
  double const fp = std::clamp(phi, 0.0, 1.0) * static_cast<double>(n_phi - 1);
  double const fz = std::clamp(z, 0.0, 1.0) * static_cast<double>(n_z - 1);
  auto const i = std::min(static_cast<std::size_t>(fp), n_phi - 2);
  auto const k = std::min(static_cast<std::size_t>(fz), n_z - 2);
  double const a = fp - static_cast<double>(i);
  double const b = fz - static_cast<double>(k);
  return (1 - a) * (1 - b) * at(i, k) + a * (1 - b) * at(i + 1, k) + (1 - a) * b * at(i, k + 1) +
         a * b * at(i + 1, k + 1);
}

namespace {

// Thomas algorithm; sub/diag/super/rhs are consumed.
void solve_tridiagonal(std::vector<double> &sub, std::vector<double> &diag,
                       std::vector<double> &super, std::vector<double> &rhs,
                       std::span<double> out)
{
  auto const n = diag.size();
  for (std::size_t k = 1; k < n; ++k) {
    double const m = sub[k] / diag[k - 1];
    diag[k] -= m * super[k - 1];
    rhs[k] -= m * rhs[k - 1];
  }
  out[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t k = n - 1; k-- > 0;) out[k] = (rhs[k] - super[k] * out[k + 1]) / diag[k];
}

class sector_marcher
{
public:
  sector_marcher(aph_config const &cfg, int j)
      : nz_(cfg.n_z), nphi_(cfg.n_phi), ntu_(cfg.ntu[j]), pe_(cfg.pe[j]), inlet_(cfg.inlet[j]),
        dz_(1.0 / static_cast<double>(cfg.n_z - 1)),
        dphi_(1.0 / static_cast<double>(cfg.n_phi - 1)), sub_(nz_), diag_(nz_), super_(nz_),
        rhs_(nz_), next_(nz_), fluid_(nz_)
  {
  }

  // Fills fluid and metal fields of one sector from the metal profile at phi = 0.
  void march(std::span<double const> metal_start, grid_field &fluid, grid_field &metal)
  {
    std::copy(metal_start.begin(), metal_start.end(), &metal.at(0, 0));
    fluid_column(metal_start, {&fluid.at(0, 0), nz_});
    for (std::size_t i = 1; i < nphi_; ++i) {
      std::span<double const> prev(&metal.at(i - 1, 0), nz_);
      std::span<double> cur(&metal.at(i, 0), nz_);
      std::span<double> fl(&fluid.at(i, 0), nz_);
      std::copy(prev.begin(), prev.end(), cur.begin());
      for (int inner = 0; inner < 500; ++inner) {
        fluid_column(cur, fl);
        metal_step(prev, fl, next_);
        double change = 0.0;
        for (std::size_t k = 0; k < nz_; ++k) change = std::max(change, std::abs(next_[k] - cur[k]));
        std::copy(next_.begin(), next_.end(), cur.begin());
        if (change < 1e-14) break;
      }
      fluid_column(cur, fl);
    }
  }

private:
  void fluid_column(std::span<double const> metal, std::span<double> fluid) const
  {
    double const a = dz_ * ntu_;
    fluid[0] = inlet_;
    for (std::size_t k = 1; k < nz_; ++k) fluid[k] = (fluid[k - 1] + a * metal[k]) / (1.0 + a);
  }

  void metal_step(std::span<double const> prev, std::span<double const> fluid,
                  std::vector<double> &out)
  {
    double const c = 1.0 / (pe_ * dz_ * dz_);
    for (std::size_t k = 1; k + 1 < nz_; ++k) {
      sub_[k] = -c;
      super_[k] = -c;
      diag_[k] = 1.0 / dphi_ + ntu_ + 2.0 * c;
      rhs_[k] = prev[k] / dphi_ + ntu_ * fluid[k];
    }
    // Insulated ends: T_m[0] = T_m[1], T_m[n-1] = T_m[n-2].
    sub_[0] = 0.0;
    diag_[0] = 1.0;
    super_[0] = -1.0;
    rhs_[0] = 0.0;
    sub_[nz_ - 1] = -1.0;
    diag_[nz_ - 1] = 1.0;
    super_[nz_ - 1] = 0.0;
    rhs_[nz_ - 1] = 0.0;
    solve_tridiagonal(sub_, diag_, super_, rhs_, out);
  }

  std::size_t nz_;
  std::size_t nphi_;
  double ntu_;
  double pe_;
  double inlet_;
  double dz_;
  double dphi_;
  std::vector<double> sub_, diag_, super_, rhs_, next_, fluid_;
};

grid_field make_field(aph_config const &cfg)
{
  return grid_field{cfg.n_phi, cfg.n_z, std::vector<double>(cfg.n_phi * cfg.n_z, 0.0)};
}

double max_change(grid_field const &a, std::vector<double> const &b)
{
  double m = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) m = std::max(m, std::abs(a.data[i] - b[i]));
  return m;
}

} // namespace

aph_solution aph_fd_solve(aph_config const &config)
{
  config.validate();
  aph_solution sol;
  for (int j = 0; j < 3; ++j) {
    sol.fluid[j] = make_field(config);
    sol.metal[j] = make_field(config);
  }
  std::array<sector_marcher, 3> marchers{sector_marcher(config, 0), sector_marcher(config, 1),
                                         sector_marcher(config, 2)};
  auto const nz = config.n_z;
  auto const last = config.n_phi - 1;
  double const mean_inlet = (config.inlet[0] + config.inlet[1] + config.inlet[2]) / 3.0;
  std::vector<double> start(nz, mean_inlet);
  std::array<std::vector<double>, 6> previous;

  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    for (int j = 0; j < 3; ++j) {
      previous[2 * j] = sol.fluid[j].data;
      previous[2 * j + 1] = sol.metal[j].data;
    }
    marchers[0].march(start, sol.fluid[0], sol.metal[0]);
    for (std::size_t k = 0; k < nz; ++k) start[k] = sol.metal[0].at(last, nz - 1 - k);
    marchers[1].march(start, sol.fluid[1], sol.metal[1]);
    for (std::size_t k = 0; k < nz; ++k) start[k] = sol.metal[1].at(last, k);
    marchers[2].march(start, sol.fluid[2], sol.metal[2]);
    for (std::size_t k = 0; k < nz; ++k) start[k] = sol.metal[2].at(last, nz - 1 - k);

    double change = 0.0;
    for (int j = 0; j < 3; ++j) {
      change = std::max(change, max_change(sol.fluid[j], previous[2 * j]));
      change = std::max(change, max_change(sol.metal[j], previous[2 * j + 1]));
    }
    sol.sweeps = sweep;
    sol.last_change = change;
    if (sweep > 1 && change < config.tolerance) return sol;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "APH solver did not converge in %d sweeps (last change %.3e)",
                config.max_sweeps, sol.last_change);
  throw numerical_error(buf);
}

} // namespace dpasr
