// Copyright (c) 2026, The dpasr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace dpasr {

// Nondimensional three-sector rotary air-preheater. Sector 1 is the flue gas,
// sectors 2 and 3 are primary and secondary air. Each sector is the unit
// (phi, z) square.
struct aph_config
{
  std::array<double, 3> ntu{5.0, 5.0, 5.0};
  std::array<double, 3> pe{50.0, 50.0, 50.0};
  std::array<double, 3> inlet{1.0, 0.0, 0.0};
  std::size_t n_phi = 101;
  std::size_t n_z = 101;
  double tolerance = 1e-8;
  int max_sweeps = 10000;

  // Throws config_error.
  void validate() const;
};

// Node values on an n_phi x n_z grid, phi-major.
struct grid_field
{
  std::size_t n_phi = 0;
  std::size_t n_z = 0;
  std::vector<double> data;

  double &at(std::size_t i, std::size_t k) { return data[i * n_z + k]; }
  double at(std::size_t i, std::size_t k) const { return data[i * n_z + k]; }
  // Bilinear interpolation at (phi, z) in [0, 1]^2.
  double sample(double phi, double z) const;
};

struct aph_solution
{
  std::array<grid_field, 3> fluid; // T_j
  std::array<grid_field, 3> metal; // T_mj
  int sweeps = 0;
  double last_change = 0.0;
};

// Fluid:  dT/dz = NTU (T_m - T), T(phi, 0) = T_in (implicit upwind in z).
// Metal:  dT_m/dphi = NTU (T - T_m) + (1/Pe) d2T_m/dz2, marched implicitly in
//         phi with central differences in z and dT_m/dz = 0 at z = 0, 1.
// Rotor continuity links the sectors:
//   T_m1(0, z) = T_m3(1, 1 - z), T_m2(0, z) = T_m1(1, 1 - z), T_m3(0, z) = T_m2(1, z).
// Sweeps the three sectors until the max-norm change between sweeps drops
// below config.tolerance. Throws numerical_error after max_sweeps.
aph_solution aph_fd_solve(aph_config const &config);

} // namespace dpasr
