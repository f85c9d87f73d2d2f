#include <doctest.h>

#include <cmath>

#include "dpasr/aph_solver.hpp"
#include "dpasr/datasets.hpp"
#include "dpasr/error.hpp"

using namespace dpasr;

namespace {

aph_config small_config()
{
  aph_config c;
  c.n_phi = 41;
  c.n_z = 41;
  return c;
}

} // namespace

TEST_CASE("isothermal inlets give a constant field")
{
  auto c = small_config();
  c.inlet = {0.4, 0.4, 0.4};
  auto s = aph_fd_solve(c);
  double dev = 0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < s.fluid[j].data.size(); ++i)
      dev = std::max({dev, std::abs(s.fluid[j].data[i] - 0.4), std::abs(s.metal[j].data[i] - 0.4)});
  CHECK(dev < 1e-8);
}

TEST_CASE("converged fields satisfy inlet, interface and insulation conditions")
{
  auto c = small_config();
  auto s = aph_fd_solve(c);
  CHECK(s.last_change < c.tolerance);
  auto const n = c.n_z;
  auto const last = c.n_phi - 1;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < c.n_phi; ++i) CHECK(s.fluid[j].at(i, 0) == c.inlet[j]);

  double iface = 0;
  for (std::size_t k = 0; k < n; ++k) {
    iface = std::max(iface, std::abs(s.metal[0].at(0, k) - s.metal[2].at(last, n - 1 - k)));
    iface = std::max(iface, std::abs(s.metal[1].at(0, k) - s.metal[0].at(last, n - 1 - k)));
    iface = std::max(iface, std::abs(s.metal[2].at(0, k) - s.metal[1].at(last, k)));
  }
  CHECK(iface < 1e-6);

  double const dz = 1.0 / double(n - 1);
  double grad = 0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < c.n_phi; ++i) {
      grad = std::max(grad, std::abs(s.metal[j].at(i, 1) - s.metal[j].at(i, 0)) / dz);
      grad = std::max(grad, std::abs(s.metal[j].at(i, n - 1) - s.metal[j].at(i, n - 2)) / dz);
    }
  CHECK(grad < 1e-3);

  // hot gas heats the metal, the air streams leave warmer than they enter
  CHECK(s.fluid[0].at(20, n - 1) < 1.0);
  CHECK(s.fluid[1].at(20, n - 1) > 0.0);
  CHECK(s.fluid[2].at(20, n - 1) > 0.0);
  for (int j = 0; j < 3; ++j)
    for (double v : s.metal[j].data) {
      CHECK(v >= -1e-12);
      CHECK(v <= 1.0 + 1e-12);
    }
}

TEST_CASE("discrete fluid and metal equations hold on the converged grid")
{
  auto c = small_config();
  auto s = aph_fd_solve(c);
  double const dz = 1.0 / double(c.n_z - 1), dphi = 1.0 / double(c.n_phi - 1);
  double fluid_res = 0, metal_res = 0;
  for (int j = 0; j < 3; ++j)
    for (std::size_t i = 1; i < c.n_phi; ++i)
      for (std::size_t k = 1; k + 1 < c.n_z; ++k) {
        auto const &T = s.fluid[j];
        auto const &M = s.metal[j];
        fluid_res = std::max(fluid_res, std::abs((T.at(i, k) - T.at(i, k - 1)) / dz -
                                                 c.ntu[j] * (M.at(i, k) - T.at(i, k))));
        double const lap = (M.at(i, k + 1) - 2 * M.at(i, k) + M.at(i, k - 1)) / (dz * dz);
        metal_res = std::max(metal_res, std::abs((M.at(i, k) - M.at(i - 1, k)) / dphi -
                                                 c.ntu[j] * (T.at(i, k) - M.at(i, k)) - lap / c.pe[j]));
      }
  CHECK(fluid_res < 1e-9);
  CHECK(metal_res < 1e-9);
}

TEST_CASE("aph config validation and sampling")
{
  aph_config c;
  c.n_phi = 8;
  CHECK_THROWS_AS(c.validate(), config_error);
  c = {};
  c.ntu[1] = 0;
  CHECK_THROWS_AS(c.validate(), config_error);
  c = small_config();
  c.max_sweeps = 2;
  CHECK_THROWS_AS(aph_fd_solve(c), numerical_error);

  sampling_options opt;
  opt.aph = small_config();
  opt.evaluation_points = 500;
  auto d = sample_dataset(benchmark_system::aph, opt, 0);
  CHECK(d.rows() == 41 * 41);
  CHECK(d.targets.size() == 6);
  CHECK(d.targets[0].first == "T_fg");
  auto e = sample_evaluation_set(benchmark_system::aph, opt, 0);
  CHECK(e.rows() == 500);
}

TEST_CASE("bilinear sampling reproduces grid nodes")
{
  grid_field f{3, 3, {0, 1, 2, 3, 4, 5, 6, 7, 8}};
  CHECK(f.sample(0.0, 0.0) == 0.0);
  CHECK(f.sample(1.0, 1.0) == 8.0);
  CHECK(f.sample(0.5, 0.5) == 4.0);
  CHECK(f.sample(0.25, 0.0) == doctest::Approx(1.5));
}
