#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dpasr/error.hpp"
#include "dpasr/metrics.hpp"

using namespace dpasr;
using v = std::vector<double>;

TEST_CASE("relative_l2 examples")
{
  v t{1, -2, 3};
  CHECK(relative_l2(t, t) == 0.0);
  CHECK(relative_l2(v{-1, 2, -3}, t) == 2.0);
  CHECK(relative_l2(v{3, 4}, v{0, 5}) == doctest::Approx(std::sqrt(10.0) / 5).epsilon(1e-15));
  CHECK_THROWS_AS(relative_l2(v{1}, v{0}), config_error);
  CHECK_THROWS_AS(relative_l2(v{1, 2}, v{1}), config_error);
  CHECK_THROWS_AS(relative_l2(v{}, v{}), config_error);
}

TEST_CASE("mae examples")
{
  CHECK(mae(v{1, 2}, v{1, 2}) == 0.0);
  CHECK(mae(v{1, 2}, v{0, 0}) == 1.5);
  v t{0.5, -1.25, 2.0, 8.0};
  v p = t;
  for (auto &x : p) x += 0.25;
  CHECK(mae(p, t) == 0.25);
}

TEST_CASE("scale covariance and permutation invariance")
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  v p(50), t(50);
  for (std::size_t i = 0; i < 50; ++i) {
    p[i] = n(rng);
    t[i] = n(rng);
  }
  double const base = relative_l2(p, t);
  for (double a : {-3.0, 0.5, 1e3}) {
    v ap = p, at = t;
    for (auto &x : ap) x *= a;
    for (auto &x : at) x *= a;
    CHECK(relative_l2(ap, at) == doctest::Approx(base).epsilon(1e-13));
  }
  std::vector<std::size_t> idx(50);
  for (std::size_t i = 0; i < 50; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  v sp, st;
  for (auto i : idx) {
    sp.push_back(p[i]);
    st.push_back(t[i]);
  }
  CHECK(relative_l2(sp, st) == doctest::Approx(base).epsilon(1e-13));
  CHECK(mae(sp, st) == doctest::Approx(mae(p, t)).epsilon(1e-13));
}

TEST_CASE("reduction fraction")
{
  eval_report r;
  r.unpruned_params = 157;
  r.surviving_params = 15;
  CHECK(r.reduction_fraction() == doctest::Approx(1 - 15.0 / 157));
  r.surviving_params = 157;
  CHECK(r.reduction_fraction() == 0.0);
}
