#include "wfdens/errors.hpp"
#include "wfdens/numerics.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <vector>

using namespace wfdens;

TEST(Simpson, ExactForCubics)
{
  const auto x = uniform_grid(0.0, 2.0, 11);
  std::vector<double> y;
  for (double v : x)
    y.push_back(v * v * v - 2 * v + 1);
  // int_0^2 (x^3 - 2x + 1) dx = 4 - 4 + 2
  EXPECT_NEAR(simpson(x, y), 2.0, 1e-13);
}

TEST(Simpson, EvenPointCountClosesLastInterval)
{
  const auto x = uniform_grid(0.0, 1.0, 10);
  std::vector<double> y;
  for (double v : x)
    y.push_back(v * v);
  EXPECT_NEAR(simpson(x, y), 1.0 / 3.0, 1e-14);
}

TEST(Simpson, NonUniformGrid)
{
  std::vector<double> x;
  for (int i = 0; i <= 200; ++i) {
    const double u = i / 200.0;
    x.push_back(u * u);
  }
  std::vector<double> y;
  for (double v : x)
    y.push_back(std::exp(v));
  EXPECT_NEAR(simpson(x, y), std::exp(1.0) - 1.0, 1e-9);
}

TEST(Simpson, FunctionOverload)
{
  EXPECT_NEAR(simpson([](double v) { return std::sin(v); }, 0.0, M_PI, 200), 2.0, 1e-8);
  EXPECT_THROW(simpson([](double v) { return v; }, 0.0, 1.0, 3), GridError);
}

TEST(Simpson, Degenerate)
{
  const std::vector<double> one = {0.3};
  EXPECT_EQ(simpson(one, one), 0.0);
  const std::vector<double> x = {0.0, 2.0};
  const std::vector<double> y = {1.0, 3.0};
  EXPECT_DOUBLE_EQ(simpson(x, y), 4.0);
  const std::vector<double> shorter = {1.0};
  EXPECT_THROW(simpson(x, shorter), GridError);
}

TEST(UniformGrid, Endpoints)
{
  const auto g = uniform_grid(1e-4, 1.0 - 1e-4, 2001);
  ASSERT_EQ(g.size(), 2001u);
  EXPECT_EQ(g.front(), 1e-4);
  EXPECT_EQ(g.back(), 1.0 - 1e-4);
  for (std::size_t i = 1; i < g.size(); ++i)
    ASSERT_GT(g[i], g[i - 1]);
  EXPECT_THROW(uniform_grid(1.0, 0.0, 5), GridError);
  EXPECT_THROW(uniform_grid(0.0, 1.0, 1), GridError);
}

TEST(InterpolateLinear, InsideAndOutside)
{
  const std::vector<double> x = {0.0, 1.0, 3.0};
  const std::vector<double> y = {0.0, 2.0, 6.0};
  EXPECT_DOUBLE_EQ(interpolate_linear(x, y, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(interpolate_linear(x, y, 2.0), 4.0);
  EXPECT_DOUBLE_EQ(interpolate_linear(x, y, 3.0), 6.0);
  EXPECT_EQ(interpolate_linear(x, y, -0.1), 0.0);
  EXPECT_EQ(interpolate_linear(x, y, 3.1), 0.0);
}

TEST(DeriveSeed, DeterministicAndDistinct)
{
  EXPECT_EQ(derive_seed(42, 7), derive_seed(42, 7));
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 20; ++s)
    for (std::uint64_t i = 0; i < 500; ++i)
      seen.insert(derive_seed(s, i));
  EXPECT_EQ(seen.size(), 20u * 500u);
}

TEST(ParallelFor, VisitsEveryIndexOnce)
{
  for (unsigned workers : {1u, 2u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i].fetch_add(1); }, workers);
    for (const auto& h : hits)
      ASSERT_EQ(h.load(), 1);
  }
}

TEST(ParallelFor, PropagatesExceptions)
{
  EXPECT_THROW(parallel_for(
                 50,
                 [](std::size_t i) {
                   if (i == 17)
                     throw GridError("boom");
                 },
                 4),
               GridError);
}
