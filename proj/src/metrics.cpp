#include "wfdens/metrics.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace wfdens {

namespace {

void
require_same_length(std::span<const double> grid,
                    std::span<const double> p,
                    std::span<const double> q)
{
  if (grid.size() != p.size() || grid.size() != q.size() || grid.size() < 3)
    throw GridError("distance: grid and densities must share a length >= 3");
}

} // namespace

CommonGrid
common_grid(const GridDensity& p, const GridDensity& q)
{
  if (p.grid.size() < 2 || q.grid.size() < 2)
    throw GridError("distance: densities need at least two grid points");
  CommonGrid out;
  if (p.grid == q.grid) {
    out.grid = p.grid;
    out.p = p.pdf();
    out.q = q.pdf();
    return out;
  }
  const double lo = std::max(p.grid.front(), q.grid.front());
  const double hi = std::min(p.grid.back(), q.grid.back());
  if (!(hi > lo))
    throw GridError("distance: density supports do not overlap");
  std::size_t points = std::max(p.grid.size(), q.grid.size());
  if (points % 2 == 0)
    ++points;
  out.grid = uniform_grid(lo, hi, points);
  const auto pp = p.pdf();
  const auto qq = q.pdf();
  out.p.resize(points);
  out.q.resize(points);
  for (std::size_t i = 0; i < points; ++i) {
    out.p[i] = interpolate_linear(p.grid, pp, out.grid[i]);
    out.q[i] = interpolate_linear(q.grid, qq, out.grid[i]);
  }
  return out;
}

double
hellinger(std::span<const double> grid, std::span<const double> p, std::span<const double> q)
{
  require_same_length(grid, p, q);
  std::vector<double> integrand(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::sqrt(std::max(p[i], 0.0)) - std::sqrt(std::max(q[i], 0.0));
    integrand[i] = d * d;
  }
  const double h2 = 0.5 * simpson(grid, integrand);
  return std::sqrt(std::clamp(h2, 0.0, 1.0));
}

double
hellinger(const GridDensity& p, const GridDensity& q)
{
  const auto c = common_grid(p, q);
  return hellinger(c.grid, c.p, c.q);
}

double
l2_distance(std::span<const double> grid, std::span<const double> p, std::span<const double> q)
{
  require_same_length(grid, p, q);
  std::vector<double> integrand(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = p[i] - q[i];
    integrand[i] = d * d;
  }
  return std::sqrt(std::max(simpson(grid, integrand), 0.0));
}

double
l2_distance(const GridDensity& p, const GridDensity& q)
{
  const auto c = common_grid(p, q);
  return l2_distance(c.grid, c.p, c.q);
}

} // namespace wfdens
