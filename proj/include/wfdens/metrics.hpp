#pragma once

#include "wfdens/densities.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wfdens {

struct DistanceRecord
{
  double x0 = 0.0;
  double t = 0.0;
  std::string model;
  double hellinger = 0.0;
  double l2 = 0.0;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  std::size_t grid_points = 0;
};

//! Two densities tabulated on one grid.
struct CommonGrid
{
  std::vector<double> grid;
  std::vector<double> p;
  std::vector<double> q;
};

//! Identical grids are used as they are. Otherwise both densities are
//! linearly interpolated onto a uniform grid of the overlap with as many
//! points as the finer input. Throws GridError if the supports are disjoint.
CommonGrid common_grid(const GridDensity& p, const GridDensity& q);

//! H = sqrt(1/2 int (sqrt p - sqrt q)^2), Simpson on the common grid,
//! clamped to [0, 1].
double hellinger(const GridDensity& p, const GridDensity& q);
double hellinger(std::span<const double> grid,
                 std::span<const double> p,
                 std::span<const double> q);

//! sqrt(int (p - q)^2), Simpson on the common grid.
double l2_distance(const GridDensity& p, const GridDensity& q);
double l2_distance(std::span<const double> grid,
                   std::span<const double> p,
                   std::span<const double> q);

} // namespace wfdens
