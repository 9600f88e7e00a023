#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace wfdens {

//! Composite Simpson rule over tabulated values on a strictly increasing
//! (possibly non-uniform) grid. An even number of points closes the last
//! interval with the quadratic through the final three nodes.
double simpson(std::span<const double> x, std::span<const double> y);

//! Composite Simpson rule of f over [lo, hi] with `intervals` (even) panels.
double simpson(const std::function<double(double)>& f,
               double lo,
               double hi,
               int intervals);

std::vector<double> uniform_grid(double lo, double hi, std::size_t points);

//! Linear interpolation on a strictly increasing grid; zero outside it.
double interpolate_linear(std::span<const double> x,
                          std::span<const double> y,
                          double at);

//! Seed of the independent stream number `index` derived from a master seed.
//! Streams depend only on (seed, index), never on scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

//! Runs body(i) for i in [0, n) across worker threads. `workers` = 0 picks
//! the hardware concurrency.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

} // namespace wfdens
