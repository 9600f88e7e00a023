#include "wfdens/numerics.hpp"

#include "wfdens/errors.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace wfdens {

namespace {

// Integral over [x0, x2] of the quadratic through three points.
double
simpson_pair(double x0, double x1, double x2, double y0, double y1, double y2)
{
  const double h0 = x1 - x0;
  const double h1 = x2 - x1;
  const double hsum = h0 + h1;
  return hsum / 6.0 *
         (y0 * (2.0 - h1 / h0) + y1 * hsum * hsum / (h0 * h1) + y2 * (2.0 - h0 / h1));
}

// Integral over [x1, x2] of the quadratic through three points.
double
last_interval(double x0, double x1, double x2, double y0, double y1, double y2)
{
  const double h0 = x1 - x0;
  const double h1 = x2 - x1;
  const double alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
  const double beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
  const double eta = h1 * h1 * h1 / (6.0 * h0 * (h0 + h1));
  return alpha * y2 + beta * y1 - eta * y0;
}

} // namespace

double
simpson(std::span<const double> x, std::span<const double> y)
{
  if (x.size() != y.size())
    throw GridError("simpson: grid and values differ in length");
  const std::size_t n = x.size();
  if (n < 2)
    return 0.0;
  if (n == 2)
    return 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
  const std::size_t odd_end = (n % 2 == 1) ? n : n - 1;
  double total = 0.0;
  for (std::size_t i = 0; i + 2 < odd_end; i += 2)
    total += simpson_pair(x[i], x[i + 1], x[i + 2], y[i], y[i + 1], y[i + 2]);
  if (odd_end != n)
    total += last_interval(x[n - 3], x[n - 2], x[n - 1], y[n - 3], y[n - 2], y[n - 1]);
  return total;
}

double
simpson(const std::function<double(double)>& f, double lo, double hi, int intervals)
{
  if (intervals < 2 || intervals % 2 != 0)
    throw GridError("simpson: interval count must be even and >= 2");
  const double h = (hi - lo) / intervals;
  double sum = f(lo) + f(hi);
  for (int i = 1; i < intervals; ++i)
    sum += (i % 2 == 1 ? 4.0 : 2.0) * f(lo + i * h);
  return sum * h / 3.0;
}

std::vector<double>
uniform_grid(double lo, double hi, std::size_t points)
{
  if (points < 2 || !(hi > lo))
    throw GridError("uniform_grid: need hi > lo and at least two points");
  std::vector<double> grid(points);
  const double step = (hi - lo) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i)
    grid[i] = lo + step * static_cast<double>(i);
  grid.back() = hi;
  return grid;
}

double
interpolate_linear(std::span<const double> x, std::span<const double> y, double at)
{
  if (x.empty() || at < x.front() || at > x.back())
    return 0.0;
  const auto it = std::lower_bound(x.begin(), x.end(), at);
  const auto k = static_cast<std::size_t>(it - x.begin());
  if (x[k] == at)
    return y[k];
  const double w = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return y[k - 1] + w * (y[k] - y[k - 1]);
}

std::uint64_t
derive_seed(std::uint64_t seed, std::uint64_t index) noexcept
{
  // splitmix64 finaliser over seed xor a scrambled index
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(index));
}

void
parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned workers)
{
  if (workers == 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure)
              failure = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace wfdens
