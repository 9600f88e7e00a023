#include "wfdens/bridge.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/numerics.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace wfdens {

namespace {

void
require_density_args(double x0, double x, double t)
{
  if (!(x0 > 0.0 && x0 < 1.0) || !(x > 0.0 && x < 1.0)) {
    std::ostringstream os;
    os << "bridge density needs x0, x in (0, 1) (got x0=" << x0 << ", x=" << x << ")";
    throw DomainError(os.str());
  }
  if (!(t > 0.0))
    throw DomainError("bridge density needs t > 0");
}

void
require_options(const BridgeMcOptions& options)
{
  if (options.n_paths < 2)
    throw ParameterError("bridge Monte Carlo needs at least two paths");
  if (options.k_steps < 2)
    throw ParameterError("bridge discretisation needs k_steps >= 2");
}

// Bridge values only; the grid is implicit (u_j = j / k).
void
fill_bridge(std::span<double> values, std::uint64_t seed)
{
  const std::size_t k = values.size() - 1;
  std::mt19937_64 engine(seed);
  std::normal_distribution<double> normal;
  const double scale = std::sqrt(1.0 / static_cast<double>(k));
  values[0] = 0.0;
  for (std::size_t j = 1; j <= k; ++j)
    values[j] = values[j - 1] + scale * normal(engine);
  const double w1 = values[k];
  for (std::size_t j = 1; j < k; ++j)
    values[j] -= (static_cast<double>(j) / static_cast<double>(k)) * w1;
  values[k] = 0.0;
}

struct BridgeEnsemble
{
  std::size_t n_paths;
  std::size_t stride; // k_steps + 1
  std::vector<double> values;

  std::span<const double> path(std::size_t i) const
  {
    return {values.data() + i * stride, stride};
  }
};

BridgeEnsemble
make_ensemble(const BridgeMcOptions& options)
{
  BridgeEnsemble ensemble{options.n_paths, options.k_steps + 1, {}};
  ensemble.values.resize(ensemble.n_paths * ensemble.stride);
  for (std::size_t i = 0; i < options.n_paths; ++i) {
    fill_bridge({ensemble.values.data() + i * ensemble.stride, ensemble.stride},
                derive_seed(options.seed, i));
  }
  return ensemble;
}

struct PathIntegral
{
  double integral;
  std::size_t clamped;
};

PathIntegral
path_integral(const Diffusion& diffusion,
              std::span<const double> bridge,
              double y0,
              double y,
              double sqrt_t,
              const BridgeMcOptions& options)
{
  const std::size_t k = bridge.size() - 1;
  const double lo = diffusion.lower() + options.boundary_offset;
  const double hi = diffusion.upper() - options.boundary_offset;
  double sum = 0.0;
  std::size_t clamped = 0;
  for (std::size_t j = 0; j <= k; ++j) {
    const double u = static_cast<double>(j) / static_cast<double>(k);
    double point = (1.0 - u) * y0 + u * y + sqrt_t * bridge[j];
    bool outside = false;
    if (point < lo) {
      point = lo;
      outside = true;
    } else if (point > hi) {
      point = hi;
      outside = true;
    }
    const auto pot = diffusion.potential(point, options.potential_cap);
    if (outside || pot.clamped)
      ++clamped;
    sum += (j == 0 || j == k) ? 0.5 * pot.value : pot.value;
  }
  return {sum / static_cast<double>(k), clamped};
}

McEstimate
functional_from_ensemble(const Diffusion& diffusion,
                         const BridgeEnsemble& ensemble,
                         double y0,
                         double y,
                         double t,
                         const BridgeMcOptions& options)
{
  const double sqrt_t = std::sqrt(t);
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < ensemble.n_paths; ++i) {
    const auto pi = path_integral(diffusion, ensemble.path(i), y0, y, sqrt_t, options);
    clamped += pi.clamped;
    const double value = std::exp(-0.5 * t * pi.integral);
    // Welford
    const double delta = value - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (value - mean);
  }
  const std::size_t evaluations = ensemble.n_paths * ensemble.stride;
  if (clamped == evaluations) {
    throw McDegeneracyError("every bridge evaluation was clamped; the path "
                            "functional carries no information");
  }
  McEstimate estimate;
  estimate.mean = mean;
  const double n = static_cast<double>(ensemble.n_paths);
  estimate.std_error = std::sqrt(m2 / (n - 1.0)) / std::sqrt(n);
  estimate.n_paths = ensemble.n_paths;
  estimate.clamped_fraction = static_cast<double>(clamped) / static_cast<double>(evaluations);
  return estimate;
}

DensityEstimate
density_from_functional(const Diffusion& diffusion,
                        double y0,
                        double x,
                        double y,
                        double t,
                        const McEstimate& functional)
{
  const double dy = y - y0;
  const double kernel = std::exp(-dy * dy / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * t);
  const double factor = kernel * std::exp(diffusion.m_diff(y0, y)) / diffusion.sigma(x);
  return {factor * functional.mean, factor * functional.std_error, functional};
}

} // namespace

BridgePath
sample_bridge(std::size_t k_steps, std::uint64_t seed)
{
  if (k_steps < 2)
    throw ParameterError("sample_bridge needs k_steps >= 2");
  BridgePath path;
  path.grid = uniform_grid(0.0, 1.0, k_steps + 1);
  path.values.resize(k_steps + 1);
  fill_bridge(path.values, seed);
  return path;
}

McEstimate
mc_functional(const DiffusionSpec& spec,
              double x0,
              double x,
              double t,
              const BridgeMcOptions& options)
{
  require_density_args(x0, x, t);
  require_options(options);
  const Diffusion diffusion(spec);
  const auto ensemble = make_ensemble(options);
  return functional_from_ensemble(
    diffusion, ensemble, diffusion.forward(x0), diffusion.forward(x), t, options);
}

DensityEstimate
exact_density(const DiffusionSpec& spec,
              double x0,
              double x,
              double t,
              const BridgeMcOptions& options)
{
  require_density_args(x0, x, t);
  require_options(options);
  const Diffusion diffusion(spec);
  const auto ensemble = make_ensemble(options);
  const double y0 = diffusion.forward(x0);
  const double y = diffusion.forward(x);
  const auto functional = functional_from_ensemble(diffusion, ensemble, y0, y, t, options);
  return density_from_functional(diffusion, y0, x, y, t, functional);
}

std::vector<DensityEstimate>
exact_density_curve(const DiffusionSpec& spec,
                    double x0,
                    double t,
                    std::span<const double> grid,
                    const BridgeMcOptions& options,
                    unsigned workers)
{
  for (double x : grid)
    require_density_args(x0, x, t);
  require_options(options);
  const Diffusion diffusion(spec);
  const auto ensemble = make_ensemble(options);
  const double y0 = diffusion.forward(x0);
  std::vector<DensityEstimate> out(grid.size());
  parallel_for(
    grid.size(),
    [&](std::size_t i) {
      const double y = diffusion.forward(grid[i]);
      const auto functional = functional_from_ensemble(diffusion, ensemble, y0, y, t, options);
      out[i] = density_from_functional(diffusion, y0, grid[i], y, t, functional);
    },
    workers);
  return out;
}

} // namespace wfdens
