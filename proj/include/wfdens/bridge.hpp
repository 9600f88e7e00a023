#pragma once

#include "wfdens/diffusion.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wfdens {

//! Discretised standard Brownian bridge B(u) = W(u) - u W(1) on a uniform
//! grid of [0, 1]. Both endpoints are exactly zero.
struct BridgePath
{
  std::vector<double> grid;
  std::vector<double> values;
};

BridgePath sample_bridge(std::size_t k_steps, std::uint64_t seed);

struct McEstimate
{
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  //! Fraction of integrand evaluations that left the state space or hit the
  //! potential cap.
  double clamped_fraction = 0.0;
};

struct BridgeMcOptions
{
  std::size_t n_paths = 500;
  std::size_t k_steps = 100;
  std::uint64_t seed = 0;
  //! Bridge excursions outside (F(0), F(1)) are pulled back this far inside.
  double boundary_offset = 1e-6;
  double potential_cap = kDefaultNuCap;
};

//! E exp(-t/2 int_0^1 pot((1-u) F(x0) + u F(x) + sqrt(t) B(u)) du), the path
//! integral taken by the trapezoid rule on the bridge grid. Path i uses
//! derive_seed(options.seed, i).
McEstimate mc_functional(const DiffusionSpec& spec,
                         double x0,
                         double x,
                         double t,
                         const BridgeMcOptions& options = {});

struct DensityEstimate
{
  double value = 0.0;
  double std_error = 0.0;
  McEstimate functional;
};

//! Transition density p_t(x0, x) from the bridge representation:
//! q_t(F(x) - F(x0)) exp(M(F(x)) - M(F(x0))) / sigma(x) times the functional.
DensityEstimate exact_density(const DiffusionSpec& spec,
                              double x0,
                              double x,
                              double t,
                              const BridgeMcOptions& options = {});

//! Exact density over a grid of x with one bridge ensemble shared by every
//! grid point (common random numbers).
std::vector<DensityEstimate> exact_density_curve(const DiffusionSpec& spec,
                                                 double x0,
                                                 double t,
                                                 std::span<const double> grid,
                                                 const BridgeMcOptions& options = {},
                                                 unsigned workers = 0);

} // namespace wfdens
