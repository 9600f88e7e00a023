#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace wfdens {

//! Beta(t/b + 1, (1-t)/b + 1) pdf evaluated at x; zero for x outside (0, 1).
double beta_kernel(double t, double b, double x);

//! Squared L2 norm of the kernel in x, i.e. int K_{t,b}(x)^2 dx.
double beta_kernel_sq_norm(double t, double b);

//! Estimator values (1/n) sum_k K_{t,b}(X_k) at each grid point. Sample
//! points at exactly 0 or 1 add nothing but still count in n.
std::vector<double> beta_kernel_estimate(std::span<const double> sample,
                                         double b,
                                         std::span<const double> grid);

//! Variance majorant used in the Lepski comparisons.
//!  Global:    sqrt(log n / (n sqrt(b'))) at every point.
//!  Pointwise: sqrt(log n * int K_{t,b'}^2 / n), the exact kernel norm at t,
//!             which grows like 1/b' at the boundary.
//!  Empirical: Bernstein-type bound sqrt(log n * s^2 / n) + log n * max K / (3n)
//!             with s^2 the sample variance of K_{t,b'}(X_k).
enum class LepskiMajorant
{
  Global,
  Pointwise,
  Empirical
};

std::string_view to_string(LepskiMajorant m) noexcept;
LepskiMajorant parse_lepski_majorant(std::string_view name);

struct LepskiOptions
{
  double b_max = 0.5;
  std::size_t levels = 12;
  double c = 1.5;
  LepskiMajorant majorant = LepskiMajorant::Empirical;
};

//! b_k = b_max 2^{-k}, k = 0 .. levels-1 (decreasing).
std::vector<double> geometric_b_grid(double b_max, std::size_t levels);

struct LepskiComparison
{
  std::size_t candidate; //!< index into b_grid
  std::size_t smaller;   //!< index of the smaller b' compared against
  double sup_difference;
  double threshold_ratio; //!< max over t of |f_b - f_b'| / threshold(t, b')
  bool passed;
};

struct LepskiSelection
{
  double b = 0.0;
  std::size_t selected_index = 0;
  std::vector<double> b_grid;
  std::vector<LepskiComparison> table;
  //! Set when no candidate passed and the smallest b was used.
  bool fallback = false;
};

//! Largest b in the grid whose estimate stays within C times the variance
//! majorant of every estimate with smaller b'.
LepskiSelection lepski_select_b(std::span<const double> sample,
                                std::span<const double> b_grid,
                                std::span<const double> grid,
                                const LepskiOptions& options = {});

struct BetaKernelEstimate
{
  std::size_t sample_size = 0;
  double b = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> b_grid;
  std::size_t selected_index = 0;
  LepskiSelection selection;
};

//! Fixed-b estimate. Throws ParameterError on an empty sample.
BetaKernelEstimate kde_evaluate(std::span<const double> sample,
                                double b,
                                std::span<const double> grid);

//! Lepski-selected estimate, the adaptive reference density.
BetaKernelEstimate kde_adaptive(std::span<const double> sample,
                                std::span<const double> grid,
                                const LepskiOptions& options = {});

//! 512 uniform points on [0, 1].
std::vector<double> default_kde_grid();

//! CSV `x,density` at `csv_path` plus a JSON sidecar (same stem, .json) with
//! the selected b, the candidate grid and the Lepski comparison table.
void write_kde_estimate(const BetaKernelEstimate& estimate, const std::filesystem::path& csv_path);

} // namespace wfdens
