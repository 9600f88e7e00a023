#include "wfdens/kde.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/io.hpp"
#include "wfdens/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

namespace wfdens {

namespace {

double
log_beta(double p, double q)
{
  return std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q);
}

void
require_bandwidth(double b)
{
  if (!(b > 0.0) || !std::isfinite(b))
    throw ParameterError("beta kernel smoothing parameter b must be positive");
}

// Interior sample points with their logs precomputed.
struct LoggedSample
{
  std::size_t n = 0; // includes boundary atoms
  std::vector<double> log_x;
  std::vector<double> log_1mx;
};

LoggedSample
log_sample(std::span<const double> sample)
{
  if (sample.empty())
    throw ParameterError("kernel density estimate of an empty sample");
  LoggedSample out;
  out.n = sample.size();
  for (double x : sample) {
    if (!(x >= 0.0 && x <= 1.0))
      throw DomainError("beta kernel sample values must lie in [0, 1]");
    if (x > 0.0 && x < 1.0) {
      out.log_x.push_back(std::log(x));
      out.log_1mx.push_back(std::log1p(-x));
    }
  }
  return out;
}

struct KernelSums
{
  std::vector<double> mean;    // (1/n) sum K
  std::vector<double> mean_sq; // (1/n) sum K^2
};

KernelSums
kernel_sums(const LoggedSample& s, double b, std::span<const double> grid, bool with_squares)
{
  KernelSums out;
  out.mean.assign(grid.size(), 0.0);
  if (with_squares)
    out.mean_sq.assign(grid.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(s.n);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    const double p = t / b;
    const double q = (1.0 - t) / b;
    const double norm = log_beta(p + 1.0, q + 1.0);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < s.log_x.size(); ++k) {
      const double v = std::exp(p * s.log_x[k] + q * s.log_1mx[k] - norm);
      sum += v;
      sum_sq += v * v;
    }
    out.mean[g] = sum * inv_n;
    if (with_squares)
      out.mean_sq[g] = sum_sq * inv_n;
  }
  return out;
}

std::vector<double>
estimate(const LoggedSample& s, double b, std::span<const double> grid)
{
  return kernel_sums(s, b, grid, false).mean;
}

// Kernel maximum over x, attained at x = t.
double
kernel_peak(double t, double b)
{
  const double p = t / b;
  const double q = (1.0 - t) / b;
  const double lp = p > 0.0 ? p * std::log(t) : 0.0;
  const double lq = q > 0.0 ? q * std::log1p(-t) : 0.0;
  return std::exp(lp + lq - log_beta(p + 1.0, q + 1.0));
}

} // namespace

double
beta_kernel(double t, double b, double x)
{
  require_bandwidth(b);
  if (!(t >= 0.0 && t <= 1.0))
    throw DomainError("beta kernel evaluation point must lie in [0, 1]");
  if (!(x > 0.0 && x < 1.0))
    return 0.0;
  const double p = t / b;
  const double q = (1.0 - t) / b;
  return std::exp(p * std::log(x) + q * std::log1p(-x) - log_beta(p + 1.0, q + 1.0));
}

double
beta_kernel_sq_norm(double t, double b)
{
  require_bandwidth(b);
  const double p = t / b;
  const double q = (1.0 - t) / b;
  return std::exp(log_beta(2.0 * p + 1.0, 2.0 * q + 1.0) - 2.0 * log_beta(p + 1.0, q + 1.0));
}

std::vector<double>
beta_kernel_estimate(std::span<const double> sample, double b, std::span<const double> grid)
{
  require_bandwidth(b);
  return estimate(log_sample(sample), b, grid);
}

std::string_view
to_string(LepskiMajorant m) noexcept
{
  switch (m) {
    case LepskiMajorant::Global:
      return "global";
    case LepskiMajorant::Pointwise:
      return "pointwise";
    case LepskiMajorant::Empirical:
      return "empirical";
  }
  return "unknown";
}

LepskiMajorant
parse_lepski_majorant(std::string_view name)
{
  if (name == "global")
    return LepskiMajorant::Global;
  if (name == "pointwise")
    return LepskiMajorant::Pointwise;
  if (name == "empirical")
    return LepskiMajorant::Empirical;
  throw ParameterError("unknown Lepski majorant '" + std::string(name) + "'");
}

std::vector<double>
geometric_b_grid(double b_max, std::size_t levels)
{
  require_bandwidth(b_max);
  if (levels == 0)
    throw ParameterError("b grid needs at least one level");
  std::vector<double> out(levels);
  for (std::size_t k = 0; k < levels; ++k)
    out[k] = std::ldexp(b_max, -static_cast<int>(k));
  return out;
}

LepskiSelection
lepski_select_b(std::span<const double> sample,
                std::span<const double> b_grid,
                std::span<const double> grid,
                const LepskiOptions& options)
{
  if (b_grid.empty())
    throw ParameterError("Lepski selection needs a non-empty b grid");
  if (!(options.c > 0.0))
    throw ParameterError("Lepski constant C must be positive");
  const auto logged = log_sample(sample);

  LepskiSelection sel;
  sel.b_grid.assign(b_grid.begin(), b_grid.end());
  for (double b : sel.b_grid)
    require_bandwidth(b);
  std::sort(sel.b_grid.begin(), sel.b_grid.end(), std::greater<>());

  const std::size_t levels = sel.b_grid.size();
  const bool empirical = options.majorant == LepskiMajorant::Empirical;
  std::vector<std::vector<double>> estimates(levels);
  std::vector<std::vector<double>> second_moments(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    auto sums = kernel_sums(logged, sel.b_grid[k], grid, empirical);
    estimates[k] = std::move(sums.mean);
    second_moments[k] = std::move(sums.mean_sq);
  }

  const double n = static_cast<double>(logged.n);
  const double log_n = std::log(n);
  // thresholds[k][g]: C times the majorant of the estimate with b_grid[k]
  std::vector<std::vector<double>> thresholds(levels, std::vector<double>(grid.size()));
  for (std::size_t k = 0; k < levels; ++k) {
    const double b = sel.b_grid[k];
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double bound = 0.0;
      switch (options.majorant) {
        case LepskiMajorant::Global:
          bound = std::sqrt(log_n / (n * std::sqrt(b)));
          break;
        case LepskiMajorant::Pointwise:
          bound = std::sqrt(log_n * beta_kernel_sq_norm(grid[g], b) / n);
          break;
        case LepskiMajorant::Empirical: {
          const double m = estimates[k][g];
          const double var = std::max(second_moments[k][g] - m * m, 0.0) / n;
          bound = std::sqrt(log_n * var) + log_n * kernel_peak(grid[g], b) / (3.0 * n);
          break;
        }
      }
      thresholds[k][g] = options.c * bound;
    }
  }

  std::size_t chosen = levels - 1;
  bool found = false;
  for (std::size_t i = 0; i + 1 < levels; ++i) {
    bool all_pass = true;
    for (std::size_t j = i + 1; j < levels; ++j) {
      double sup = 0.0;
      double ratio = 0.0;
      for (std::size_t g = 0; g < grid.size(); ++g) {
        const double diff = std::abs(estimates[i][g] - estimates[j][g]);
        sup = std::max(sup, diff);
        ratio = std::max(ratio, thresholds[j][g] > 0.0 ? diff / thresholds[j][g]
                                                       : (diff > 0.0 ? INFINITY : 0.0));
      }
      const bool passed = ratio <= 1.0;
      sel.table.push_back({i, j, sup, ratio, passed});
      all_pass = all_pass && passed;
    }
    if (all_pass && !found) {
      chosen = i;
      found = true;
    }
  }
  sel.selected_index = chosen;
  sel.b = sel.b_grid[chosen];
  sel.fallback = !found && levels > 1;
  return sel;
}

BetaKernelEstimate
kde_evaluate(std::span<const double> sample, double b, std::span<const double> grid)
{
  BetaKernelEstimate out;
  out.values = beta_kernel_estimate(sample, b, grid);
  out.sample_size = sample.size();
  out.b = b;
  out.grid.assign(grid.begin(), grid.end());
  out.b_grid = {b};
  out.selected_index = 0;
  out.selection.b = b;
  out.selection.b_grid = {b};
  return out;
}

BetaKernelEstimate
kde_adaptive(std::span<const double> sample,
             std::span<const double> grid,
             const LepskiOptions& options)
{
  const auto b_grid = geometric_b_grid(options.b_max, options.levels);
  auto selection = lepski_select_b(sample, b_grid, grid, options);
  auto out = kde_evaluate(sample, selection.b, grid);
  out.b_grid = selection.b_grid;
  out.selected_index = selection.selected_index;
  out.selection = std::move(selection);
  return out;
}

std::vector<double>
default_kde_grid()
{
  return uniform_grid(0.0, 1.0, 512);
}

void
write_kde_estimate(const BetaKernelEstimate& estimate, const std::filesystem::path& csv_path)
{
  std::ostringstream os;
  io::write_schema_line(os, "wfdens.kde");
  os << "x,density\n";
  for (std::size_t i = 0; i < estimate.grid.size(); ++i)
    os << io::format_double(estimate.grid[i]) << ',' << io::format_double(estimate.values[i]) << '\n';
  io::write_text(csv_path, os.str());

  nlohmann::json table = nlohmann::json::array();
  for (const auto& c : estimate.selection.table) {
    table.push_back({{"b", estimate.selection.b_grid[c.candidate]},
                     {"b_prime", estimate.selection.b_grid[c.smaller]},
                     {"sup_difference", c.sup_difference},
                     {"threshold_ratio", c.threshold_ratio},
                     {"passed", c.passed}});
  }
  auto sidecar = csv_path;
  sidecar.replace_extension(".json");
  io::write_json(sidecar,
                 {{"schema", "wfdens.kde"},
                  {"schema_version", io::kSchemaVersion},
                  {"sample_size", estimate.sample_size},
                  {"b", estimate.b},
                  {"b_grid", estimate.b_grid},
                  {"selected_index", estimate.selected_index},
                  {"fallback", estimate.selection.fallback},
                  {"comparisons", table}});
}

} // namespace wfdens
