#include "wfdens/densities.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/numerics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

namespace wfdens {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 8> kModelNames{{
  {ModelKind::ExactMC, "ExactMC"},
  {ModelKind::AE, "AE"},
  {ModelKind::AECorrected, "AECorrected"},
  {ModelKind::GaussA, "GaussA"},
  {ModelKind::GaussianMoment, "GaussianMoment"},
  {ModelKind::BetaMoment, "BetaMoment"},
  {ModelKind::MutationAE, "MutationAE"},
  {ModelKind::SelectionAE, "SelectionAE"},
}};

void
require_open(double v, const char* name)
{
  if (!(v > 0.0 && v < 1.0)) {
    std::ostringstream os;
    os << name << " = " << v << " must lie in (0, 1)";
    throw DomainError(os.str());
  }
}

void
require_time(double t)
{
  if (!(t > 0.0) || !std::isfinite(t))
    throw DomainError("t must be positive and finite");
}

double
wf_forward(double x)
{
  return 2.0 * std::asin(std::sqrt(x));
}

double
gaussian_pdf(double x, double mean, double variance)
{
  const double d = x - mean;
  return std::exp(-d * d / (2.0 * variance)) / std::sqrt(2.0 * std::numbers::pi * variance);
}

// AE-type density with boundary exponents shifted by the drift:
// x0^{1/4-e0} (1-x0)^{1/4-e1} / (x^{3/4-e0} (1-x)^{3/4-e1}) times the kernel.
// Zero shifts give exactly the neutral arithmetic.
double
ae_family(double x0, double x, double t, double shift0, double shift1)
{
  require_open(x0, "x0");
  require_open(x, "x");
  require_time(t);
  const double dy = wf_forward(x) - wf_forward(x0);
  const double log_prefactor = (0.25 - shift0) * std::log(x0) +
                               (0.25 - shift1) * std::log1p(-x0) -
                               (0.75 - shift0) * std::log(x) -
                               (0.75 - shift1) * std::log1p(-x);
  return std::exp(log_prefactor - dy * dy / (2.0 * t)) /
         std::sqrt(2.0 * std::numbers::pi * t);
}

} // namespace

std::string_view
to_string(ModelKind kind) noexcept
{
  for (const auto& [k, name] : kModelNames) {
    if (k == kind)
      return name;
  }
  return "unknown";
}

ModelKind
parse_model_kind(std::string_view name)
{
  for (const auto& [k, n] : kModelNames) {
    if (n == name)
      return k;
  }
  throw ParameterError("unknown density model '" + std::string(name) + "'");
}

std::string_view
to_string(VarianceForm form) noexcept
{
  return form == VarianceForm::Derived ? "derived" : "literal";
}

VarianceForm
parse_variance_form(std::string_view name)
{
  if (name == "derived")
    return VarianceForm::Derived;
  if (name == "literal")
    return VarianceForm::Literal;
  throw ParameterError("unknown variance form '" + std::string(name) + "'");
}

void
DensityModel::validate() const
{
  spec.validate();
  switch (kind) {
    case ModelKind::MutationAE:
      if (spec.alpha != 0.0 || spec.h != 0.0)
        throw ParameterError("MutationAE is the purely mutational regime: alpha = h = 0");
      break;
    case ModelKind::SelectionAE:
      if (spec.beta1 != 0.0 || spec.beta2 != 0.0)
        throw ParameterError("SelectionAE assumes no mutation: beta1 = beta2 = 0");
      break;
    case ModelKind::ExactMC:
      if (mc.n_paths < 2 || mc.k_steps < 2)
        throw ParameterError("ExactMC needs n_paths >= 2 and k_steps >= 2");
      break;
    default:
      break;
  }
}

std::vector<double>
GridDensity::pdf() const
{
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = values[i] / norm_constant;
  return out;
}

double
ae_density(double x0, double x, double t)
{
  return ae_family(x0, x, t, 0.0, 0.0);
}

double
chord_average_nu(double x0, double x)
{
  require_open(x0, "x0");
  require_open(x, "x");
  const auto spec = DiffusionSpec::neutral();
  const double y0 = wf_forward(x0);
  const double y = wf_forward(x);
  if (y == y0)
    return nu(spec, y0);
  return simpson([&](double u) { return nu(spec, u); }, y0, y, 64) / (y - y0);
}

double
ae_corrected_density(double x0, double x, double t)
{
  const double base = ae_density(x0, x, t);
  const double factor = 1.0 - 0.5 * t * chord_average_nu(x0, x);
  return factor > 0.0 ? base * factor : 0.0;
}

double
gauss_approx_density(double x0, double x, double t)
{
  require_open(x0, "x0");
  require_time(t);
  return gaussian_pdf(x, x0, t * x0 * (1.0 - x0));
}

bool
gauss_approx_in_validity_range(double x0, double x, double t, double c)
{
  return std::abs(x - x0) <= c * t;
}

double
moment_variance(double x0, double t, VarianceForm form)
{
  require_open(x0, "x0");
  if (!(t >= 0.0))
    throw DomainError("t must be nonnegative");
  const double spread = x0 * (1.0 - x0);
  return form == VarianceForm::Derived ? -std::expm1(-t) * spread : std::exp(-t) * spread;
}

double
gaussian_moment_density(double x0, double x, double t, VarianceForm form)
{
  require_time(t);
  const double variance = moment_variance(x0, t, form);
  if (!(variance > 0.0))
    throw ParameterError("moment-matched Gaussian needs a positive variance");
  return gaussian_pdf(x, x0, variance);
}

BetaParameters
beta_moment_parameters(double x0, double t, VarianceForm form)
{
  const double mean = x0;
  const double variance = moment_variance(x0, t, form);
  const double spread = mean * (1.0 - mean);
  if (!(variance < spread) || !(variance > 0.0)) {
    std::ostringstream os;
    os << "moment-matched Beta undefined: Var = " << variance
       << " must satisfy 0 < Var < E(1-E) = " << spread << " (x0=" << x0
       << ", t=" << t << ")";
    throw ParameterError(os.str());
  }
  const double ratio = spread / variance;
  return {ratio * mean, ratio * (1.0 - mean)};
}

double
beta_moment_density(double x0, double x, double t, VarianceForm form)
{
  require_time(t);
  const auto p = beta_moment_parameters(x0, t, form);
  if (!(x > 0.0 && x < 1.0))
    return 0.0;
  const double log_beta = std::lgamma(p.alpha) + std::lgamma(p.beta) - std::lgamma(p.alpha + p.beta);
  return std::exp((p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) - log_beta);
}

double
mutation_ae_density(double x0, double x, double t, double beta1, double beta2)
{
  if (!(beta1 >= 0.0) || !(beta2 >= 0.0))
    throw ParameterError("mutation rates must be >= 0");
  return ae_family(x0, x, t, beta2, beta1);
}

double
selection_ae_density(double x0, double x, double t, double alpha, double h)
{
  return ae_family(x0, x, t, h, h - alpha);
}

std::vector<double>
GridSpec::make() const
{
  if (!(epsilon > 0.0 && epsilon < 0.5))
    throw GridError("grid epsilon must lie in (0, 1/2)");
  return uniform_grid(epsilon, 1.0 - epsilon, points);
}

GridDensity
evaluate_model(const DensityModel& model,
               double x0,
               double t,
               std::span<const double> grid,
               unsigned workers)
{
  model.validate();
  GridDensity out;
  out.grid.assign(grid.begin(), grid.end());
  out.model = model;
  out.x0 = x0;
  out.t = t;
  out.values.resize(grid.size());

  if (model.kind == ModelKind::ExactMC) {
    const auto curve = exact_density_curve(model.spec, x0, t, grid, model.mc, workers);
    out.std_error.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      out.values[i] = curve[i].value;
      out.std_error[i] = curve[i].std_error;
    }
    return out;
  }

  // Fail on bad parameters before touching the grid.
  if (model.kind == ModelKind::BetaMoment)
    beta_moment_parameters(x0, t, model.variance_form);

  const auto& s = model.spec;
  auto eval = [&](double x) {
    switch (model.kind) {
      case ModelKind::AE:
        return ae_density(x0, x, t);
      case ModelKind::AECorrected:
        return ae_corrected_density(x0, x, t);
      case ModelKind::GaussA:
        return gauss_approx_density(x0, x, t);
      case ModelKind::GaussianMoment:
        return gaussian_moment_density(x0, x, t, model.variance_form);
      case ModelKind::BetaMoment:
        return beta_moment_density(x0, x, t, model.variance_form);
      case ModelKind::MutationAE:
        return mutation_ae_density(x0, x, t, s.beta1, s.beta2);
      case ModelKind::SelectionAE:
        return selection_ae_density(x0, x, t, s.alpha, s.h);
      case ModelKind::ExactMC:
        break;
    }
    throw ParameterError("unhandled density model");
  };
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.values[i] = eval(grid[i]);
  return out;
}

GridDensity
normalize(GridDensity raw)
{
  if (raw.grid.size() < 3 || raw.grid.size() != raw.values.size())
    throw GridError("normalize: need at least three grid points with matching values");
  if (!(raw.grid.front() > 0.0 && raw.grid.back() < 1.0))
    throw GridError("normalize: grid must lie inside (0, 1)");
  for (std::size_t i = 0; i < raw.values.size(); ++i) {
    if (!std::isfinite(raw.values[i]))
      throw NumericError("normalize: non-finite density value on the grid");
    if (i > 0 && !(raw.grid[i] > raw.grid[i - 1]))
      throw GridError("normalize: grid must be strictly increasing");
  }
  const double constant = simpson(raw.grid, raw.values);
  if (!(constant > 0.0) || !std::isfinite(constant)) {
    std::ostringstream os;
    os << "normalize: Simpson constant " << constant << " is not finite and positive";
    throw NumericError(os.str());
  }
  raw.norm_constant = constant;
  return raw;
}

} // namespace wfdens
