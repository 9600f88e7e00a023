#include "wfdens/diffusion.hpp"

#include "wfdens/errors.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace wfdens {

namespace {

constexpr double kQuadratureTolerance = 1e-10;
constexpr double kInverseTolerance = 1e-10;

void
require_unit_interval(double x, const char* what)
{
  if (!(x >= 0.0 && x <= 1.0)) {
    std::ostringstream os;
    os << what << ": frequency " << x << " outside [0, 1]";
    throw DomainError(os.str());
  }
}

void
require_integrable(const DiffusionSpec& spec)
{
  if (!(spec.a < 1.0 && spec.b < 1.0)) {
    throw DomainError("Lamperti transform needs a < 1 and b < 1 so that "
                      "1/sigma is integrable at the boundaries");
  }
}

// int_0^z u^{-a} (1-u)^{-b} du for 0 <= z <= 1/2. The substitution u = v^p,
// p = 1/(1-a), removes the singularity at 0; the integrand left is
// p (1 - v^p)^{-b}, bounded on the half interval.
double
half_integral(double a, double b, double z)
{
  if (z <= 0.0)
    return 0.0;
  const double p = 1.0 / (1.0 - a);
  const double upper = std::pow(z, 1.0 - a);
  auto integrand = [p, b](double v) { return p * std::pow(1.0 - std::pow(v, p), -b); };
  double error = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
    integrand, 0.0, upper, 15, 1e-11, &error);
  if (!std::isfinite(value) || error > kQuadratureTolerance * std::max(1.0, std::abs(value))) {
    std::ostringstream os;
    os << "quadrature of 1/sigma failed: estimated error " << error
       << " exceeds " << kQuadratureTolerance;
    throw QuadratureError(os.str());
  }
  return value;
}

double
forward_quadrature(const DiffusionSpec& spec, double x, double upper)
{
  if (x <= 0.5)
    return half_integral(spec.a, spec.b, x);
  if (x >= 1.0)
    return upper;
  return upper - half_integral(spec.b, spec.a, 1.0 - x);
}

double
upper_quadrature(const DiffusionSpec& spec)
{
  return half_integral(spec.a, spec.b, 0.5) + half_integral(spec.b, spec.a, 0.5);
}

double
sigma_unchecked(const DiffusionSpec& spec, double x)
{
  if (x <= 0.0 || x >= 1.0)
    return 0.0;
  return std::pow(x, spec.a) * std::pow(1.0 - x, spec.b);
}

// Safeguarded Newton on F(x) = y; F' = 1/sigma is known in closed form.
// Near a steep endpoint the root can sit between two adjacent doubles; the
// collapsed bracket is then accepted whatever the residual in y.
double
invert_quadrature(const DiffusionSpec& spec, double y, double upper, double guess)
{
  if (y <= 0.0)
    return 0.0;
  if (y >= upper)
    return 1.0;
  double lo = 0.0;
  double hi = 1.0;
  double x = std::clamp(guess, 0.0, 1.0);
  if (x <= lo || x >= hi)
    x = 0.5;
  double best_x = x;
  double best_residual = INFINITY;
  bool collapsed = false;
  for (int iter = 0; iter < 2000; ++iter) {
    const double residual = forward_quadrature(spec, x, upper) - y;
    if (std::abs(residual) < best_residual) {
      best_residual = std::abs(residual);
      best_x = x;
    }
    if (std::abs(residual) <= 1e-13)
      break;
    if (residual > 0.0)
      hi = x;
    else
      lo = x;
    if (std::nextafter(lo, 1.0) >= hi) {
      collapsed = true;
      break;
    }
    double next = x - residual * sigma_unchecked(spec, x);
    if (!(next > lo && next < hi))
      next = 0.5 * (lo + hi);
    x = next;
  }
  if (!collapsed && best_residual > kInverseTolerance) {
    std::ostringstream os;
    os << "Lamperti inverse did not converge at y=" << y << " (residual "
       << best_residual << ")";
    throw QuadratureError(os.str());
  }
  return best_x;
}

void
require_open_transformed(double y, double upper, const char* what)
{
  if (!(y > 0.0 && y < upper)) {
    std::ostringstream os;
    os << what << ": transformed coordinate " << y << " outside (0, " << upper << ")";
    throw DomainError(os.str());
  }
}

PotentialValue
cap_value(double v, double cap)
{
  if (std::abs(v) <= cap)
    return {v, false};
  return {std::isnan(v) ? cap : std::copysign(cap, v), true};
}

// Transformed drift of the Wright-Fisher family written as
// -A cot(y/2) + B tan(y/2). Neutral: A = B = 1/4.
struct HalfAngleDrift
{
  double a;
  double b;
};

HalfAngleDrift
half_angle_drift(const DiffusionSpec& spec)
{
  return {0.25 - spec.h - spec.beta2, 0.25 - spec.h + spec.alpha - spec.beta1};
}

double
wf_nu(const DiffusionSpec& spec, double y)
{
  if (!spec.has_drift()) {
    const double c = std::cos(y) / std::sin(y);
    return 0.5 + 0.75 * c * c;
  }
  const auto [ca, cb] = half_angle_drift(spec);
  const double s = std::sin(0.5 * y);
  const double c = std::cos(0.5 * y);
  const double mu = -ca * c / s + cb * s / c;
  const double dmu = 0.5 * ca / (s * s) + 0.5 * cb / (c * c);
  return mu * mu + dmu;
}

double
wf_big_v(double y)
{
  const double s = std::sin(y);
  const double c = std::cos(y) / s;
  return 0.5 / (s * s) + 0.25 * c * c;
}

struct SigmaDerivatives
{
  double d1;          // sigma'
  double d2_times_s;  // sigma'' sigma
};

SigmaDerivatives
sigma_derivatives(const DiffusionSpec& spec, double x)
{
  const double s = sigma_unchecked(spec, x);
  const double g = spec.a / x - spec.b / (1.0 - x);
  const double curvature =
    g * g - spec.a / (x * x) - spec.b / ((1.0 - x) * (1.0 - x));
  return {s * g, s * s * curvature};
}

double
general_nu_at_x(const DiffusionSpec& spec, double x)
{
  const auto d = sigma_derivatives(spec, x);
  return 0.25 * d.d1 * d.d1 - 0.5 * d.d2_times_s;
}

double
general_big_v_at_x(const DiffusionSpec& spec, double x)
{
  const auto d = sigma_derivatives(spec, x);
  return 0.5 * std::abs(d.d2_times_s) + 0.25 * d.d1 * d.d1;
}

double
wf_m_diff(const DiffusionSpec& spec, double y0, double y)
{
  const auto [ca, cb] = half_angle_drift(spec);
  const double ls0 = std::log(std::sin(0.5 * y0));
  const double ls = std::log(std::sin(0.5 * y));
  const double lc0 = std::log(std::cos(0.5 * y0));
  const double lc = std::log(std::cos(0.5 * y));
  return 2.0 * (ca * (ls0 - ls) + cb * (lc0 - lc));
}

double
general_m_diff(const DiffusionSpec& spec, double x0, double x)
{
  return 0.5 * (spec.a * (std::log(x0) - std::log(x)) +
                spec.b * (std::log1p(-x0) - std::log1p(-x)));
}

} // namespace

DiffusionSpec
DiffusionSpec::power_law(double a, double b)
{
  DiffusionSpec spec;
  spec.a = a;
  spec.b = b;
  spec.validate();
  return spec;
}

DiffusionSpec
DiffusionSpec::mutation(double beta1, double beta2)
{
  DiffusionSpec spec;
  spec.beta1 = beta1;
  spec.beta2 = beta2;
  spec.validate();
  return spec;
}

DiffusionSpec
DiffusionSpec::selection(double alpha, double h)
{
  DiffusionSpec spec;
  spec.alpha = alpha;
  spec.h = h;
  spec.validate();
  return spec;
}

void
DiffusionSpec::validate() const
{
  if (!(a > 0.0 && a <= 1.0) || !(b > 0.0 && b <= 1.0)) {
    std::ostringstream os;
    os << "volatility exponents must satisfy 0 < a, b <= 1 (got a=" << a
       << ", b=" << b << ")";
    throw ParameterError(os.str());
  }
  if (!(beta1 >= 0.0) || !(beta2 >= 0.0))
    throw ParameterError("mutation rates beta1, beta2 must be >= 0");
  if (!std::isfinite(alpha) || !std::isfinite(h))
    throw ParameterError("selection parameters must be finite");
  if (has_drift() && !is_wright_fisher())
    throw ParameterError("drift parameters require the Wright-Fisher volatility a = b = 1/2");
}

double
sigma(const DiffusionSpec& spec, double x)
{
  require_unit_interval(x, "sigma");
  return sigma_unchecked(spec, x);
}

double
lamperti_forward(const DiffusionSpec& spec, double x)
{
  require_unit_interval(x, "lamperti_forward");
  if (spec.is_wright_fisher())
    return 2.0 * std::asin(std::sqrt(x));
  return lamperti_forward_quadrature(spec, x);
}

double
lamperti_forward_quadrature(const DiffusionSpec& spec, double x)
{
  require_unit_interval(x, "lamperti_forward");
  require_integrable(spec);
  return forward_quadrature(spec, x, upper_quadrature(spec));
}

double
lamperti_upper(const DiffusionSpec& spec)
{
  if (spec.is_wright_fisher())
    return std::numbers::pi;
  require_integrable(spec);
  return upper_quadrature(spec);
}

double
lamperti_inverse(const DiffusionSpec& spec, double y)
{
  const double upper = lamperti_upper(spec);
  if (!(y >= 0.0 && y <= upper)) {
    std::ostringstream os;
    os << "lamperti_inverse: " << y << " outside [0, " << upper << "]";
    throw DomainError(os.str());
  }
  if (spec.is_wright_fisher()) {
    const double s = std::sin(0.5 * y);
    return s * s;
  }
  return invert_quadrature(spec, y, upper, y / upper);
}

TransformPoint
transform_point(const DiffusionSpec& spec, double x)
{
  return {x, lamperti_forward(spec, x)};
}

double
transformed_drift(const DiffusionSpec& spec, double y)
{
  const double upper = lamperti_upper(spec);
  require_open_transformed(y, upper, "transformed_drift");
  if (spec.is_wright_fisher()) {
    const auto [ca, cb] = half_angle_drift(spec);
    const double t = std::tan(0.5 * y);
    return -ca / t + cb * t;
  }
  const double x = invert_quadrature(spec, y, upper, y / upper);
  return -0.5 * sigma_derivatives(spec, x).d1;
}

PotentialValue
nu_capped(const DiffusionSpec& spec, double y, double cap)
{
  const double upper = lamperti_upper(spec);
  require_open_transformed(y, upper, "nu");
  if (spec.is_wright_fisher())
    return cap_value(wf_nu(spec, y), cap);
  const double x = invert_quadrature(spec, y, upper, y / upper);
  return cap_value(general_nu_at_x(spec, x), cap);
}

double
nu(const DiffusionSpec& spec, double y, double cap)
{
  const auto v = nu_capped(spec, y, cap);
  if (v.clamped) {
    std::ostringstream os;
    os << "nu(" << y << ") exceeds the overflow cap " << cap;
    throw SingularityError(os.str());
  }
  return v.value;
}

PotentialValue
big_v_capped(const DiffusionSpec& spec, double y, double cap)
{
  const double upper = lamperti_upper(spec);
  require_open_transformed(y, upper, "big_v");
  if (spec.is_wright_fisher())
    return cap_value(wf_big_v(y), cap);
  const double x = invert_quadrature(spec, y, upper, y / upper);
  return cap_value(general_big_v_at_x(spec, x), cap);
}

double
big_v(const DiffusionSpec& spec, double y, double cap)
{
  const auto v = big_v_capped(spec, y, cap);
  if (v.clamped) {
    std::ostringstream os;
    os << "V(" << y << ") exceeds the overflow cap " << cap;
    throw SingularityError(os.str());
  }
  return v.value;
}

double
m_diff(const DiffusionSpec& spec, double y0, double y)
{
  const double upper = lamperti_upper(spec);
  require_open_transformed(y0, upper, "m_diff");
  require_open_transformed(y, upper, "m_diff");
  if (spec.is_wright_fisher())
    return wf_m_diff(spec, y0, y);
  return general_m_diff(spec,
                        invert_quadrature(spec, y0, upper, y0 / upper),
                        invert_quadrature(spec, y, upper, y / upper));
}

// --- Diffusion ---------------------------------------------------------------

Diffusion::Diffusion(const DiffusionSpec& spec)
  : spec_(spec)
  , upper_(0.0)
{
  spec_.validate();
  upper_ = lamperti_upper(spec_);
  if (spec_.is_wright_fisher())
    return;
  // Nodes cluster at both ends, where F is steepest.
  constexpr int n = 1024;
  table_x_.resize(n + 1);
  table_y_.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double s = std::sin(0.5 * std::numbers::pi * k / n);
    table_x_[k] = k == n ? 1.0 : s * s;
    table_y_[k] = forward_quadrature(spec_, table_x_[k], upper_);
  }
}

double
Diffusion::sigma(double x) const
{
  return wfdens::sigma(spec_, x);
}

double
Diffusion::forward(double x) const
{
  require_unit_interval(x, "lamperti_forward");
  if (spec_.is_wright_fisher())
    return 2.0 * std::asin(std::sqrt(x));
  return forward_quadrature(spec_, x, upper_);
}

double
Diffusion::initial_guess(double y) const
{
  const auto it = std::upper_bound(table_y_.begin(), table_y_.end(), y);
  if (it == table_y_.begin())
    return table_x_.front();
  if (it == table_y_.end())
    return table_x_.back();
  const auto k = static_cast<std::size_t>(it - table_y_.begin());
  const double w = (y - table_y_[k - 1]) / (table_y_[k] - table_y_[k - 1]);
  return table_x_[k - 1] + w * (table_x_[k] - table_x_[k - 1]);
}

double
Diffusion::inverse(double y) const
{
  if (!(y >= 0.0 && y <= upper_)) {
    std::ostringstream os;
    os << "lamperti_inverse: " << y << " outside [0, " << upper_ << "]";
    throw DomainError(os.str());
  }
  if (spec_.is_wright_fisher()) {
    const double s = std::sin(0.5 * y);
    return s * s;
  }
  return invert_quadrature(spec_, y, upper_, initial_guess(y));
}

double
Diffusion::m_diff(double y0, double y) const
{
  require_open_transformed(y0, upper_, "m_diff");
  require_open_transformed(y, upper_, "m_diff");
  if (spec_.is_wright_fisher())
    return wf_m_diff(spec_, y0, y);
  return general_m_diff(spec_, inverse(y0), inverse(y));
}

PotentialValue
Diffusion::potential(double y, double cap) const
{
  require_open_transformed(y, upper_, "potential");
  if (spec_.is_wright_fisher()) {
    return cap_value(spec_.has_drift() ? wf_nu(spec_, y) : wf_big_v(y), cap);
  }
  return cap_value(general_big_v_at_x(spec_, inverse(y)), cap);
}

} // namespace wfdens
