#include "wfdens/diffusion.hpp"
#include "wfdens/errors.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace wfdens;
using std::numbers::pi;

namespace {

const std::vector<DiffusionSpec> kSupported = {DiffusionSpec::neutral(),
                                               DiffusionSpec::power_law(0.75, 0.75),
                                               DiffusionSpec::power_law(0.3, 0.7),
                                               DiffusionSpec::power_law(0.2, 0.9),
                                               DiffusionSpec::power_law(0.9, 0.4)};

// int_0^x u^{-3/4} (1-u)^{-3/4} du with u = v^4: 4 int_0^{x^{1/4}} (1 - v^4)^{-3/4} dv,
// midpoint rule. Smooth integrand for x < 1.
double
midpoint_oracle_three_quarters(double x, int n)
{
  const double top = std::pow(x, 0.25);
  const double h = top / n;
  long double sum = 0.0L;
  for (int i = 0; i < n; ++i) {
    const long double v = (i + 0.5L) * h;
    sum += 4.0L * std::pow(1.0L - v * v * v * v, -0.75L);
  }
  return static_cast<double>(sum * h);
}

} // namespace

TEST(DiffusionSpec, NeutralDefaults)
{
  const auto s = DiffusionSpec::neutral();
  EXPECT_EQ(s.a, 0.5);
  EXPECT_EQ(s.b, 0.5);
  EXPECT_EQ(s.alpha, 0.0);
  EXPECT_EQ(s.h, 0.0);
  EXPECT_EQ(s.beta1, 0.0);
  EXPECT_EQ(s.beta2, 0.0);
  EXPECT_TRUE(s.is_wright_fisher());
  EXPECT_FALSE(s.has_drift());
  EXPECT_NO_THROW(s.validate());
}

TEST(DiffusionSpec, RejectsBadExponentsAndRates)
{
  EXPECT_THROW(DiffusionSpec::power_law(0.0, 0.5).validate(), ParameterError);
  EXPECT_THROW(DiffusionSpec::power_law(0.5, 1.2).validate(), ParameterError);
  EXPECT_THROW(DiffusionSpec::mutation(-0.1, 0.0).validate(), ParameterError);
  EXPECT_NO_THROW(DiffusionSpec::power_law(1.0, 1.0).validate());
  auto s = DiffusionSpec::neutral();
  s.alpha = NAN;
  EXPECT_THROW(s.validate(), ParameterError);
}

TEST(Sigma, Examples)
{
  const auto wf = DiffusionSpec::neutral();
  EXPECT_DOUBLE_EQ(sigma(wf, 0.5), 0.5);
  EXPECT_EQ(sigma(wf, 0.0), 0.0);
  EXPECT_EQ(sigma(wf, 1.0), 0.0);
  const long double expected = std::pow(0.25L, 0.3L) * std::pow(0.75L, 0.7L);
  EXPECT_NEAR(sigma(DiffusionSpec::power_law(0.3, 0.7), 0.25), static_cast<double>(expected), 1e-15);
}

TEST(Sigma, DomainError)
{
  EXPECT_THROW(sigma(DiffusionSpec::neutral(), -0.1), DomainError);
  EXPECT_THROW(sigma(DiffusionSpec::neutral(), 1.5), DomainError);
}

TEST(LampertiForward, WrightFisherClosedForm)
{
  const auto wf = DiffusionSpec::neutral();
  EXPECT_NEAR(lamperti_forward(wf, 0.5), pi / 2, 1e-15);
  EXPECT_NEAR(lamperti_forward(wf, 1.0), pi, 1e-15);
  EXPECT_EQ(lamperti_forward(wf, 0.0), 0.0);
  EXPECT_NEAR(lamperti_upper(wf), pi, 1e-15);
}

TEST(LampertiForward, ThreeQuartersAgainstMidpointOracle)
{
  const auto s = DiffusionSpec::power_law(0.75, 0.75);
  const double oracle = midpoint_oracle_three_quarters(0.5, 1'000'000);
  EXPECT_NEAR(lamperti_forward(s, 0.5), oracle, 1e-10);
}

TEST(LampertiForward, MatchesIncompleteBeta)
{
  // int_0^x u^{-a} (1-u)^{-b} du = B(x; 1-a, 1-b)
  for (const auto& s : kSupported) {
    for (double x : {1e-6, 0.01, 0.2, 0.5, 0.77, 0.999}) {
      const double expected = boost::math::beta(1.0 - s.a, 1.0 - s.b, x);
      EXPECT_NEAR(lamperti_forward(s, x), expected, 1e-10) << "a=" << s.a << " b=" << s.b << " x=" << x;
    }
    EXPECT_NEAR(lamperti_upper(s), boost::math::beta(1.0 - s.a, 1.0 - s.b), 1e-10);
  }
}

TEST(LampertiForward, QuadratureAgreesWithClosedForm)
{
  const auto wf = DiffusionSpec::neutral();
  for (int i = 0; i <= 200; ++i) {
    const double x = i / 200.0;
    EXPECT_NEAR(lamperti_forward_quadrature(wf, x), 2.0 * std::asin(std::sqrt(x)), 1e-8) << x;
  }
}

TEST(LampertiForward, StrictlyIncreasing)
{
  for (const auto& s : kSupported) {
    double prev = lamperti_forward(s, 0.0);
    for (int i = 1; i <= 400; ++i) {
      const double cur = lamperti_forward(s, i / 400.0);
      ASSERT_GT(cur, prev) << "a=" << s.a << " b=" << s.b << " i=" << i;
      prev = cur;
    }
  }
}

TEST(LampertiForward, UnitExponentIsRejected)
{
  EXPECT_THROW(lamperti_forward(DiffusionSpec::power_law(1.0, 0.5), 0.3), DomainError);
  EXPECT_THROW(lamperti_forward(DiffusionSpec::power_law(0.5, 1.0), 0.3), DomainError);
  EXPECT_THROW(lamperti_forward(DiffusionSpec::neutral(), 1.01), DomainError);
}

TEST(LampertiInverse, Examples)
{
  const auto wf = DiffusionSpec::neutral();
  EXPECT_NEAR(lamperti_inverse(wf, pi / 2), 0.5, 1e-15);
  EXPECT_EQ(lamperti_inverse(wf, 0.0), 0.0);
  const auto s = DiffusionSpec::power_law(0.75, 0.75);
  EXPECT_NEAR(lamperti_inverse(s, lamperti_forward(s, 0.3)), 0.3, 1e-9);
}

TEST(LampertiInverse, DomainError)
{
  const auto wf = DiffusionSpec::neutral();
  EXPECT_THROW(lamperti_inverse(wf, -0.01), DomainError);
  EXPECT_THROW(lamperti_inverse(wf, pi + 0.01), DomainError);
}

TEST(LampertiInverse, RoundTripOnThousandPoints)
{
  for (const auto& s : kSupported) {
    const Diffusion d(s);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const double x = 1e-6 + (1.0 - 2e-6) * i / 999.0;
      worst = std::max(worst, std::abs(lamperti_inverse(s, lamperti_forward(s, x)) - x));
      worst = std::max(worst, std::abs(d.inverse(d.forward(x)) - x));
    }
    EXPECT_LE(worst, 1e-9) << "a=" << s.a << " b=" << s.b;
  }
}

TEST(TransformPoint, RoundTripTolerance)
{
  for (const auto& s : kSupported) {
    for (double x : {1e-8, 1e-4, 0.3, 0.5, 0.9, 1.0 - 1e-8}) {
      const auto p = transform_point(s, x);
      EXPECT_EQ(p.x, x);
      EXPECT_NEAR(lamperti_inverse(s, p.y), x, 1e-10);
    }
  }
}

TEST(Nu, WrightFisherExamples)
{
  const auto wf = DiffusionSpec::neutral();
  EXPECT_NEAR(nu(wf, pi / 2), 0.5, 1e-15);
  EXPECT_NEAR(nu(wf, pi / 4), 1.25, 1e-14);
  EXPECT_NEAR(nu(wf, pi / 6), 2.75, 1e-13);
}

TEST(Nu, EqualsSquaredDriftPlusDerivative)
{
  // Central difference of the transformed drift as an independent route to nu.
  const std::vector<DiffusionSpec> specs = {DiffusionSpec::neutral(),
                                            DiffusionSpec::mutation(0.1, 0.05),
                                            DiffusionSpec::selection(0.4, 0.1),
                                            DiffusionSpec::selection(-0.3, 0.0)};
  for (const auto& s : specs) {
    for (double y : {0.3, 0.9, 1.6, 2.4, 2.9}) {
      const double h = 1e-5;
      const double mu = transformed_drift(s, y);
      const double dmu = (transformed_drift(s, y + h) - transformed_drift(s, y - h)) / (2 * h);
      EXPECT_NEAR(nu(s, y), mu * mu + dmu, 1e-6 * std::max(1.0, std::abs(nu(s, y))));
    }
  }
}

TEST(Nu, NeutralDriftIsHalfCotangent)
{
  const auto wf = DiffusionSpec::neutral();
  for (double y : {0.2, 1.0, 2.0, 3.0})
    EXPECT_NEAR(transformed_drift(wf, y), -0.5 / std::tan(y), 1e-14);
}

TEST(Nu, CapRaisesOrFlags)
{
  const auto wf = DiffusionSpec::neutral();
  EXPECT_THROW(nu(wf, 1e-7), SingularityError);
  const auto capped = nu_capped(wf, 1e-7);
  EXPECT_TRUE(capped.clamped);
  EXPECT_EQ(capped.value, kDefaultNuCap);
  EXPECT_FALSE(nu_capped(wf, 1.0).clamped);
  EXPECT_THROW(nu(wf, 1.0, 0.1), SingularityError);
}

TEST(BigV, Examples)
{
  const auto wf = DiffusionSpec::neutral();
  EXPECT_NEAR(big_v(wf, pi / 2), 0.5, 1e-14);
  EXPECT_NEAR(big_v(wf, pi / 4), 1.25, 1e-13);
}

TEST(BigV, EqualsNuForWrightFisher)
{
  const auto wf = DiffusionSpec::neutral();
  for (int i = 0; i <= 500; ++i) {
    const double y = 0.05 + (pi - 0.1) * i / 500.0;
    EXPECT_NEAR(big_v(wf, y), nu(wf, y), 1e-12 * std::max(1.0, nu(wf, y))) << y;
  }
}

TEST(BigV, NonNegative)
{
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> exponent(0.05, 0.95);
  std::uniform_real_distribution<double> frac(0.01, 0.99);
  for (int k = 0; k < 40; ++k) {
    const auto s = DiffusionSpec::power_law(exponent(rng), exponent(rng));
    const double top = lamperti_upper(s);
    for (int i = 0; i < 10; ++i)
      EXPECT_GE(big_v(s, frac(rng) * top), 0.0);
  }
}

TEST(MDiff, NeutralExamples)
{
  const auto wf = DiffusionSpec::neutral();
  const double y = lamperti_forward(wf, 0.37);
  EXPECT_EQ(m_diff(wf, y, y), 0.0);
  const double y0 = lamperti_forward(wf, 0.3);
  const double y1 = lamperti_forward(wf, 0.7);
  EXPECT_NEAR(std::exp(m_diff(wf, y0, y1)), 1.0, 1e-14);
}

TEST(MDiff, NeutralWorkedExponent)
{
  const auto wf = DiffusionSpec::neutral();
  for (double x0 : {0.1, 0.45, 0.8})
    for (double x : {0.05, 0.5, 0.93}) {
      const double expected = 0.25 * (std::log(x0 * (1 - x0)) - std::log(x * (1 - x)));
      EXPECT_NEAR(m_diff(wf, lamperti_forward(wf, x0), lamperti_forward(wf, x)), expected, 1e-13);
    }
}

TEST(MDiff, ZeroMutationEqualsNeutral)
{
  const auto wf = DiffusionSpec::neutral();
  const auto mut = DiffusionSpec::mutation(0.0, 0.0);
  for (double y0 : {0.2, 1.1, 2.7})
    for (double y : {0.4, 1.5, 3.0})
      EXPECT_EQ(m_diff(mut, y0, y), m_diff(wf, y0, y));
}

TEST(MDiff, SelectionMatchesClosedForm)
{
  const double alpha = 0.4;
  const double h = 0.1;
  const auto s = DiffusionSpec::selection(alpha, h);
  const double x0 = 0.3;
  const double x = 0.6;
  const double expected =
    std::pow(x0 * (1 - x0) / (x * (1 - x)), 0.25 - h) * std::pow((1 - x0) / (1 - x), alpha);
  EXPECT_NEAR(std::exp(m_diff(s, lamperti_forward(s, x0), lamperti_forward(s, x))), expected, 1e-12);
}

TEST(MDiff, ExactlyAntisymmetric)
{
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> frac(0.001, 0.999);
  const std::vector<DiffusionSpec> specs = {DiffusionSpec::neutral(),
                                            DiffusionSpec::mutation(0.2, 0.07),
                                            DiffusionSpec::selection(1.3, 0.2),
                                            DiffusionSpec::power_law(0.3, 0.6)};
  for (const auto& s : specs) {
    const double top = lamperti_upper(s);
    for (int i = 0; i < 200; ++i) {
      const double y0 = frac(rng) * top;
      const double y = frac(rng) * top;
      EXPECT_EQ(m_diff(s, y0, y) + m_diff(s, y, y0), 0.0);
    }
  }
}

TEST(DiffusionClass, MatchesFreeFunctions)
{
  for (const auto& s : kSupported) {
    const Diffusion d(s);
    EXPECT_NEAR(d.upper(), lamperti_upper(s), 1e-12);
    for (double x : {0.01, 0.3, 0.5, 0.8}) {
      EXPECT_DOUBLE_EQ(d.sigma(x), sigma(s, x));
      EXPECT_NEAR(d.forward(x), lamperti_forward(s, x), 1e-12);
      const double y = d.forward(x);
      EXPECT_NEAR(d.potential(y).value, big_v(s, y), 1e-9 * std::max(1.0, big_v(s, y)));
    }
  }
  const auto mut = DiffusionSpec::mutation(0.1, 0.2);
  const Diffusion dm(mut);
  EXPECT_DOUBLE_EQ(dm.potential(1.2).value, nu(mut, 1.2));
}
