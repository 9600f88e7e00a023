#pragma once

#include <vector>

namespace wfdens {

//! Volatility x^a (1-x)^b plus the drift parameters of the generalised
//! Wright-Fisher diffusion. Drift parameters are only meaningful for the
//! Wright-Fisher volatility a = b = 1/2.
struct DiffusionSpec
{
  double a = 0.5;
  double b = 0.5;
  double alpha = 0.0; //!< rescaled selection rate
  double h = 0.0;     //!< heterozygosity
  double beta1 = 0.0; //!< rescaled mutation rate towards 0
  double beta2 = 0.0; //!< rescaled mutation rate towards 1

  static DiffusionSpec neutral() { return {}; }
  static DiffusionSpec power_law(double a, double b);
  static DiffusionSpec mutation(double beta1, double beta2);
  static DiffusionSpec selection(double alpha, double h);

  //! Throws ParameterError when an invariant is violated.
  void validate() const;

  bool is_wright_fisher() const noexcept { return a == 0.5 && b == 0.5; }
  bool has_drift() const noexcept
  {
    return alpha != 0.0 || h != 0.0 || beta1 != 0.0 || beta2 != 0.0;
  }

  bool operator==(const DiffusionSpec&) const = default;
};

struct TransformPoint
{
  double x;
  double y;
};

//! Values above this magnitude are reported as clamped by the potentials.
inline constexpr double kDefaultNuCap = 1e12;

struct PotentialValue
{
  double value;
  bool clamped;
};

double sigma(const DiffusionSpec& spec, double x);

//! F(x) = int_0^x 1/sigma. Closed form 2 asin(sqrt x) for Wright-Fisher,
//! adaptive quadrature otherwise.
double lamperti_forward(const DiffusionSpec& spec, double x);

//! Quadrature route of F regardless of the volatility family.
double lamperti_forward_quadrature(const DiffusionSpec& spec, double x);

//! F(1), the right end of the transformed state space. F(0) is always 0.
double lamperti_upper(const DiffusionSpec& spec);

double lamperti_inverse(const DiffusionSpec& spec, double y);

TransformPoint transform_point(const DiffusionSpec& spec, double x);

//! Drift of the transformed (unit volatility) process.
double transformed_drift(const DiffusionSpec& spec, double y);

//! nu = mu^2 + mu' of the transformed drift. Throws SingularityError when
//! |nu| exceeds `cap`.
double nu(const DiffusionSpec& spec, double y, double cap = kDefaultNuCap);
PotentialValue nu_capped(const DiffusionSpec& spec,
                         double y,
                         double cap = kDefaultNuCap);

//! V = 1/2 |sigma''| sigma + 1/4 sigma'^2 composed with F^{-1}. Depends on the
//! volatility only.
double big_v(const DiffusionSpec& spec, double y, double cap = kDefaultNuCap);
PotentialValue big_v_capped(const DiffusionSpec& spec,
                            double y,
                            double cap = kDefaultNuCap);

//! M(y) - M(y0), M an antiderivative of the transformed drift.
double m_diff(const DiffusionSpec& spec, double y0, double y);

//! Cached transform for hot loops (bridge functionals over many points).
//! Wright-Fisher uses the closed forms; other volatilities keep a monotone
//! table that seeds a Newton polish of the quadrature F.
class Diffusion
{
public:
  explicit Diffusion(const DiffusionSpec& spec);

  const DiffusionSpec& spec() const noexcept { return spec_; }
  double lower() const noexcept { return 0.0; }
  double upper() const noexcept { return upper_; }

  double sigma(double x) const;
  double forward(double x) const;
  double inverse(double y) const;
  double m_diff(double y0, double y) const;

  //! Potential inside the bridge functional: nu for drifted Wright-Fisher,
  //! V otherwise (the two coincide for the neutral Wright-Fisher case).
  PotentialValue potential(double y, double cap = kDefaultNuCap) const;

private:
  double initial_guess(double y) const;

  DiffusionSpec spec_;
  double upper_;
  std::vector<double> table_x_;
  std::vector<double> table_y_;
};

} // namespace wfdens
