#pragma once

#include "wfdens/bridge.hpp"
#include "wfdens/diffusion.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wfdens {

enum class ModelKind
{
  ExactMC,
  AE,
  AECorrected,
  GaussA,
  GaussianMoment,
  BetaMoment,
  MutationAE,
  SelectionAE
};

std::string_view to_string(ModelKind kind) noexcept;
//! Accepts the names produced by to_string. Throws ParameterError otherwise.
ModelKind parse_model_kind(std::string_view name);

//! How the moment-matched baselines read the variance of X_t.
//!  Derived:      (1 - e^{-t}) x0 (1 - x0), the limit of the binomial chain.
//!  Literal: e^{-t} x0 (1 - x0), kept for reproducing the published curves.
enum class VarianceForm
{
  Derived,
  Literal
};

std::string_view to_string(VarianceForm form) noexcept;
VarianceForm parse_variance_form(std::string_view name);

//! A candidate density. The kind decides what is read: MutationAE reads
//! spec.beta1/beta2, SelectionAE reads spec.alpha/h, ExactMC reads the whole
//! spec and the Monte Carlo options, the moment models read variance_form.
struct DensityModel
{
  ModelKind kind = ModelKind::AE;
  DiffusionSpec spec;
  VarianceForm variance_form = VarianceForm::Derived;
  BridgeMcOptions mc;

  void validate() const;
};

//! Density tabulated on a grid of (0, 1). `values` are raw; the density is
//! values / norm_constant.
struct GridDensity
{
  std::vector<double> grid;
  std::vector<double> values;
  double norm_constant = 1.0;
  DensityModel model;
  double x0 = 0.0;
  double t = 0.0;
  //! Monte Carlo standard errors of the raw values (ExactMC only).
  std::vector<double> std_error;

  std::vector<double> pdf() const;
};

// --- closed-form candidates --------------------------------------------------

//! Small-time expansion without the O(t) term:
//! (2 pi t)^{-1/2} (x0(1-x0))^{1/4} / (x(1-x))^{3/4} exp(-(F(x)-F(x0))^2 / 2t).
double ae_density(double x0, double x, double t);

//! AE times max(0, 1 - t/(2 dF) int_{F(x0)}^{F(x)} nu). The chord average
//! degenerates to nu(F(x0)) at x = x0.
double ae_corrected_density(double x0, double x, double t);

//! Chord average (1/dF) int nu along [F(x0), F(x)] by 64-panel Simpson.
double chord_average_nu(double x0, double x);

//! Gaussian with mean x0 and variance t x0 (1 - x0).
double gauss_approx_density(double x0, double x, double t);

//! False when |x - x0| > c t, outside the regime where the Gaussian
//! approximation is justified.
bool gauss_approx_in_validity_range(double x0, double x, double t, double c = 5.0);

double moment_variance(double x0, double t, VarianceForm form = VarianceForm::Derived);

double gaussian_moment_density(double x0,
                               double x,
                               double t,
                               VarianceForm form = VarianceForm::Derived);

struct BetaParameters
{
  double alpha;
  double beta;
};

//! alpha_t = (E(1-E)/Var) E, beta_t = (E(1-E)/Var)(1-E). Throws
//! ParameterError when Var >= E(1-E).
BetaParameters beta_moment_parameters(double x0,
                                      double t,
                                      VarianceForm form = VarianceForm::Derived);

double beta_moment_density(double x0,
                           double x,
                           double t,
                           VarianceForm form = VarianceForm::Derived);

double mutation_ae_density(double x0, double x, double t, double beta1, double beta2);

double selection_ae_density(double x0, double x, double t, double alpha, double h);

// --- grids and normalisation -------------------------------------------------

struct GridSpec
{
  double epsilon = 1e-4;
  std::size_t points = 2001;

  std::vector<double> make() const;
};

//! Raw model values on `grid` (norm_constant = 1).
GridDensity evaluate_model(const DensityModel& model,
                           double x0,
                           double t,
                           std::span<const double> grid,
                           unsigned workers = 0);

//! Simpson normalisation constant of the raw values. Throws NumericError if
//! it is not finite and positive.
GridDensity normalize(GridDensity raw);

} // namespace wfdens
