#pragma once

#include "wfdens/densities.hpp"
#include "wfdens/diffusion.hpp"
#include "wfdens/kde.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace wfdens::harness {

inline constexpr std::string_view kVersion = "0.1.0";

//! Environment variable that relative output directories are resolved
//! against.
inline constexpr const char* kOutputRootEnv = "WFDENS_OUTPUT_ROOT";

struct ProtocolConfig
{
  std::uint32_t two_n = 1000;
  std::uint32_t n_gen = 500;
  std::vector<double> x0 = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::uint32_t n_traj = 100;
};

struct ModelConfig
{
  ModelKind kind = ModelKind::AE;
  VarianceForm variance_form = VarianceForm::Derived;
};

struct KdeConfig
{
  double b_max = 0.5;
  std::size_t levels = 12;
  //! Explicit candidates; when non-empty it replaces b_max / levels.
  std::vector<double> b_grid;
  double c = 1.5;
  LepskiMajorant majorant = LepskiMajorant::Empirical;
  //! Uniform points on [0, 1] used for the Lepski comparisons.
  std::size_t selection_points = 512;
  //! compare writes every ADE (CSV on the selection grid + JSON sidecar).
  bool write_estimates = false;
};

struct DensityRequest
{
  ModelConfig model;
  double x0 = 0.5;
  double t = 0.1;
};

struct FiguresConfig
{
  std::size_t bins = 50;
  std::vector<double> panel_x0 = {0.1, 0.3, 0.5};
  std::vector<double> panel_t = {0.1, 0.25, 0.45};
  double exact_x0 = 0.5;
  std::vector<double> exact_t = {0.1, 0.3, 0.5};
  //! Grid points for the ExactMC overlay curves.
  std::size_t exact_points = 201;
  bool timestamp = false;
};

struct ExperimentConfig
{
  DiffusionSpec spec;
  ProtocolConfig protocol;
  //! Observation times; the default is 50 log-spaced points in [0.001, 0.5].
  std::vector<double> t;
  std::vector<ModelConfig> models;
  BridgeMcOptions mc;
  KdeConfig kde;
  GridSpec quadrature;
  std::uint64_t seed = 1;
  std::string output_dir = "wfdens-out";
  unsigned workers = 0;
  DensityRequest density;
  FiguresConfig figures;

  //! Every field at its default, with the default t grid and the four
  //! comparison models (AE, GaussA, BetaMoment, GaussianMoment).
  static ExperimentConfig defaults();

  //! Throws ConfigError naming the offending field.
  void validate() const;

  DensityModel density_model(const ModelConfig& m) const;
  LepskiOptions lepski_options() const;
  std::vector<double> lepski_b_grid() const;
};

std::vector<double> default_t_grid();

nlohmann::json to_json(const ExperimentConfig& config);

//! Missing fields keep their defaults; unknown fields and type mismatches
//! throw ConfigError with the dotted field path.
ExperimentConfig config_from_json(const nlohmann::json& j);

//! Applies "path.to.field=value". The value is parsed as JSON when possible
//! and taken as a string otherwise.
void apply_override(nlohmann::json& j, std::string_view assignment);

ExperimentConfig load_config(const std::filesystem::path& path);

//! FNV-1a of the canonical JSON dump.
std::string config_hash(const ExperimentConfig& config);

//! output_dir, resolved against $WFDENS_OUTPUT_ROOT when it is relative and
//! the variable is set.
std::filesystem::path output_root(const ExperimentConfig& config);

} // namespace wfdens::harness
