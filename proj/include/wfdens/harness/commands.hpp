#pragma once

#include "wfdens/harness/config.hpp"
#include "wfdens/kde.hpp"
#include "wfdens/metrics.hpp"
#include "wfdens/wf_sim.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace wfdens::harness {

enum ExitCode : int
{
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitPartial = 4
};

//! Writes config.resolved.json under the output root.
std::filesystem::path write_resolved_config(const ExperimentConfig& config);

//! Seed of the ensemble started at x0; depends on the master seed and the
//! initial allele count only.
std::uint64_t ensemble_seed(const ExperimentConfig& config, double x0);

std::filesystem::path ensemble_path(const ExperimentConfig& config, double x0);

//! Reads the ensemble for x0 if a matching file exists, otherwise simulates
//! and writes it.
TrajectoryEnsemble ensure_ensemble(const ExperimentConfig& config, double x0);

struct CellInfo
{
  double x0 = 0.0;
  double t = 0.0;
  std::size_t generation = 0;
  double b = 0.0;
  bool fallback = false;
  double ade_mass = 0.0; //!< Simpson integral of the raw estimate
  double lost = 0.0;
  double fixed = 0.0;
  std::string error; //!< empty when the ADE fit succeeded
};

struct CellFailure
{
  double x0 = 0.0;
  double t = 0.0;
  std::string model;
  std::string error;
};

struct ComparisonReport
{
  std::vector<DistanceRecord> records;
  std::vector<CellInfo> cells;
  std::vector<CellFailure> failures;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string version;
};

//! Model-free reference on the quadrature grid: Lepski-selected Beta-kernel
//! estimate, Simpson-normalised. Fills the ADE fields of `info` and, when
//! given, the estimate on the selection grid with its comparison table.
GridDensity fit_ade(const ExperimentConfig& config,
                    const std::vector<double>& sample,
                    CellInfo& info,
                    BetaKernelEstimate* selection_estimate = nullptr);

ComparisonReport run_comparison(const ExperimentConfig& config);

nlohmann::json report_to_json(const ComparisonReport& report);
ComparisonReport report_from_json(const nlohmann::json& j);

// Subcommands. Each writes the resolved config before doing any work,
// logs progress to `log` and returns an ExitCode.
int cmd_simulate(const ExperimentConfig& config, std::ostream& log);
int cmd_density(const ExperimentConfig& config, std::ostream& log);
int cmd_compare(const ExperimentConfig& config, std::ostream& log);
int cmd_figures(const ExperimentConfig& config, std::ostream& log);
int cmd_all(const ExperimentConfig& config, std::ostream& log);

} // namespace wfdens::harness
