// Command-line front end: simulate | density | compare | figures | all | config.

#include "wfdens/errors.hpp"
#include "wfdens/harness/commands.hpp"
#include "wfdens/harness/config.hpp"
#include "wfdens/io.hpp"

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

using namespace wfdens;
using namespace wfdens::harness;

int
main(int argc, char** argv)
{
  CLI::App app{"Wright-Fisher transition densities: simulation, candidate models and distances"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::string> output;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed;
  app.add_option("-c,--config", config_file, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--set", overrides, "Override a config field, e.g. --set protocol.n_traj=1000")
    ->take_all();
  app.add_option("-o,--output", output,
                 std::string("Output directory (relative paths resolve against $") + kOutputRootEnv + ")");
  app.add_option("-j,--workers", workers, "Worker threads (0 = all cores)");
  app.add_option("--seed", seed, "Master seed");

  auto* simulate = app.add_subcommand("simulate", "Simulate the discrete W-F ensembles");
  auto* density = app.add_subcommand("density", "Evaluate and normalise one candidate density");
  std::optional<std::string> model;
  std::optional<std::string> variance_form;
  std::optional<double> x0;
  std::optional<double> t;
  density->add_option("-m,--model", model,
                      "ExactMC, AE, AECorrected, GaussA, GaussianMoment, BetaMoment, MutationAE, SelectionAE");
  density->add_option("--variance-form", variance_form, "derived or literal");
  density->add_option("--x0", x0, "Initial frequency");
  density->add_option("-t,--time", t, "Diffusion time");
  auto* compare = app.add_subcommand("compare", "Fit the ADE per (x0, t) and score every model");
  auto* figures = app.add_subcommand("figures", "Draw SVG figures from a comparison report");
  auto* all = app.add_subcommand("all", "simulate, density, compare and figures in sequence");
  auto* show = app.add_subcommand("config", "Print the resolved config and exit");
  for (auto* sub : {simulate, density, compare, figures, all, show})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version arrive here too, with exit code 0
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  ExperimentConfig config;
  try {
    nlohmann::json j = config_file.empty() ? to_json(ExperimentConfig::defaults()) : io::read_json(config_file);
    for (const auto& o : overrides)
      apply_override(j, o);
    auto set = [&](const std::string& key, const nlohmann::json& value) { j[key] = value; };
    if (output)
      set("output_dir", *output);
    if (workers)
      set("workers", *workers);
    if (seed)
      set("seed", *seed);
    if (model || variance_form || x0 || t) {
      auto& d = j["density"];
      if (d.is_null())
        d = nlohmann::json::object();
      if (model || variance_form) {
        auto& m = d["model"];
        if (m.is_null() || m.is_string())
          m = m.is_string() ? nlohmann::json{{"kind", m}} : nlohmann::json::object();
        if (model)
          m["kind"] = *model;
        if (variance_form)
          m["variance_form"] = *variance_form;
      }
      if (x0)
        d["x0"] = *x0;
      if (t)
        d["t"] = *t;
    }
    config = config_from_json(j);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  }

  if (show->parsed()) {
    std::cout << to_json(config).dump(2) << '\n';
    return kExitOk;
  }
  if (simulate->parsed())
    return cmd_simulate(config, std::cerr);
  if (density->parsed())
    return cmd_density(config, std::cerr);
  if (compare->parsed())
    return cmd_compare(config, std::cerr);
  if (figures->parsed())
    return cmd_figures(config, std::cerr);
  return cmd_all(config, std::cerr);
}
