#include "harness_fixture.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/harness/commands.hpp"
#include "wfdens/harness/config.hpp"
#include "wfdens/io.hpp"
#include "wfdens/numerics.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace wfdens;
using namespace wfdens::harness;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Csv
{
  std::string schema;
  std::string header;
  std::vector<std::vector<std::string>> rows;
};

Csv
read_csv(const fs::path& path)
{
  std::istringstream in(io::read_text(path));
  Csv csv;
  std::getline(in, csv.schema);
  std::getline(in, csv.header);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      cells.push_back(cell);
    csv.rows.push_back(cells);
  }
  return csv;
}

std::string
expect_config_error(const json& j)
{
  try {
    config_from_json(j).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ConfigError for " << j.dump();
  return {};
}

} // namespace

TEST(Config, Defaults)
{
  const auto c = ExperimentConfig::defaults();
  EXPECT_EQ(c.protocol.two_n, 1000u);
  EXPECT_EQ(c.protocol.n_gen, 500u);
  EXPECT_EQ(c.protocol.n_traj, 100u);
  EXPECT_EQ(c.protocol.x0.size(), 9u);
  EXPECT_EQ(c.mc.n_paths, 500u);
  EXPECT_EQ(c.mc.k_steps, 100u);
  EXPECT_EQ(c.quadrature.points, 2001u);
  EXPECT_EQ(c.quadrature.epsilon, 1e-4);
  EXPECT_EQ(c.kde.b_max, 0.5);
  EXPECT_EQ(c.kde.levels, 12u);
  EXPECT_EQ(c.kde.selection_points, 512u);
  ASSERT_EQ(c.models.size(), 4u);
  EXPECT_EQ(c.models[0].kind, ModelKind::AE);
  EXPECT_EQ(c.models[2].kind, ModelKind::BetaMoment);
  ASSERT_EQ(c.t.size(), 50u);
  EXPECT_EQ(c.t.front(), 0.001);
  EXPECT_EQ(c.t.back(), 0.5);
  for (std::size_t i = 1; i < c.t.size(); ++i)
    EXPECT_GT(c.t[i], c.t[i - 1]);
  EXPECT_NEAR(c.t[1] / c.t[0], std::pow(500.0, 1.0 / 49.0), 1e-4);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, JsonRoundTrip)
{
  auto c = ExperimentConfig::defaults();
  c.seed = 99;
  c.models.push_back({ModelKind::GaussianMoment, VarianceForm::Literal});
  c.kde.b_grid = {0.2, 0.1, 0.05};
  c.spec = DiffusionSpec::selection(0.2, 0.1);
  const json j = to_json(c);
  const auto back = config_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(config_hash(back), config_hash(c));
  EXPECT_EQ(back.lepski_b_grid(), c.kde.b_grid);
}

TEST(Config, PartialJsonKeepsDefaults)
{
  const auto c = config_from_json(json::parse(R"({"protocol": {"n_traj": 7}, "models": ["AE", {"kind": "BetaMoment", "variance_form": "literal"}]})"));
  EXPECT_EQ(c.protocol.n_traj, 7u);
  EXPECT_EQ(c.protocol.two_n, 1000u);
  ASSERT_EQ(c.models.size(), 2u);
  EXPECT_EQ(c.models[1].variance_form, VarianceForm::Literal);
  EXPECT_EQ(c.t.size(), 50u);
}

TEST(Config, FieldLevelErrors)
{
  EXPECT_EQ(expect_config_error(json::parse(R"({"protocol": {"bogus": 1}})")), "protocol.bogus: unknown field");
  EXPECT_NE(expect_config_error(json::parse(R"({"protocol": {"n_traj": "many"}})")).find("protocol.n_traj: expected"),
            std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"({"protocol": {"n_traj": 0}})")).find("protocol.n_traj"), std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"({"t": [0.7]})")).find("t: value 0.7"), std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"({"models": ["Nope"]})")).find("models"), std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"({"mc": {"k_steps": 1}})")).find("mc.k_steps"), std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"({"kde": {"majorant": "wide"}})")).find("kde.majorant"), std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"({"spec": {"a": 2.0}})")).find("spec"), std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"({"figures": {"panel_t": [0.9]}})")).find("figures.panel_t"), std::string::npos);
  EXPECT_NE(expect_config_error(json::parse(R"([1, 2])")).find("expected an object"), std::string::npos);
}

TEST(Config, Overrides)
{
  json j = to_json(ExperimentConfig::defaults());
  apply_override(j, "protocol.n_traj=250");
  apply_override(j, "seed=7");
  apply_override(j, "output_dir=somewhere/else");
  apply_override(j, "t=[0.1,0.2]");
  apply_override(j, "kde.majorant=\"global\"");
  const auto c = config_from_json(j);
  EXPECT_EQ(c.protocol.n_traj, 250u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.output_dir, "somewhere/else");
  EXPECT_EQ(c.t, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(c.kde.majorant, LepskiMajorant::Global);
  EXPECT_THROW(apply_override(j, "no_equals_sign"), ConfigError);
  EXPECT_THROW(apply_override(j, "seed.deeper=1"), ConfigError);
  apply_override(j, "protocol.extra=1");
  EXPECT_THROW(config_from_json(j), ConfigError);
}

TEST(Config, HashTracksContent)
{
  auto a = ExperimentConfig::defaults();
  auto b = a;
  EXPECT_EQ(config_hash(a), config_hash(b));
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
  EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Config, LoadFromFile)
{
  const auto dir = fresh_dir("load_config");
  io::write_text(dir / "c.json", R"({"seed": 5, "protocol": {"x0": [0.25]}})");
  const auto c = load_config(dir / "c.json");
  EXPECT_EQ(c.seed, 5u);
  EXPECT_EQ(c.protocol.x0, std::vector<double>{0.25});
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
  io::write_text(dir / "broken.json", "{");
  EXPECT_THROW(load_config(dir / "broken.json"), ConfigError);
}

TEST(Config, OutputRootEnvironment)
{
  auto c = ExperimentConfig::defaults();
  c.output_dir = "run1";
  ::unsetenv(kOutputRootEnv);
  EXPECT_EQ(output_root(c), fs::path("run1"));
  ::setenv(kOutputRootEnv, "/tmp/wfdens_root", 1);
  EXPECT_EQ(output_root(c), fs::path("/tmp/wfdens_root/run1"));
  c.output_dir = "/abs/out";
  EXPECT_EQ(output_root(c), fs::path("/abs/out"));
  ::unsetenv(kOutputRootEnv);
}

TEST(Config, SeedsAreStreamSeparated)
{
  auto c = ExperimentConfig::defaults();
  std::set<std::uint64_t> seeds;
  for (double x0 : c.protocol.x0)
    seeds.insert(ensemble_seed(c, x0));
  seeds.insert(c.density_model(c.models[0]).mc.seed);
  EXPECT_EQ(seeds.size(), c.protocol.x0.size() + 1);
  c.seed = 2;
  EXPECT_NE(ensemble_seed(c, 0.5), ensemble_seed(ExperimentConfig::defaults(), 0.5));
}

TEST(Simulate, WritesEnsemblesAndManifest)
{
  const auto dir = fresh_dir("simulate");
  const auto c = small_config(dir);
  std::ostringstream log;
  ASSERT_EQ(cmd_simulate(c, log), kExitOk) << log.str();
  EXPECT_TRUE(fs::exists(dir / "config.resolved.json"));
  EXPECT_EQ(config_from_json(io::read_json(dir / "config.resolved.json")).seed, c.seed);
  const auto manifest = io::read_json(dir / "manifest.json");
  ASSERT_EQ(manifest.at("ensembles").size(), 2u);
  for (double x0 : c.protocol.x0) {
    const auto e = read_ensemble(ensemble_path(c, x0));
    EXPECT_EQ(e.n_traj, 80u);
    EXPECT_EQ(e.seed, ensemble_seed(c, x0));
  }
  const auto first = io::read_text(ensemble_path(c, 0.3));
  ASSERT_EQ(cmd_simulate(c, log), kExitOk);
  EXPECT_EQ(io::read_text(ensemble_path(c, 0.3)), first);
}

TEST(Simulate, DefaultProtocolHasNineFiles)
{
  const auto dir = fresh_dir("simulate_default");
  auto c = ExperimentConfig::defaults();
  c.protocol.n_traj = 3;
  c.output_dir = dir.string();
  std::ostringstream log;
  ASSERT_EQ(cmd_simulate(c, log), kExitOk);
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "ensembles"))
    files += entry.path().extension() == ".bin";
  EXPECT_EQ(files, 9u);
}

TEST(Simulate, InvalidConfigExitsTwo)
{
  const auto dir = fresh_dir("simulate_invalid");
  auto c = small_config(dir);
  c.protocol.n_traj = 0;
  std::ostringstream log;
  EXPECT_EQ(cmd_simulate(c, log), kExitConfig);
  EXPECT_NE(log.str().find("protocol.n_traj"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "ensembles"));
}

TEST(EnsureEnsemble, ReusesMatchingFileAndReplacesStale)
{
  const auto dir = fresh_dir("ensure");
  auto c = small_config(dir);
  const auto a = ensure_ensemble(c, 0.3);
  const auto stamp = fs::last_write_time(ensemble_path(c, 0.3));
  EXPECT_EQ(ensure_ensemble(c, 0.3), a);
  EXPECT_EQ(fs::last_write_time(ensemble_path(c, 0.3)), stamp);
  c.protocol.n_traj = 90;
  EXPECT_EQ(ensure_ensemble(c, 0.3).n_traj, 90u);
}

TEST(Density, AeCsvIsNormalised)
{
  const auto dir = fresh_dir("density_ae");
  auto c = small_config(dir);
  c.quadrature.points = 2001;
  std::ostringstream log;
  ASSERT_EQ(cmd_density(c, log), kExitOk) << log.str();
  const auto csv = read_csv(dir / "density" / "AE_x0_0.5_t_0.1.csv");
  EXPECT_EQ(csv.schema.rfind("# schema: wfdens.density", 0), 0u);
  EXPECT_EQ(csv.header, "x,density");
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : csv.rows) {
    x.push_back(std::stod(r[0]));
    y.push_back(std::stod(r[1]));
  }
  EXPECT_EQ(x.size(), 2001u);
  EXPECT_NEAR(simpson(x, y), 1.0, 1e-6);
  const auto side = io::read_json(dir / "density" / "AE_x0_0.5_t_0.1.json");
  EXPECT_EQ(side.at("model"), "AE");
  EXPECT_GT(side.at("norm_constant").get<double>(), 0.0);
  EXPECT_EQ(side.at("provenance").at("config_hash"), config_hash(c));
}

TEST(Density, BetaBeyondValidityFails)
{
  const auto dir = fresh_dir("density_beta");
  auto c = small_config(dir);
  c.density.model = {ModelKind::BetaMoment, VarianceForm::Derived};
  c.density.t = 40.0;
  std::ostringstream log;
  const int code = cmd_density(c, log);
  EXPECT_NE(code, kExitOk);
  EXPECT_EQ(code, kExitNumeric);
  EXPECT_NE(log.str().find("Var"), std::string::npos) << log.str();
  EXPECT_NE(log.str().find("E(1-E)"), std::string::npos) << log.str();
  EXPECT_TRUE(fs::exists(dir / "config.resolved.json"));
}

TEST(Density, ExactMcHasConfidenceBand)
{
  const auto dir = fresh_dir("density_exact");
  auto c = small_config(dir);
  c.density.model = {ModelKind::ExactMC, VarianceForm::Derived};
  c.quadrature.points = 101;
  c.mc.n_paths = 500;
  std::ostringstream log;
  ASSERT_EQ(cmd_density(c, log), kExitOk) << log.str();
  const auto csv = read_csv(dir / "density" / "ExactMC_x0_0.5_t_0.1.csv");
  EXPECT_EQ(csv.header, "x,density,std_error,ci_lo,ci_hi");
  for (const auto& r : csv.rows) {
    const double d = std::stod(r[1]);
    EXPECT_GE(std::stod(r[2]), 0.0);
    EXPECT_LE(std::stod(r[3]), d);
    EXPECT_GE(std::stod(r[4]), d);
  }
  EXPECT_EQ(io::read_json(dir / "density" / "ExactMC_x0_0.5_t_0.1.json").at("mc").at("n_paths"), 500);
}

TEST(Compare, CoversEveryCell)
{
  const auto dir = fresh_dir("compare");
  const auto c = small_config(dir);
  std::ostringstream log;
  ASSERT_EQ(cmd_compare(c, log), kExitOk) << log.str();

  const auto distances = read_csv(dir / "distances.csv");
  EXPECT_EQ(distances.schema.rfind("# schema: wfdens.distances", 0), 0u);
  EXPECT_EQ(distances.header, "x0,t,model,hellinger,l2");
  std::map<std::pair<std::string, std::string>, std::set<std::string>> cells;
  for (const auto& r : distances.rows) {
    cells[{r[0], r[1]}].insert(r[2]);
    const double h = std::stod(r[3]);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, 1.0);
    if (r[2] == "ADE") {
      EXPECT_EQ(h, 0.0);
      EXPECT_EQ(std::stod(r[4]), 0.0);
    }
  }
  EXPECT_EQ(cells.size(), 2u * 3u);
  for (const auto& [key, models] : cells)
    EXPECT_EQ(models, (std::set<std::string>{"ADE", "AE", "GaussA", "BetaMoment", "GaussianMoment"}));

  const auto heat = read_csv(dir / "heatmap_hellinger.csv");
  EXPECT_EQ(heat.header, "x0,t,model,neg_log10_hellinger");
  EXPECT_EQ(heat.rows.size(), 2u * 3u * 4u);
  for (const auto& r : heat.rows)
    EXPECT_GT(std::stod(r[3]), 0.0);
  const auto l2 = read_csv(dir / "heatmap_l2.csv");
  EXPECT_EQ(l2.header, "x0,t,model,log10_l2");
  EXPECT_EQ(l2.rows.size(), 2u * 3u * 4u);

  const auto report = report_from_json(io::read_json(dir / "report.json"));
  EXPECT_EQ(report.records.size(), 2u * 3u * 5u);
  EXPECT_EQ(report.cells.size(), 6u);
  EXPECT_TRUE(report.failures.empty());
  EXPECT_EQ(report.config_hash, config_hash(c));
  EXPECT_EQ(report.version, std::string(kVersion));
  EXPECT_EQ(report_to_json(report), io::read_json(dir / "report.json"));
  for (const auto& cell : report.cells) {
    EXPECT_GT(cell.b, 0.0);
    EXPECT_GT(cell.ade_mass, 0.0);
    EXPECT_TRUE(cell.error.empty());
  }
}

TEST(Compare, DeterministicAcrossWorkerCounts)
{
  const auto a_dir = fresh_dir("compare_a");
  const auto b_dir = fresh_dir("compare_b");
  auto a = small_config(a_dir);
  auto b = small_config(b_dir);
  a.workers = 1;
  b.workers = 3;
  std::ostringstream log;
  ASSERT_EQ(cmd_compare(a, log), kExitOk);
  ASSERT_EQ(cmd_compare(b, log), kExitOk);
  for (const char* f : {"distances.csv", "heatmap_hellinger.csv", "heatmap_l2.csv"})
    EXPECT_EQ(io::read_text(a_dir / f), io::read_text(b_dir / f)) << f;
}

TEST(Compare, WritesAdeEstimatesOnRequest)
{
  const auto dir = fresh_dir("compare_ade");
  auto c = small_config(dir);
  c.t = {0.1};
  c.kde.write_estimates = true;
  std::ostringstream log;
  ASSERT_EQ(cmd_compare(c, log), kExitOk) << log.str();
  EXPECT_TRUE(fs::exists(dir / "ade" / "x0_0.3_t_0.1.csv"));
  EXPECT_TRUE(fs::exists(dir / "ade" / "x0_0.3_t_0.1.json"));
}

TEST(Compare, PartialAndTotalFailures)
{
  const auto dir = fresh_dir("compare_fail");
  auto c = small_config(dir);
  c.t = {0.1};
  c.mc.potential_cap = 0.1; // every bridge evaluation clamps
  c.models = {{ModelKind::AE, VarianceForm::Derived}, {ModelKind::ExactMC, VarianceForm::Derived}};
  std::ostringstream log;
  EXPECT_EQ(cmd_compare(c, log), kExitPartial) << log.str();
  const auto report = report_from_json(io::read_json(dir / "report.json"));
  EXPECT_EQ(report.failures.size(), 2u);
  for (const auto& f : report.failures)
    EXPECT_EQ(f.model, "ExactMC");

  c.models = {{ModelKind::ExactMC, VarianceForm::Derived}};
  EXPECT_EQ(cmd_compare(c, log), kExitNumeric);
  EXPECT_TRUE(fs::exists(dir / "config.resolved.json"));
}

TEST(Figures, EmptyReportWritesNothing)
{
  const auto dir = fresh_dir("figures_empty");
  const auto c = small_config(dir);
  ComparisonReport empty;
  io::write_json(dir / "report.json", report_to_json(empty));
  std::ostringstream log;
  EXPECT_EQ(cmd_figures(c, log), kExitNumeric);
  EXPECT_FALSE(fs::exists(dir / "figures"));
  EXPECT_FALSE(fs::exists(dir / "config.resolved.json"));
}

TEST(Figures, MissingReportIsAnInputError)
{
  const auto dir = fresh_dir("figures_missing");
  std::ostringstream log;
  EXPECT_EQ(cmd_figures(small_config(dir), log), kExitConfig);
  EXPECT_FALSE(fs::exists(dir / "figures"));
}

TEST(Figures, DeterministicSvgs)
{
  const auto dir = fresh_dir("figures");
  auto c = small_config(dir);
  std::ostringstream log;
  ASSERT_EQ(cmd_compare(c, log), kExitOk);
  ASSERT_EQ(cmd_figures(c, log), kExitOk) << log.str();
  std::map<std::string, std::string> first;
  for (const char* f : {"heatmap_hellinger.svg", "heatmap_l2.svg", "density_panels.svg", "exact_density.svg"}) {
    const auto text = io::read_text(dir / "figures" / f);
    EXPECT_EQ(text.rfind("<?xml", 0), 0u) << f;
    EXPECT_NE(text.find("</svg>"), std::string::npos) << f;
    first[f] = text;
  }
  ASSERT_EQ(cmd_figures(c, log), kExitOk);
  for (const auto& [f, text] : first)
    EXPECT_EQ(io::read_text(dir / "figures" / f), text) << f;

  c.figures.timestamp = true;
  ASSERT_EQ(cmd_figures(c, log), kExitOk);
  const auto stamped = io::read_text(dir / "figures" / "heatmap_l2.svg");
  EXPECT_NE(stamped, first["heatmap_l2.svg"]);
  EXPECT_NE(stamped.find("<!-- generated "), std::string::npos);
}

TEST(All, RunsEveryStep)
{
  const auto dir = fresh_dir("all");
  const auto c = small_config(dir);
  std::ostringstream log;
  ASSERT_EQ(cmd_all(c, log), kExitOk) << log.str();
  for (const char* f : {"manifest.json", "report.json", "distances.csv", "density/AE_x0_0.5_t_0.1.csv",
                        "figures/density_panels.svg", "figures/exact_density.svg"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
}
