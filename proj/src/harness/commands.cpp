#include "wfdens/harness/commands.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/harness/svg.hpp"
#include "wfdens/io.hpp"
#include "wfdens/kde.hpp"
#include "wfdens/numerics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace wfdens::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kResolvedConfig = "config.resolved.json";

std::string
tag(double v)
{
  return io::format_double(v);
}

std::string
model_label(const ModelConfig& m)
{
  std::string label(to_string(m.kind));
  const bool moment = m.kind == ModelKind::BetaMoment || m.kind == ModelKind::GaussianMoment;
  if (moment && m.variance_form != VarianceForm::Derived)
    label += ":" + std::string(to_string(m.variance_form));
  return label;
}

json
provenance(const ExperimentConfig& config)
{
  return {{"config_hash", config_hash(config)},
          {"seed", config.seed},
          {"version", std::string(kVersion)}};
}

template <typename F>
int
guarded(std::ostream& log, std::string_view command, F&& body)
{
  try {
    return body();
  } catch (const ConfigError& e) {
    log << command << ": configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    log << command << ": input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    log << command << ": " << e.what() << '\n';
    return kExitNumeric;
  }
}

std::optional<std::string>
stamp_for(const ExperimentConfig& config)
{
  if (!config.figures.timestamp)
    return std::nullopt;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return std::string(buf);
}

void
write_manifest(const ExperimentConfig& config, const std::vector<TrajectoryEnsemble>& ensembles)
{
  const fs::path out = output_root(config);
  json entries = json::array();
  for (const auto& e : ensembles) {
    entries.push_back({{"x0", e.x0},
                       {"file", fs::relative(ensemble_path(config, e.x0), out).generic_string()},
                       {"seed", e.seed},
                       {"two_n", e.two_n},
                       {"n_gen", e.n_gen},
                       {"n_traj", e.n_traj},
                       {"initial_count", e.initial_count}});
  }
  io::write_json(out / "manifest.json",
                 {{"schema", "wfdens.manifest"},
                  {"schema_version", io::kSchemaVersion},
                  {"provenance", provenance(config)},
                  {"ensembles", entries}});
}

void
write_distance_csvs(const fs::path& out, const ComparisonReport& report)
{
  std::ostringstream d;
  io::write_schema_line(d, "wfdens.distances");
  d << "x0,t,model,hellinger,l2\n";
  std::ostringstream h;
  io::write_schema_line(h, "wfdens.heatmap_hellinger");
  h << "x0,t,model,neg_log10_hellinger\n";
  std::ostringstream l;
  io::write_schema_line(l, "wfdens.heatmap_l2");
  l << "x0,t,model,log10_l2\n";
  for (const auto& r : report.records) {
    const std::string key = tag(r.x0) + ',' + tag(r.t) + ',' + r.model + ',';
    d << key << io::format_double(r.hellinger) << ',' << io::format_double(r.l2) << '\n';
    if (r.model == "ADE")
      continue;
    h << key << io::format_double(-std::log10(r.hellinger)) << '\n';
    l << key << io::format_double(std::log10(r.l2)) << '\n';
  }
  io::write_text(out / "distances.csv", d.str());
  io::write_text(out / "heatmap_hellinger.csv", h.str());
  io::write_text(out / "heatmap_l2.csv", l.str());
}

struct CellResult
{
  CellInfo info;
  std::vector<DistanceRecord> records;
  std::vector<CellFailure> failures;
};

CellResult
compare_cell(const ExperimentConfig& config,
             const TrajectoryEnsemble& ensemble,
             double t,
             std::span<const double> qgrid)
{
  CellResult out;
  out.info.x0 = ensemble.x0;
  out.info.t = t;
  GridDensity ade;
  try {
    out.info.generation = ensemble.generation_at(t);
    const auto stats = fixation_stats(ensemble, t);
    out.info.lost = stats.lost;
    out.info.fixed = stats.fixed;
    if (config.kde.write_estimates) {
      BetaKernelEstimate estimate;
      ade = fit_ade(config, marginal_at(ensemble, t), out.info, &estimate);
      write_kde_estimate(estimate,
                         output_root(config) / "ade" / ("x0_" + tag(ensemble.x0) + "_t_" + tag(t) + ".csv"));
    } else {
      ade = fit_ade(config, marginal_at(ensemble, t), out.info);
    }
  } catch (const std::exception& e) {
    out.info.error = e.what();
    out.failures.push_back({ensemble.x0, t, "ADE", e.what()});
    for (const auto& m : config.models)
      out.failures.push_back({ensemble.x0, t, model_label(m), "no reference density: " + out.info.error});
    return out;
  }

  auto record = [&](std::string model, double h, double l2) {
    out.records.push_back(
      {ensemble.x0, t, std::move(model), h, l2, qgrid.front(), qgrid.back(), qgrid.size()});
  };
  record("ADE", hellinger(ade, ade), l2_distance(ade, ade));
  for (const auto& m : config.models) {
    try {
      const auto density = normalize(evaluate_model(config.density_model(m), ensemble.x0, t, qgrid, 1));
      record(model_label(m), hellinger(ade, density), l2_distance(ade, density));
    } catch (const std::exception& e) {
      out.failures.push_back({ensemble.x0, t, model_label(m), e.what()});
    }
  }
  return out;
}

// Normalised model curve for overlays; empty when the model is undefined.
std::vector<double>
model_curve(const ExperimentConfig& config,
            ModelKind kind,
            double x0,
            double t,
            std::span<const double> grid,
            std::ostream& log)
{
  try {
    return normalize(evaluate_model(config.density_model({kind, VarianceForm::Derived}), x0, t, grid, 1))
      .pdf();
  } catch (const std::exception& e) {
    log << "figures: skipping " << to_string(kind) << " at x0=" << tag(x0) << ", t=" << tag(t)
        << ": " << e.what() << '\n';
    return {};
  }
}

struct Overlay
{
  ModelKind kind;
  const char* colour;
  bool dashed;
};

constexpr Overlay kOverlays[] = {{ModelKind::AE, "#d62728", false},
                                 {ModelKind::GaussA, "#ff7f0e", true},
                                 {ModelKind::BetaMoment, "#1f77b4", false},
                                 {ModelKind::GaussianMoment, "#2ca02c", true}};

std::string
overlay_label(ModelKind kind)
{
  switch (kind) {
    case ModelKind::BetaMoment:
      return "Beta";
    case ModelKind::GaussianMoment:
      return "Gaussian";
    default:
      return std::string(to_string(kind));
  }
}

std::string
density_panels_svg(const ExperimentConfig& config, std::ostream& log)
{
  const auto qgrid = config.quadrature.make();
  std::vector<svg::Panel> panels;
  for (double x0 : config.figures.panel_x0) {
    const auto ensemble = ensure_ensemble(config, x0);
    for (double t : config.figures.panel_t) {
      const auto sample = marginal_at(ensemble, t);
      CellInfo info;
      svg::Panel p;
      p.title = "x0 = " + tag(x0) + ", t = " + tag(t);
      p.histogram = svg::unit_histogram(sample, config.figures.bins);
      double top = 0.0;
      for (double hgt : p.histogram->heights)
        top = std::max(top, hgt);
      try {
        const auto ade = fit_ade(config, sample, info);
        const auto pdf = ade.pdf();
        for (double v : pdf)
          top = std::max(top, v);
        p.series.push_back({"ADE", qgrid, pdf, "#000000", false, {}, {}});
      } catch (const std::exception& e) {
        log << "figures: no ADE at x0=" << tag(x0) << ", t=" << tag(t) << ": " << e.what() << '\n';
      }
      for (const auto& o : kOverlays) {
        auto curve = model_curve(config, o.kind, x0, t, qgrid, log);
        if (!curve.empty())
          p.series.push_back({overlay_label(o.kind), qgrid, std::move(curve), o.colour, o.dashed, {}, {}});
      }
      p.y_max = top > 0.0 ? 1.3 * top : 1.0;
      panels.push_back(std::move(p));
    }
  }
  return svg::render_panels("Simulated allele frequencies and candidate densities",
                            panels,
                            config.figures.panel_t.size(),
                            stamp_for(config));
}

std::string
exact_density_svg(const ExperimentConfig& config, std::ostream& log)
{
  const auto& f = config.figures;
  const auto grid = uniform_grid(config.quadrature.epsilon, 1.0 - config.quadrature.epsilon, f.exact_points);
  const double t_max = static_cast<double>(config.protocol.n_gen) / config.protocol.two_n;
  std::optional<TrajectoryEnsemble> ensemble;
  std::vector<svg::Panel> panels;
  for (double t : f.exact_t) {
    DensityModel model = config.density_model({ModelKind::ExactMC, VarianceForm::Derived});
    const auto exact = normalize(evaluate_model(model, f.exact_x0, t, grid, config.workers));
    const auto pdf = exact.pdf();
    std::vector<double> lo(grid.size());
    std::vector<double> hi(grid.size());
    double top = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double half = 1.96 * exact.std_error[i] / exact.norm_constant;
      lo[i] = std::max(pdf[i] - half, 0.0);
      hi[i] = pdf[i] + half;
      top = std::max(top, hi[i]);
    }
    svg::Panel p;
    p.title = "x0 = " + tag(f.exact_x0) + ", t = " + tag(t);
    if (std::round(t * config.protocol.two_n) <= config.protocol.n_gen) {
      if (!ensemble)
        ensemble = ensure_ensemble(config, f.exact_x0);
      p.histogram = svg::unit_histogram(marginal_at(*ensemble, t), f.bins);
    } else {
      log << "figures: t=" << tag(t) << " lies beyond the simulated range (" << tag(t_max)
          << "); drawing the exact density without a histogram\n";
    }
    p.series.push_back({"exact (95% band)", grid, pdf, "#000000", false, lo, hi});
    auto ae = model_curve(config, ModelKind::AE, f.exact_x0, t, grid, log);
    if (!ae.empty())
      p.series.push_back({"AE", grid, std::move(ae), "#d62728", true, {}, {}});
    if (p.histogram)
      for (double hgt : p.histogram->heights)
        top = std::max(top, hgt);
    p.y_max = 1.15 * top;
    panels.push_back(std::move(p));
  }
  return svg::render_panels("Bridge Monte Carlo transition density", panels, panels.size(), stamp_for(config));
}

std::string
heatmap_svg(const ComparisonReport& report, bool hellinger_map, const std::optional<std::string>& stamp)
{
  std::vector<std::string> models;
  std::set<double> xs;
  std::set<double> ts;
  for (const auto& r : report.records) {
    if (r.model == "ADE")
      continue;
    if (std::find(models.begin(), models.end(), r.model) == models.end())
      models.push_back(r.model);
    xs.insert(r.x0);
    ts.insert(r.t);
  }
  const std::vector<double> rows(xs.begin(), xs.end());
  const std::vector<double> cols(ts.begin(), ts.end());
  std::vector<svg::Heatmap> maps;
  for (const auto& model : models) {
    svg::Heatmap m;
    m.title = model;
    m.value_label = hellinger_map ? "-log10 H" : "log10 L2";
    m.rows = rows;
    m.columns = cols;
    m.values.assign(rows.size() * cols.size(), NAN);
    for (const auto& r : report.records) {
      if (r.model != model)
        continue;
      const auto i = static_cast<std::size_t>(std::lower_bound(rows.begin(), rows.end(), r.x0) - rows.begin());
      const auto j = static_cast<std::size_t>(std::lower_bound(cols.begin(), cols.end(), r.t) - cols.begin());
      m.values[i * cols.size() + j] = hellinger_map ? -std::log10(r.hellinger) : std::log10(r.l2);
    }
    maps.push_back(std::move(m));
  }
  return svg::render_heatmaps(hellinger_map ? "Hellinger distance to the ADE"
                                            : "L2 distance to the ADE",
                              maps,
                              stamp);
}

} // namespace

fs::path
write_resolved_config(const ExperimentConfig& config)
{
  const fs::path path = output_root(config) / kResolvedConfig;
  io::write_json(path, to_json(config));
  return path;
}

std::uint64_t
ensemble_seed(const ExperimentConfig& config, double x0)
{
  return derive_seed(config.seed, static_cast<std::uint64_t>(std::lround(x0 * config.protocol.two_n)));
}

fs::path
ensemble_path(const ExperimentConfig& config, double x0)
{
  return output_root(config) / "ensembles" / ("x0_" + tag(x0) + ".bin");
}

TrajectoryEnsemble
ensure_ensemble(const ExperimentConfig& config, double x0)
{
  const auto path = ensemble_path(config, x0);
  const auto& p = config.protocol;
  const auto seed = ensemble_seed(config, x0);
  if (fs::exists(path)) {
    try {
      auto e = read_ensemble(path);
      if (e.two_n == p.two_n && e.n_gen == p.n_gen && e.n_traj == p.n_traj && e.seed == seed
          && e.x0 == x0)
        return e;
    } catch (const IoError&) {
      // unreadable or stale; regenerate below
    }
  }
  auto e = simulate_ensemble(p.two_n, p.n_gen, x0, p.n_traj, seed, config.workers);
  write_ensemble(e, path);
  return e;
}

GridDensity
fit_ade(const ExperimentConfig& config,
        const std::vector<double>& sample,
        CellInfo& info,
        BetaKernelEstimate* selection_estimate)
{
  const auto selection_grid = uniform_grid(0.0, 1.0, config.kde.selection_points);
  const auto b_grid = config.lepski_b_grid();
  auto sel = lepski_select_b(sample, b_grid, selection_grid, config.lepski_options());
  info.b = sel.b;
  info.fallback = sel.fallback;
  if (selection_estimate) {
    *selection_estimate = kde_evaluate(sample, sel.b, selection_grid);
    selection_estimate->b_grid = sel.b_grid;
    selection_estimate->selected_index = sel.selected_index;
    selection_estimate->selection = sel;
  }

  GridDensity ade;
  ade.grid = config.quadrature.make();
  ade.values = beta_kernel_estimate(sample, sel.b, ade.grid);
  ade.x0 = info.x0;
  ade.t = info.t;
  ade = normalize(std::move(ade));
  info.ade_mass = ade.norm_constant;
  return ade;
}

ComparisonReport
run_comparison(const ExperimentConfig& config)
{
  config.validate();
  const auto qgrid = config.quadrature.make();
  std::vector<TrajectoryEnsemble> ensembles;
  for (double x0 : config.protocol.x0)
    ensembles.push_back(ensure_ensemble(config, x0));

  const std::size_t nt = config.t.size();
  std::vector<CellResult> results(ensembles.size() * nt);
  parallel_for(
    results.size(),
    [&](std::size_t k) { results[k] = compare_cell(config, ensembles[k / nt], config.t[k % nt], qgrid); },
    config.workers);

  ComparisonReport report;
  report.config_hash = config_hash(config);
  report.seed = config.seed;
  report.version = std::string(kVersion);
  for (auto& r : results) {
    report.cells.push_back(std::move(r.info));
    for (auto& d : r.records)
      report.records.push_back(std::move(d));
    for (auto& f : r.failures)
      report.failures.push_back(std::move(f));
  }
  return report;
}

json
report_to_json(const ComparisonReport& report)
{
  json records = json::array();
  for (const auto& r : report.records) {
    records.push_back({{"x0", r.x0},
                       {"t", r.t},
                       {"model", r.model},
                       {"hellinger", r.hellinger},
                       {"l2", r.l2},
                       {"grid", {{"lo", r.grid_lo}, {"hi", r.grid_hi}, {"points", r.grid_points}}}});
  }
  json cells = json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"x0", c.x0},
                     {"t", c.t},
                     {"generation", c.generation},
                     {"b", c.b},
                     {"fallback", c.fallback},
                     {"ade_mass", c.ade_mass},
                     {"lost", c.lost},
                     {"fixed", c.fixed},
                     {"error", c.error}});
  }
  json failures = json::array();
  for (const auto& f : report.failures)
    failures.push_back({{"x0", f.x0}, {"t", f.t}, {"model", f.model}, {"error", f.error}});
  return {{"schema", "wfdens.report"},
          {"schema_version", io::kSchemaVersion},
          {"provenance",
           {{"config_hash", report.config_hash}, {"seed", report.seed}, {"version", report.version}}},
          {"records", records},
          {"cells", cells},
          {"failures", failures}};
}

ComparisonReport
report_from_json(const json& j)
{
  try {
    ComparisonReport report;
    const auto& prov = j.at("provenance");
    report.config_hash = prov.at("config_hash").get<std::string>();
    report.seed = prov.at("seed").get<std::uint64_t>();
    report.version = prov.at("version").get<std::string>();
    for (const auto& r : j.at("records")) {
      const auto& g = r.at("grid");
      report.records.push_back({r.at("x0").get<double>(),
                                r.at("t").get<double>(),
                                r.at("model").get<std::string>(),
                                r.at("hellinger").get<double>(),
                                r.at("l2").get<double>(),
                                g.at("lo").get<double>(),
                                g.at("hi").get<double>(),
                                g.at("points").get<std::size_t>()});
    }
    for (const auto& c : j.at("cells")) {
      report.cells.push_back({c.at("x0").get<double>(),
                              c.at("t").get<double>(),
                              c.at("generation").get<std::size_t>(),
                              c.at("b").get<double>(),
                              c.at("fallback").get<bool>(),
                              c.at("ade_mass").get<double>(),
                              c.at("lost").get<double>(),
                              c.at("fixed").get<double>(),
                              c.at("error").get<std::string>()});
    }
    for (const auto& f : j.at("failures")) {
      report.failures.push_back({f.at("x0").get<double>(),
                                 f.at("t").get<double>(),
                                 f.at("model").get<std::string>(),
                                 f.at("error").get<std::string>()});
    }
    return report;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed comparison report: ") + e.what());
  }
}

int
cmd_simulate(const ExperimentConfig& config, std::ostream& log)
{
  return guarded(log, "simulate", [&] {
    config.validate();
    write_resolved_config(config);
    const auto& p = config.protocol;
    std::vector<TrajectoryEnsemble> ensembles;
    for (double x0 : p.x0) {
      auto e = simulate_ensemble(p.two_n, p.n_gen, x0, p.n_traj, ensemble_seed(config, x0), config.workers);
      write_ensemble(e, ensemble_path(config, x0));
      log << "simulate: x0=" << tag(x0) << " -> " << ensemble_path(config, x0).string() << '\n';
      ensembles.push_back(std::move(e));
    }
    write_manifest(config, ensembles);
    return static_cast<int>(kExitOk);
  });
}

int
cmd_density(const ExperimentConfig& config, std::ostream& log)
{
  return guarded(log, "density", [&] {
    config.validate();
    write_resolved_config(config);
    const auto& req = config.density;
    const auto model = config.density_model(req.model);
    const auto grid = config.quadrature.make();
    const auto density = normalize(evaluate_model(model, req.x0, req.t, grid, config.workers));
    const auto pdf = density.pdf();
    const bool mc = model.kind == ModelKind::ExactMC;

    std::ostringstream os;
    io::write_schema_line(os, "wfdens.density");
    os << (mc ? "x,density,std_error,ci_lo,ci_hi\n" : "x,density\n");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      os << io::format_double(grid[i]) << ',' << io::format_double(pdf[i]);
      if (mc) {
        const double se = density.std_error[i] / density.norm_constant;
        os << ',' << io::format_double(se) << ',' << io::format_double(std::max(pdf[i] - 1.96 * se, 0.0))
           << ',' << io::format_double(pdf[i] + 1.96 * se);
      }
      os << '\n';
    }
    const std::string stem = model_label(req.model) + "_x0_" + tag(req.x0) + "_t_" + tag(req.t);
    const fs::path dir = output_root(config) / "density";
    io::write_text(dir / (stem + ".csv"), os.str());

    json sidecar = {{"schema", "wfdens.density"},
                    {"schema_version", io::kSchemaVersion},
                    {"model", model_label(req.model)},
                    {"x0", req.x0},
                    {"t", req.t},
                    {"norm_constant", density.norm_constant},
                    {"grid", {{"epsilon", config.quadrature.epsilon}, {"points", grid.size()}}},
                    {"provenance", provenance(config)}};
    if (mc)
      sidecar["mc"] = {{"n_paths", model.mc.n_paths}, {"k_steps", model.mc.k_steps}, {"seed", model.mc.seed}};
    io::write_json(dir / (stem + ".json"), sidecar);
    log << "density: " << (dir / (stem + ".csv")).string() << " (normalisation constant "
        << io::format_double(density.norm_constant) << ")\n";
    return static_cast<int>(kExitOk);
  });
}

int
cmd_compare(const ExperimentConfig& config, std::ostream& log)
{
  return guarded(log, "compare", [&] {
    config.validate();
    write_resolved_config(config);
    const auto report = run_comparison(config);
    const fs::path out = output_root(config);
    write_distance_csvs(out, report);
    io::write_json(out / "report.json", report_to_json(report));
    const std::size_t cells = report.cells.size();
    log << "compare: " << cells << " cells, " << report.records.size() << " distance records, "
        << report.failures.size() << " failures\n";
    for (const auto& f : report.failures)
      log << "compare: failed x0=" << tag(f.x0) << " t=" << tag(f.t) << " " << f.model << ": " << f.error
          << '\n';
    if (report.failures.empty())
      return static_cast<int>(kExitOk);
    const bool any_model_row = std::any_of(report.records.begin(), report.records.end(), [](const auto& r) {
      return r.model != "ADE";
    });
    return static_cast<int>(any_model_row ? kExitPartial : kExitNumeric);
  });
}

int
cmd_figures(const ExperimentConfig& config, std::ostream& log)
{
  return guarded(log, "figures", [&] {
    config.validate();
    const fs::path out = output_root(config);
    const auto report = report_from_json(io::read_json(out / "report.json"));
    if (report.records.empty()) {
      log << "figures: " << (out / "report.json").string() << " holds no distance records; nothing drawn\n";
      return static_cast<int>(kExitNumeric);
    }
    write_resolved_config(config);
    const fs::path dir = out / "figures";
    const auto stamp = stamp_for(config);
    io::write_text(dir / "heatmap_hellinger.svg", heatmap_svg(report, true, stamp));
    io::write_text(dir / "heatmap_l2.svg", heatmap_svg(report, false, stamp));
    io::write_text(dir / "density_panels.svg", density_panels_svg(config, log));
    io::write_text(dir / "exact_density.svg", exact_density_svg(config, log));
    log << "figures: wrote 4 SVG files to " << dir.string() << '\n';
    return static_cast<int>(kExitOk);
  });
}

int
cmd_all(const ExperimentConfig& config, std::ostream& log)
{
  int worst = kExitOk;
  for (auto step : {cmd_simulate, cmd_density, cmd_compare, cmd_figures}) {
    const int code = step(config, log);
    if (code == kExitConfig || code == kExitNumeric)
      return code;
    worst = std::max(worst, code);
  }
  return worst;
}

} // namespace wfdens::harness
