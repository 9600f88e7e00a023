#include "wfdens/harness/config.hpp"

#include "wfdens/errors.hpp"
#include "wfdens/io.hpp"
#include "wfdens/numerics.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

namespace wfdens::harness {

using nlohmann::json;

namespace {

// Stream index for bridge Monte Carlo seeds; ensembles use the initial count.
constexpr std::uint64_t kBridgeStream = 0xB21D6E000000ULL;

std::string
join(const std::string& prefix, std::string_view key)
{
  return prefix.empty() ? std::string(key) : prefix + "." + std::string(key);
}

// Reads the fields of one JSON object and rejects keys nobody asked for.
class ObjectReader
{
public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path))
  {
    if (!j_.is_object())
      throw ConfigError(where() + ": expected an object");
  }

  template <typename T>
  void read(std::string_view key, T& out)
  {
    seen_.emplace(key);
    auto it = j_.find(std::string(key));
    if (it == j_.end())
      return;
    try {
      out = it->template get<T>();
    } catch (const json::exception&) {
      throw ConfigError(join(path_, key) + ": expected " + type_name<T>() + ", got "
                        + it->dump());
    }
  }

  //! Returns the sub-object, or nullptr when absent.
  const json* child(std::string_view key)
  {
    seen_.emplace(key);
    auto it = j_.find(std::string(key));
    return it == j_.end() ? nullptr : &*it;
  }

  std::string path_of(std::string_view key) const { return join(path_, key); }

  void finish() const
  {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key()))
        throw ConfigError(join(path_, item.key()) + ": unknown field");
    }
  }

private:
  template <typename T>
  static std::string type_name()
  {
    if constexpr (std::is_same_v<T, bool>)
      return "a boolean";
    else if constexpr (std::is_integral_v<T>)
      return "a non-negative integer";
    else if constexpr (std::is_floating_point_v<T>)
      return "a number";
    else if constexpr (std::is_same_v<T, std::string>)
      return "a string";
    else
      return "a list of numbers";
  }

  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

ModelConfig
model_from_json(const json& j, const std::string& path)
{
  ModelConfig m;
  if (j.is_string()) {
    try {
      m.kind = parse_model_kind(j.get<std::string>());
    } catch (const ParameterError& e) {
      throw ConfigError(path + ": " + e.what());
    }
    return m;
  }
  ObjectReader r(j, path);
  std::string kind = std::string(to_string(m.kind));
  std::string form = std::string(to_string(m.variance_form));
  r.read("kind", kind);
  r.read("variance_form", form);
  r.finish();
  try {
    m.kind = parse_model_kind(kind);
  } catch (const ParameterError& e) {
    throw ConfigError(r.path_of("kind") + ": " + e.what());
  }
  try {
    m.variance_form = parse_variance_form(form);
  } catch (const ParameterError& e) {
    throw ConfigError(r.path_of("variance_form") + ": " + e.what());
  }
  return m;
}

json
model_to_json(const ModelConfig& m)
{
  return {{"kind", to_string(m.kind)}, {"variance_form", to_string(m.variance_form)}};
}

void
require(bool ok, std::string_view field, std::string_view message)
{
  if (!ok)
    throw ConfigError(std::string(field) + ": " + std::string(message));
}

void
require_unit_list(const std::vector<double>& values, std::string_view field, bool open)
{
  require(!values.empty(), field, "must not be empty");
  for (double v : values) {
    const bool inside = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    require(inside, field, open ? "values must lie in (0, 1)" : "values must lie in [0, 1]");
  }
}

} // namespace

std::vector<double>
default_t_grid()
{
  constexpr std::size_t count = 50;
  const double lo = std::log(0.001);
  const double hi = std::log(0.5);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double v = std::exp(lo + (hi - lo) * static_cast<double>(i) / (count - 1));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v); // readable file names and CSV keys
    out[i] = std::strtod(buf, nullptr);
  }
  return out;
}

ExperimentConfig
ExperimentConfig::defaults()
{
  ExperimentConfig c;
  c.t = default_t_grid();
  c.models = {{ModelKind::AE, VarianceForm::Derived},
              {ModelKind::GaussA, VarianceForm::Derived},
              {ModelKind::BetaMoment, VarianceForm::Derived},
              {ModelKind::GaussianMoment, VarianceForm::Derived}};
  return c;
}

void
ExperimentConfig::validate() const
{
  try {
    spec.validate();
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("spec: ") + e.what());
  }
  require(protocol.two_n >= 2 && protocol.two_n <= 65535, "protocol.two_n", "must lie in [2, 65535]");
  require(protocol.n_gen >= 1, "protocol.n_gen", "must be positive");
  require(protocol.n_traj >= 1, "protocol.n_traj", "must be positive");
  require_unit_list(protocol.x0, "protocol.x0", false);

  require(!t.empty(), "t", "must not be empty");
  const double t_max = static_cast<double>(protocol.n_gen) / protocol.two_n;
  for (double v : t) {
    require(v > 0.0 && std::isfinite(v), "t", "values must be positive");
    require(std::round(v * protocol.two_n) <= protocol.n_gen,
            "t",
            "value " + io::format_double(v) + " lies beyond the last simulated generation (t <= "
              + io::format_double(t_max) + ")");
  }

  require(!models.empty(), "models", "must not be empty");
  for (const auto& m : models) {
    try {
      density_model(m).validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("models: ") + e.what());
    }
  }

  require(mc.n_paths >= 2, "mc.n_paths", "must be at least 2");
  require(mc.k_steps >= 2, "mc.k_steps", "must be at least 2");
  require(mc.boundary_offset > 0.0, "mc.boundary_offset", "must be positive");
  require(mc.potential_cap > 0.0, "mc.potential_cap", "must be positive");

  require(kde.b_max > 0.0, "kde.b_max", "must be positive");
  require(kde.levels >= 1, "kde.levels", "must be positive");
  for (double b : kde.b_grid)
    require(b > 0.0 && std::isfinite(b), "kde.b_grid", "values must be positive");
  require(kde.c > 0.0, "kde.c", "must be positive");
  require(kde.selection_points >= 3, "kde.selection_points", "must be at least 3");

  require(quadrature.epsilon > 0.0 && quadrature.epsilon < 0.5,
          "quadrature.epsilon",
          "must lie in (0, 0.5)");
  require(quadrature.points >= 3, "quadrature.points", "must be at least 3");

  require(!output_dir.empty(), "output_dir", "must not be empty");

  require(density.x0 > 0.0 && density.x0 < 1.0, "density.x0", "must lie in (0, 1)");
  require(density.t >= 0.0 && std::isfinite(density.t), "density.t", "must be non-negative");

  require(figures.bins >= 1, "figures.bins", "must be positive");
  require_unit_list(figures.panel_x0, "figures.panel_x0", false);
  require(!figures.panel_t.empty(), "figures.panel_t", "must not be empty");
  for (double v : figures.panel_t)
    require(v > 0.0 && std::round(v * protocol.two_n) <= protocol.n_gen,
            "figures.panel_t",
            "values must be positive and within the simulated range");
  require(figures.exact_x0 > 0.0 && figures.exact_x0 < 1.0, "figures.exact_x0", "must lie in (0, 1)");
  for (double v : figures.exact_t)
    require(v > 0.0, "figures.exact_t", "values must be positive");
  require(figures.exact_points >= 3, "figures.exact_points", "must be at least 3");
}

DensityModel
ExperimentConfig::density_model(const ModelConfig& m) const
{
  DensityModel model;
  model.kind = m.kind;
  model.variance_form = m.variance_form;
  model.mc = mc;
  model.mc.seed = derive_seed(seed, kBridgeStream);
  model.spec = spec;
  return model;
}

LepskiOptions
ExperimentConfig::lepski_options() const
{
  LepskiOptions o;
  o.b_max = kde.b_max;
  o.levels = kde.levels;
  o.c = kde.c;
  o.majorant = kde.majorant;
  return o;
}

std::vector<double>
ExperimentConfig::lepski_b_grid() const
{
  return kde.b_grid.empty() ? geometric_b_grid(kde.b_max, kde.levels) : kde.b_grid;
}

json
to_json(const ExperimentConfig& c)
{
  json models = json::array();
  for (const auto& m : c.models)
    models.push_back(model_to_json(m));
  return {
    {"spec",
     {{"a", c.spec.a},
      {"b", c.spec.b},
      {"alpha", c.spec.alpha},
      {"h", c.spec.h},
      {"beta1", c.spec.beta1},
      {"beta2", c.spec.beta2}}},
    {"protocol",
     {{"two_n", c.protocol.two_n},
      {"n_gen", c.protocol.n_gen},
      {"x0", c.protocol.x0},
      {"n_traj", c.protocol.n_traj}}},
    {"t", c.t},
    {"models", models},
    {"mc",
     {{"n_paths", c.mc.n_paths},
      {"k_steps", c.mc.k_steps},
      {"boundary_offset", c.mc.boundary_offset},
      {"potential_cap", c.mc.potential_cap}}},
    {"kde",
     {{"b_max", c.kde.b_max},
      {"levels", c.kde.levels},
      {"b_grid", c.kde.b_grid},
      {"c", c.kde.c},
      {"majorant", to_string(c.kde.majorant)},
      {"selection_points", c.kde.selection_points},
      {"write_estimates", c.kde.write_estimates}}},
    {"quadrature", {{"epsilon", c.quadrature.epsilon}, {"points", c.quadrature.points}}},
    {"seed", c.seed},
    {"output_dir", c.output_dir},
    {"workers", c.workers},
    {"density",
     {{"model", model_to_json(c.density.model)}, {"x0", c.density.x0}, {"t", c.density.t}}},
    {"figures",
     {{"bins", c.figures.bins},
      {"panel_x0", c.figures.panel_x0},
      {"panel_t", c.figures.panel_t},
      {"exact_x0", c.figures.exact_x0},
      {"exact_t", c.figures.exact_t},
      {"exact_points", c.figures.exact_points},
      {"timestamp", c.figures.timestamp}}},
  };
}

ExperimentConfig
config_from_json(const json& j)
{
  auto c = ExperimentConfig::defaults();
  ObjectReader root(j, "");

  if (const json* s = root.child("spec")) {
    ObjectReader r(*s, "spec");
    r.read("a", c.spec.a);
    r.read("b", c.spec.b);
    r.read("alpha", c.spec.alpha);
    r.read("h", c.spec.h);
    r.read("beta1", c.spec.beta1);
    r.read("beta2", c.spec.beta2);
    r.finish();
  }
  if (const json* p = root.child("protocol")) {
    ObjectReader r(*p, "protocol");
    r.read("two_n", c.protocol.two_n);
    r.read("n_gen", c.protocol.n_gen);
    r.read("x0", c.protocol.x0);
    r.read("n_traj", c.protocol.n_traj);
    r.finish();
  }
  root.read("t", c.t);
  if (const json* ms = root.child("models")) {
    if (!ms->is_array())
      throw ConfigError("models: expected a list");
    c.models.clear();
    for (std::size_t i = 0; i < ms->size(); ++i)
      c.models.push_back(model_from_json((*ms)[i], "models[" + std::to_string(i) + "]"));
  }
  if (const json* m = root.child("mc")) {
    ObjectReader r(*m, "mc");
    r.read("n_paths", c.mc.n_paths);
    r.read("k_steps", c.mc.k_steps);
    r.read("boundary_offset", c.mc.boundary_offset);
    r.read("potential_cap", c.mc.potential_cap);
    r.finish();
  }
  if (const json* k = root.child("kde")) {
    ObjectReader r(*k, "kde");
    r.read("b_max", c.kde.b_max);
    r.read("levels", c.kde.levels);
    r.read("b_grid", c.kde.b_grid);
    r.read("c", c.kde.c);
    std::string majorant(to_string(c.kde.majorant));
    r.read("majorant", majorant);
    r.read("selection_points", c.kde.selection_points);
    r.read("write_estimates", c.kde.write_estimates);
    r.finish();
    try {
      c.kde.majorant = parse_lepski_majorant(majorant);
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("kde.majorant: ") + e.what());
    }
  }
  if (const json* q = root.child("quadrature")) {
    ObjectReader r(*q, "quadrature");
    r.read("epsilon", c.quadrature.epsilon);
    r.read("points", c.quadrature.points);
    r.finish();
  }
  root.read("seed", c.seed);
  root.read("output_dir", c.output_dir);
  root.read("workers", c.workers);
  if (const json* d = root.child("density")) {
    ObjectReader r(*d, "density");
    if (const json* m = r.child("model"))
      c.density.model = model_from_json(*m, "density.model");
    r.read("x0", c.density.x0);
    r.read("t", c.density.t);
    r.finish();
  }
  if (const json* f = root.child("figures")) {
    ObjectReader r(*f, "figures");
    r.read("bins", c.figures.bins);
    r.read("panel_x0", c.figures.panel_x0);
    r.read("panel_t", c.figures.panel_t);
    r.read("exact_x0", c.figures.exact_x0);
    r.read("exact_t", c.figures.exact_t);
    r.read("exact_points", c.figures.exact_points);
    r.read("timestamp", c.figures.timestamp);
    r.finish();
  }
  root.finish();
  return c;
}

void
apply_override(json& j, std::string_view assignment)
{
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("--set expects path.to.field=value, got '" + std::string(assignment) + "'");
  const std::string path(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));

  json value = json::parse(text, nullptr, false);
  if (value.is_discarded())
    value = text;

  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot - start);
    if (key.empty())
      throw ConfigError("--set: empty component in '" + path + "'");
    if (!node->is_object())
      throw ConfigError("--set: '" + path + "' descends into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    if (node->is_null())
      *node = json::object();
    start = dot + 1;
  }
}

ExperimentConfig
load_config(const std::filesystem::path& path)
{
  json j;
  try {
    j = io::read_json(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(j);
}

std::string
config_hash(const ExperimentConfig& config)
{
  return io::fnv1a_hex(to_json(config).dump());
}

std::filesystem::path
output_root(const ExperimentConfig& config)
{
  std::filesystem::path dir(config.output_dir);
  if (dir.is_relative()) {
    if (const char* root = std::getenv(kOutputRootEnv); root != nullptr && *root != '\0')
      return std::filesystem::path(root) / dir;
  }
  return dir;
}

} // namespace wfdens::harness
