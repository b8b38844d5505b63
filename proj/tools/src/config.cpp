#include "config.hpp"

#include <fracpoint/verify.hpp>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace fracpoint::app {

namespace {

class Reader {
public:
  explicit Reader(std::filesystem::path source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const toml::source_region& where, const std::string& what) const {
    if (where.begin.line > 0) throw ConfigError(fmt::format("{}:{}: {}", source_.string(), where.begin.line, what));
    throw ConfigError(fmt::format("{}: {}", source_.string(), what));
  }

  std::string anchor(const toml::source_region& where) const {
    return where.begin.line > 0 ? fmt::format("{}:{}: ", source_.string(), where.begin.line)
                                : source_.string() + ": ";
  }

  void allow_only(const toml::table& table, const std::string& section, std::set<std::string> keys) const {
    for (const auto& [key, node] : table) {
      const std::string name(key.str());
      if (!keys.contains(name)) {
        const std::string full = section.empty() ? name : section + "." + name;
        fail(node.source(), fmt::format("unknown key '{}'", full));
      }
    }
  }

  const toml::table* section(const toml::table& root, const std::string& name) const {
    const toml::node* node = root.get(name);
    if (!node) return nullptr;
    const toml::table* table = node->as_table();
    if (!table) fail(node->source(), fmt::format("'{}' must be a table", name));
    return table;
  }

  void number(const toml::table& t, const std::string& sec, const char* key, double& out) const {
    const toml::node* node = t.get(key);
    if (!node) return;
    if (auto v = node->value<double>(); v && (node->is_floating_point() || node->is_integer())) {
      out = *v;
      if (!std::isfinite(out)) fail(node->source(), fmt::format("{}.{} must be finite", sec, key));
      return;
    }
    fail(node->source(), fmt::format("{}.{} must be a number", sec, key));
  }

  void integer(const toml::table& t, const std::string& sec, const char* key, std::int64_t& out) const {
    const toml::node* node = t.get(key);
    if (!node) return;
    if (!node->is_integer()) fail(node->source(), fmt::format("{}.{} must be an integer", sec, key));
    out = node->as_integer()->get();
  }

  void integer(const toml::table& t, const std::string& sec, const char* key, int& out) const {
    std::int64_t v = out;
    integer(t, sec, key, v);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      fail(t.get(key)->source(), fmt::format("{}.{} is out of range", sec, key));
    }
    out = static_cast<int>(v);
  }

  void string(const toml::table& t, const std::string& sec, const char* key, std::string& out) const {
    const toml::node* node = t.get(key);
    if (!node) return;
    if (!node->is_string()) fail(node->source(), fmt::format("{}.{} must be a string", sec, key));
    out = node->as_string()->get();
  }

  void boolean(const toml::table& t, const std::string& sec, const char* key, bool& out) const {
    const toml::node* node = t.get(key);
    if (!node) return;
    if (!node->is_boolean()) fail(node->source(), fmt::format("{}.{} must be true or false", sec, key));
    out = node->as_boolean()->get();
  }

  std::vector<double> numbers(const toml::node& node, const std::string& what, std::size_t size) const {
    const toml::array* array = node.as_array();
    if (!array || array->size() != size) fail(node.source(), fmt::format("{} must be an array of {} numbers", what, size));
    std::vector<double> out;
    for (const auto& item : *array) {
      auto v = item.value<double>();
      if (!v || !std::isfinite(*v)) fail(node.source(), fmt::format("{} must be an array of {} numbers", what, size));
      out.push_back(*v);
    }
    return out;
  }

  std::vector<ModeCoefficient> mode_list(const toml::node& node, const std::string& what, int K) const {
    const toml::array* array = node.as_array();
    if (!array) fail(node.source(), what + " must be an array of [m, n, coeff] triples");
    std::vector<ModeCoefficient> out;
    for (const auto& item : *array) {
      const auto v = numbers(item, what + " entry", 3);
      const int m = static_cast<int>(v[0]);
      const int n = static_cast<int>(v[1]);
      if (m != v[0] || n != v[1] || m < 1 || n < 1 || m > K || n > K) {
        fail(item.source(), fmt::format("{} entry ({}, {}) is not a mode in 1..{}", what, v[0], v[1], K));
      }
      out.push_back({m, n, v[2]});
    }
    return out;
  }

private:
  std::filesystem::path source_;
};

RunConfig read(const toml::table& root, const std::filesystem::path& source) {
  const Reader r(source);
  RunConfig cfg;
  cfg.source = source;
  r.allow_only(root, "",
               {"discretization", "problem", "nonlinearity", "forcing", "observations", "optimizer", "control",
                "output", "verify"});

  toml::source_region basis_at{};
  if (const auto* t = r.section(root, "discretization")) {
    basis_at = t->source();
    r.allow_only(*t, "discretization", {"s", "theta", "K", "M"});
    r.number(*t, "discretization", "s", cfg.s);
    r.number(*t, "discretization", "theta", cfg.theta);
    r.integer(*t, "discretization", "K", cfg.modes);
    if (t->contains("M")) {
      int cells = 0;
      r.integer(*t, "discretization", "M", cells);
      cfg.cells = cells;
    }
  }
  try {
    const EigenBasis basis(cfg.modes, cfg.s, cfg.theta);
    if (cfg.grid() < basis.min_grid()) {
      r.fail(basis_at, fmt::format("discretization.M = {} is too coarse; K = {} needs at least {}", cfg.grid(),
                                   cfg.modes, basis.min_grid()));
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.fail(basis_at, e.what());
  }

  toml::source_region problem_at{};
  if (const auto* t = r.section(root, "problem")) {
    problem_at = t->source();
    r.allow_only(*t, "problem", {"alpha", "lower", "upper"});
    r.number(*t, "problem", "alpha", cfg.alpha);
    r.number(*t, "problem", "lower", cfg.lower);
    r.number(*t, "problem", "upper", cfg.upper);
  }
  if (!(cfg.alpha > 0.0)) r.fail(problem_at, "problem.alpha must be positive");
  if (!(cfg.lower < cfg.upper)) r.fail(problem_at, "problem.lower must be below problem.upper");

  if (const auto* t = r.section(root, "nonlinearity")) {
    r.allow_only(*t, "nonlinearity", {"name", "gamma"});
    r.string(*t, "nonlinearity", "name", cfg.nonlinearity);
    r.number(*t, "nonlinearity", "gamma", cfg.gamma);
    try {
      (void)nonlinearities::by_name(cfg.nonlinearity, cfg.gamma);
    } catch (const Error& e) {
      r.fail(t->source(), e.what());
    }
  }

  if (const auto* t = r.section(root, "forcing")) {
    r.allow_only(*t, "forcing", {"preset", "value", "modes"});
    std::string preset = "zero";
    r.string(*t, "forcing", "preset", preset);
    static const std::array<std::pair<const char*, ForcingPreset>, 4> presets{{
        {"zero", ForcingPreset::zero},
        {"constant", ForcingPreset::constant},
        {"manufactured", ForcingPreset::manufactured},
        {"coefficients", ForcingPreset::coefficients},
    }};
    const auto it = std::ranges::find_if(presets, [&](const auto& p) { return preset == p.first; });
    if (it == presets.end()) {
      r.fail(t->get("preset")->source(),
             fmt::format("unknown forcing.preset '{}' (expected zero, constant, manufactured or coefficients)", preset));
    }
    cfg.forcing.preset = it->second;
    r.number(*t, "forcing", "value", cfg.forcing.value);
    if (const toml::node* modes = t->get("modes")) {
      cfg.forcing.modes = r.mode_list(*modes, "forcing.modes", cfg.modes);
    }
    if (cfg.forcing.preset == ForcingPreset::manufactured && cfg.forcing.modes.empty()) {
      cfg.forcing.modes = default_manufactured_state();
    }
  }

  if (const toml::node* node = root.get("observations")) {
    const toml::array* list = node->as_array();
    if (!list || !list->is_array_of_tables()) r.fail(node->source(), "observations must be an array of tables");
    for (const auto& item : *list) {
      const auto& t = *item.as_table();
      r.allow_only(t, "observations", {"point", "target"});
      const toml::node* point = t.get("point");
      if (!point) r.fail(t.source(), "observation needs a point = [x, y]");
      const auto xy = r.numbers(*point, "observations.point", 2);
      PointObservation obs{{xy[0], xy[1]}, 0.0};
      r.number(t, "observations", "target", obs.target);
      if (!is_interior(obs.point)) {
        throw DomainError(r.anchor(point->source()) +
                          fmt::format("observation point ({}, {}) is not in the open unit square", xy[0], xy[1]));
      }
      cfg.observations.push_back(obs);
    }
  }

  if (const auto* t = r.section(root, "optimizer")) {
    r.allow_only(*t, "optimizer", {"tol", "max_iter", "seed"});
    r.number(*t, "optimizer", "tol", cfg.tolerance);
    r.integer(*t, "optimizer", "max_iter", cfg.max_iterations);
    std::int64_t seed = static_cast<std::int64_t>(cfg.seed);
    r.integer(*t, "optimizer", "seed", seed);
    if (seed < 0) r.fail(t->get("seed")->source(), "optimizer.seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(seed);
    if (!(cfg.tolerance > 0.0)) r.fail(t->source(), "optimizer.tol must be positive");
    if (cfg.max_iterations < 1) r.fail(t->source(), "optimizer.max_iter must be at least 1");
  }

  if (const auto* t = r.section(root, "control")) {
    r.allow_only(*t, "control", {"space", "initial"});
    std::string space = "full";
    r.string(*t, "control", "space", space);
    if (space == "full") {
      cfg.control_space = ControlSpaceKind::full;
    } else if (space == "constant") {
      cfg.control_space = ControlSpaceKind::constant;
    } else if (space == "halves") {
      cfg.control_space = ControlSpaceKind::halves;
    } else {
      r.fail(t->get("space")->source(),
             fmt::format("unknown control.space '{}' (expected full, constant or halves)", space));
    }
    r.number(*t, "control", "initial", cfg.initial);
  }

  if (const auto* t = r.section(root, "output")) {
    r.allow_only(*t, "output", {"dir"});
    std::string dir = cfg.output_dir.string();
    r.string(*t, "output", "dir", dir);
    cfg.output_dir = dir;
  }

  if (const auto* t = r.section(root, "verify")) {
    r.allow_only(*t, "verify", {"inject_fault"});
    r.boolean(*t, "verify", "inject_fault", cfg.inject_fault);
  }

  try {
    build_problem(cfg);
  } catch (const DomainError& e) {
    throw DomainError(source.string() + ": " + e.what());
  } catch (const Error& e) {
    throw ConfigError(source.string() + ": " + e.what());
  }
  return cfg;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& source) {
  toml::table root;
  try {
    root = toml::parse(text, source.string());
  } catch (const toml::parse_error& e) {
    throw ConfigError(fmt::format("{}:{}: {}", source.string(), e.source().begin.line, e.description()));
  }
  return read(root, source);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path);
}

std::vector<ModeCoefficient> default_manufactured_state() { return {{1, 1, 0.2}, {2, 2, 0.1}}; }

SpectralField to_field(const std::vector<ModeCoefficient>& modes, int K) {
  SpectralField out = SpectralField::zero(K);
  for (const auto& c : modes) out({c.m, c.n}) += c.value;
  return out;
}

ControlProblem build_problem(const RunConfig& config) {
  const EigenBasis basis(config.modes, config.s, config.theta);
  const int cells = config.grid();
  Nonlinearity a = nonlinearities::by_name(config.nonlinearity, config.gamma);

  GridFunction forcing = GridFunction::zero(cells);
  switch (config.forcing.preset) {
    case ForcingPreset::zero:
      break;
    case ForcingPreset::constant:
      forcing = GridFunction::constant(cells, config.forcing.value);
      break;
    case ForcingPreset::manufactured:
      forcing = manufactured_semilinear(to_field(config.forcing.modes, config.modes), a, basis, cells).forcing;
      break;
    case ForcingPreset::coefficients:
      forcing = synthesize(to_field(config.forcing.modes, config.modes), cells);
      break;
  }

  ControlProblem prob{basis, std::move(forcing), config.alpha, config.lower, config.upper, config.observations,
                      std::move(a)};
  switch (config.control_space) {
    case ControlSpaceKind::full:
      break;
    case ControlSpaceKind::constant:
      prob.space = ControlSpace::constants(cells);
      break;
    case ControlSpaceKind::halves:
      prob.space = ControlSpace::halves(cells);
      break;
  }
  prob.validate();
  return prob;
}

GridFunction initial_control(const RunConfig& config, const ControlProblem& prob) {
  return project_admissible(GridFunction::constant(prob.cells(), config.initial), prob);
}

}  // namespace fracpoint::app
