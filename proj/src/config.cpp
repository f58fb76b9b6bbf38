#include "whichpath/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace whichpath {

ConfigError::ConfigError(const std::string& message, std::optional<int> line_, std::optional<int> column_)
    : std::runtime_error([&] {
        if (!line_) return message;
        std::ostringstream os;
        os << "line " << *line_ << ", column " << column_.value_or(1) << ": " << message;
        return os.str();
      }()),
      line(line_),
      column(column_) {}

namespace {

const std::map<std::string, Quantity> kQuantities = {
    {"absorption", Quantity::absorption}, {"wp_before", Quantity::wp_before},
    {"wp_after", Quantity::wp_after},     {"visibility_trace", Quantity::visibility_trace},
    {"profiles", Quantity::profiles},     {"spin_mc", Quantity::spin_mc},
    {"diffusion", Quantity::diffusion},   {"oracle", Quantity::oracle}};

const std::map<std::string, Variable> kVariables = {
    {"gamma_delta_t", Variable::gamma_delta_t}, {"delta_t", Variable::delta_t}, {"phi_r", Variable::phi_r},
    {"gamma", Variable::gamma},                 {"delta", Variable::delta},     {"w", Variable::w},
    {"w_tau_p", Variable::w_tau_p},             {"p", Variable::p}};

template <typename Map>
std::string key_of(const Map& map, typename Map::mapped_type value) {
  for (const auto& [k, v] : map)
    if (v == value) return k;
  return "?";
}

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& message) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) throw ConfigError(message);
  throw ConfigError(message, m.line + 1, m.column + 1);
}

void require_map(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) fail_at(node, "'" + where + "' must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key))
      fail_at(kv.first, "unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

// Accepts plain numbers and the forms pi, k*pi, pi/k, k*pi/m.
double to_number(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail_at(node, "'" + key + "' must be a number");
  const std::string s = node.Scalar();
  static const std::regex pi_form(R"(^\s*([-+]?[0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$)");
  std::smatch m;
  if (std::regex_match(s, m, pi_form)) {
    double k = 1;
    if (m[1].length() > 0) {
      const std::string f = m[1].str();
      if (f == "-") k = -1;
      else if (f == "+") k = 1;
      else {
        try {
          std::size_t used = 0;
          k = std::stod(f, &used);
          if (used != f.size()) throw std::invalid_argument(f);
        } catch (const std::exception&) {
          fail_at(node, "'" + key + "' is not a number: " + s);
        }
      }
    }
    double d = 1;
    if (m[2].matched) d = std::stod(m[2].str());
    return k * std::numbers::pi / d;
  }
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail_at(node, "'" + key + "' is not a number: " + s);
  }
}

std::int64_t to_integer(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail_at(node, "'" + key + "' must be an integer");
  try {
    return node.as<std::int64_t>();
  } catch (const YAML::Exception&) {
    fail_at(node, "'" + key + "' must be an integer");
  }
}

bool to_bool(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<bool>();
  } catch (const YAML::Exception&) {
    fail_at(node, "'" + key + "' must be true or false");
  }
}

std::string to_text(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) fail_at(node, "'" + key + "' must be a string");
  return node.Scalar();
}

Axis parse_axis(const YAML::Node& node, std::size_t index) {
  const std::string where = "axes[" + std::to_string(index) + "]";
  require_map(node, where, {"variable", "min", "max", "steps", "scale", "values"});
  Axis axis;
  if (!node["variable"]) fail_at(node, "'" + where + ".variable' is required");
  const std::string name = to_text(node["variable"], where + ".variable");
  const auto it = kVariables.find(name);
  if (it == kVariables.end()) fail_at(node["variable"], "unknown sweep variable '" + name + "'");
  axis.variable = it->second;

  if (node["values"]) {
    const YAML::Node values = node["values"];
    if (!values.IsSequence() || values.size() == 0)
      fail_at(values, "'" + where + ".values' must be a non-empty list");
    for (const auto& v : values) axis.values.push_back(to_number(v, where + ".values"));
    if (node["min"] || node["max"] || node["steps"] || node["scale"])
      fail_at(node, "'" + where + "' sets both values and min/max/steps");
    axis.min = axis.values.front();
    axis.max = axis.values.back();
    axis.steps = static_cast<int>(axis.values.size());
    return axis;
  }
  for (const char* k : {"min", "max", "steps"})
    if (!node[k]) fail_at(node, "'" + where + "." + k + "' is required");
  axis.min = to_number(node["min"], where + ".min");
  axis.max = to_number(node["max"], where + ".max");
  const auto steps = to_integer(node["steps"], where + ".steps");
  if (steps < 1) fail_at(node["steps"], "'" + where + ".steps' must be >= 1");
  axis.steps = static_cast<int>(steps);
  if (axis.steps > 1 && !(axis.min < axis.max))
    fail_at(node["max"], "'" + where + "' needs min < max");
  if (node["scale"]) {
    const std::string scale = to_text(node["scale"], where + ".scale");
    if (scale == "linear") axis.scale = Scale::linear;
    else if (scale == "log") axis.scale = Scale::log;
    else fail_at(node["scale"], "'" + where + ".scale' must be linear or log");
  }
  if (axis.scale == Scale::log && !(axis.min > 0))
    fail_at(node["min"], "'" + where + "' log scale needs min > 0");
  return axis;
}

// Shared closed_form / n_samples precedence of the averaging sections.
template <typename Spec>
bool parse_averaging(const YAML::Node& node, const std::string& where, Spec& spec,
                     std::vector<std::string>& warnings) {
  bool mc = false;
  if (node["closed_form"]) mc = !to_bool(node["closed_form"], where + ".closed_form");
  if (node["n_samples"]) {
    const auto n = to_integer(node["n_samples"], where + ".n_samples");
    if (n < 1) fail_at(node["n_samples"], "'" + where + ".n_samples' must be >= 1");
    spec.n_samples = static_cast<std::uint64_t>(n);
    if (node["closed_form"] && !mc)
      warnings.push_back(where + ": both closed_form and n_samples are set; Monte Carlo is used");
    mc = true;
  }
  return mc;
}

std::set<Variable> allowed_variables(Quantity q) {
  using V = Variable;
  switch (q) {
    case Quantity::absorption: return {V::gamma_delta_t, V::delta_t, V::phi_r, V::gamma, V::delta};
    case Quantity::wp_before: return {V::gamma_delta_t, V::delta_t, V::gamma};
    case Quantity::wp_after: return {V::gamma_delta_t, V::delta_t, V::phi_r, V::gamma};
    case Quantity::visibility_trace: return {V::gamma_delta_t, V::delta_t, V::phi_r, V::gamma, V::w, V::w_tau_p};
    case Quantity::profiles: return {V::gamma_delta_t, V::delta_t, V::phi_r, V::gamma};
    case Quantity::spin_mc: return {V::w, V::w_tau_p, V::p};
    case Quantity::diffusion: return {V::gamma_delta_t, V::delta_t, V::gamma, V::delta};
    case Quantity::oracle: return {V::gamma_delta_t, V::delta_t, V::phi_r};
  }
  return {};
}

}  // namespace

std::vector<double> Axis::points() const {
  if (!values.empty()) return values;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) return {min};
  for (int i = 0; i < steps; ++i) {
    const double f = static_cast<double>(i) / (steps - 1);
    if (scale == Scale::linear)
      out.push_back(i == steps - 1 ? max : min + f * (max - min));
    else
      out.push_back(i == steps - 1 ? max : min * std::pow(max / min, f));
  }
  return out;
}

void SweepSpec::validate() const {
  std::set<Variable> seen;
  const auto allowed = allowed_variables(quantity);
  for (const auto& axis : axes) {
    const std::string name = to_string(axis.variable);
    if (!allowed.contains(axis.variable))
      throw ConfigError("axis variable '" + name + "' does not apply to quantity '" + to_string(quantity) + "'");
    if (!seen.insert(axis.variable).second) throw ConfigError("axis variable '" + name + "' appears twice");
    if (axis.values.empty() && axis.steps < 1) throw ConfigError("'steps' of axis '" + name + "' must be >= 1");
  }
  if (seen.contains(Variable::gamma_delta_t) && seen.contains(Variable::delta_t))
    throw ConfigError("axes 'gamma_delta_t' and 'delta_t' are mutually exclusive");
  if (seen.contains(Variable::w) && seen.contains(Variable::w_tau_p))
    throw ConfigError("axes 'w' and 'w_tau_p' are mutually exclusive");
  if (!(ramsey.gamma > 0)) throw ConfigError("'ramsey.gamma' must be positive");
  if (!(ramsey.delta_t >= 0)) throw ConfigError("'ramsey.delta_t' must be >= 0");
  if (!(ramsey.tau_p > 0)) throw ConfigError("'ramsey.tau_p' must be positive");
  if (!(diffusion.delta >= 0)) throw ConfigError("'diffusion.delta' must be >= 0");
  if (!(spin.w >= 0)) throw ConfigError("'spin.w' must be >= 0");
  if (!(spin.tau_p > 0)) throw ConfigError("'spin.tau_p' must be positive");
  if (!(spin.p >= 0 && spin.p <= 1)) throw ConfigError("'spin.p' must lie in [0, 1]");
  if (grid.samples < 2) throw ConfigError("'grid.samples' must be >= 2");
  if (!(grid.span > 0)) throw ConfigError("'grid.span' must be positive");
  if (oracle.dt.size() < 3) throw ConfigError("'oracle.dt' needs at least 3 refinement levels");
  for (double dt : oracle.dt)
    if (!(dt > 0)) throw ConfigError("'oracle.dt' entries must be positive");
}

ParsedConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  require_map(root, "", {"quantity", "axes", "seed", "ramsey", "diffusion", "spin", "grid", "oracle", "output"});

  ParsedConfig out;
  SweepSpec& spec = out.spec;
  if (!root["quantity"]) throw ConfigError("'quantity' is required");
  const std::string q = to_text(root["quantity"], "quantity");
  const auto qit = kQuantities.find(q);
  if (qit == kQuantities.end()) fail_at(root["quantity"], "unknown quantity '" + q + "'");
  spec.quantity = qit->second;

  if (root["seed"]) {
    const auto seed = to_integer(root["seed"], "seed");
    if (seed < 0) fail_at(root["seed"], "'seed' must be >= 0");
    spec.seed = static_cast<std::uint64_t>(seed);
  }

  if (const YAML::Node axes = root["axes"]) {
    if (!axes.IsSequence()) fail_at(axes, "'axes' must be a list");
    for (std::size_t i = 0; i < axes.size(); ++i) spec.axes.push_back(parse_axis(axes[i], i));
  }

  if (const YAML::Node r = root["ramsey"]) {
    require_map(r, "ramsey", {"gamma", "delta_t", "phi_r", "tau_p"});
    if (r["gamma"]) spec.ramsey.gamma = to_number(r["gamma"], "ramsey.gamma");
    if (r["delta_t"]) spec.ramsey.delta_t = to_number(r["delta_t"], "ramsey.delta_t");
    if (r["phi_r"]) spec.ramsey.phi_r = to_number(r["phi_r"], "ramsey.phi_r");
    if (r["tau_p"]) spec.ramsey.tau_p = to_number(r["tau_p"], "ramsey.tau_p");
  }

  if (const YAML::Node d = root["diffusion"]) {
    require_map(d, "diffusion", {"delta", "closed_form", "n_samples"});
    if (d["delta"]) spec.diffusion.delta = to_number(d["delta"], "diffusion.delta");
    spec.diffusion.mode =
        parse_averaging(d, "diffusion", spec.diffusion, out.warnings) ? Averaging::monte_carlo : Averaging::closed_form;
  }

  spec.spin.tau_p = spec.ramsey.tau_p;
  if (const YAML::Node s = root["spin"]) {
    require_map(s, "spin", {"w", "tau_p", "p", "closed_form", "n_samples", "apply_to_visibility"});
    if (s["w"]) spec.spin.w = to_number(s["w"], "spin.w");
    if (s["tau_p"]) spec.spin.tau_p = to_number(s["tau_p"], "spin.tau_p");
    if (s["p"]) spec.spin.p = to_number(s["p"], "spin.p");
    if (s["apply_to_visibility"]) spec.spin_factor = to_bool(s["apply_to_visibility"], "spin.apply_to_visibility");
    spec.spin_mode = parse_averaging(s, "spin", spec.spin, out.warnings) ? Averaging::monte_carlo
                                                                          : Averaging::closed_form;
  }

  if (const YAML::Node g = root["grid"]) {
    require_map(g, "grid", {"samples", "span"});
    if (g["samples"]) spec.grid.samples = static_cast<int>(to_integer(g["samples"], "grid.samples"));
    if (g["span"]) spec.grid.span = to_number(g["span"], "grid.span");
  }

  if (const YAML::Node o = root["oracle"]) {
    require_map(o, "oracle", {"dt", "tolerance", "extrapolation_tolerance", "min_order"});
    if (o["dt"]) {
      if (!o["dt"].IsSequence()) fail_at(o["dt"], "'oracle.dt' must be a list");
      spec.oracle.dt.clear();
      for (const auto& v : o["dt"]) spec.oracle.dt.push_back(to_number(v, "oracle.dt"));
    }
    if (o["tolerance"]) spec.oracle.tolerance = to_number(o["tolerance"], "oracle.tolerance");
    if (o["extrapolation_tolerance"])
      spec.oracle.extrapolation_tolerance = to_number(o["extrapolation_tolerance"], "oracle.extrapolation_tolerance");
    if (o["min_order"]) spec.oracle.min_order = to_number(o["min_order"], "oracle.min_order");
  }

  if (const YAML::Node o = root["output"]) {
    require_map(o, "output", {"path", "format", "units", "timestamp"});
    if (o["path"]) spec.output_path = to_text(o["path"], "output.path");
    if (o["format"]) {
      const std::string f = to_text(o["format"], "output.format");
      if (f == "csv") spec.format = Format::csv;
      else if (f == "json") spec.format = Format::json;
      else fail_at(o["format"], "'output.format' must be csv or json");
    }
    if (o["units"]) {
      const std::string u = to_text(o["units"], "output.units");
      if (u == "gamma") spec.units = TimeUnits::gamma;
      else if (u == "si") spec.units = TimeUnits::si;
      else fail_at(o["units"], "'output.units' must be gamma or si");
    }
    if (o["timestamp"]) spec.timestamp = to_bool(o["timestamp"], "output.timestamp");
  }

  spec.diffusion.seed = spec.seed;
  spec.spin.seed = spec.seed;
  spec.validate();
  return out;
}

ParsedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string to_yaml(const SweepSpec& spec, bool single_line) {
  YAML::Emitter e;
  e.SetDoublePrecision(17);
  if (single_line) e << YAML::Flow;
  e << YAML::BeginMap;
  e << YAML::Key << "quantity" << YAML::Value << to_string(spec.quantity);
  e << YAML::Key << "seed" << YAML::Value << spec.seed;
  e << YAML::Key << "axes" << YAML::Value << YAML::BeginSeq;
  for (const auto& a : spec.axes) {
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "variable" << YAML::Value << to_string(a.variable);
    if (!a.values.empty()) {
      e << YAML::Key << "values" << YAML::Value << YAML::Flow << a.values;
    } else {
      e << YAML::Key << "min" << YAML::Value << a.min;
      e << YAML::Key << "max" << YAML::Value << a.max;
      e << YAML::Key << "steps" << YAML::Value << a.steps;
      e << YAML::Key << "scale" << YAML::Value << (a.scale == Scale::linear ? "linear" : "log");
    }
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;

  e << YAML::Key << "ramsey" << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "gamma" << YAML::Value << spec.ramsey.gamma;
  e << YAML::Key << "delta_t" << YAML::Value << spec.ramsey.delta_t;
  e << YAML::Key << "phi_r" << YAML::Value << spec.ramsey.phi_r;
  e << YAML::Key << "tau_p" << YAML::Value << spec.ramsey.tau_p;
  e << YAML::EndMap;

  e << YAML::Key << "diffusion" << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "delta" << YAML::Value << spec.diffusion.delta;
  if (spec.diffusion.mode == Averaging::monte_carlo)
    e << YAML::Key << "n_samples" << YAML::Value << spec.diffusion.n_samples;
  else
    e << YAML::Key << "closed_form" << YAML::Value << true;
  e << YAML::EndMap;

  e << YAML::Key << "spin" << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "w" << YAML::Value << spec.spin.w;
  e << YAML::Key << "tau_p" << YAML::Value << spec.spin.tau_p;
  e << YAML::Key << "p" << YAML::Value << spec.spin.p;
  if (spec.spin_mode == Averaging::monte_carlo)
    e << YAML::Key << "n_samples" << YAML::Value << spec.spin.n_samples;
  else
    e << YAML::Key << "closed_form" << YAML::Value << true;
  e << YAML::Key << "apply_to_visibility" << YAML::Value << spec.spin_factor;
  e << YAML::EndMap;

  e << YAML::Key << "grid" << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "samples" << YAML::Value << spec.grid.samples;
  e << YAML::Key << "span" << YAML::Value << spec.grid.span;
  e << YAML::EndMap;

  e << YAML::Key << "oracle" << YAML::Value << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "dt" << YAML::Value << YAML::Flow << spec.oracle.dt;
  e << YAML::Key << "tolerance" << YAML::Value << spec.oracle.tolerance;
  e << YAML::Key << "extrapolation_tolerance" << YAML::Value << spec.oracle.extrapolation_tolerance;
  e << YAML::Key << "min_order" << YAML::Value << spec.oracle.min_order;
  e << YAML::EndMap;

  e << YAML::Key << "output" << YAML::Value << YAML::Flow << YAML::BeginMap;
  if (!spec.output_path.empty()) e << YAML::Key << "path" << YAML::Value << spec.output_path;
  e << YAML::Key << "format" << YAML::Value << to_string(spec.format);
  e << YAML::Key << "units" << YAML::Value << (spec.units == TimeUnits::gamma ? "gamma" : "si");
  e << YAML::Key << "timestamp" << YAML::Value << spec.timestamp;
  e << YAML::EndMap;
  e << YAML::EndMap;
  return e.c_str();
}

std::string to_string(Quantity q) { return key_of(kQuantities, q); }
std::string to_string(Variable v) { return key_of(kVariables, v); }
std::string to_string(Format f) { return f == Format::csv ? "csv" : "json"; }

}  // namespace whichpath
