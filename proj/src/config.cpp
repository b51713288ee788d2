#include "ellstar/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ellstar/errors.hpp"

namespace ellstar {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

long to_integer(const std::string& s) {
  long v = 0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end || s.empty()) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
  return v;
}

std::size_t to_count(const std::string& s) {
  const long v = to_integer(s);
  if (v <= 0) throw ConfigError("expected a positive integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& s) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError("expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) {
    if (!item.empty()) out.push_back(to_double(item));
  }
  if (out.empty()) throw ConfigError("expected a comma-separated list of numbers");
  return out;
}

using Setter = std::function<void(ModelConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"components", [](ModelConfig& c, const std::string& v) { c.components = parse_components(v); }},
      {"potential.kind",
       [](ModelConfig& c, const std::string& v) { c.potential.kind = parse_potential_kind(v); }},
      {"potential.M", [](ModelConfig& c, const std::string& v) { c.potential.mass = to_double(v); }},
      {"potential.b",
       [](ModelConfig& c, const std::string& v) { c.potential.softening = to_double(v); }},
      {"grid.r_max",
       [](ModelConfig& c, const std::string& v) {
         if (v == "auto") {
           c.grid.r_max.reset();
         } else {
           c.grid.r_max = to_double(v);
         }
       }},
      {"grid.n_points", [](ModelConfig& c, const std::string& v) { c.grid.n_points = to_count(v); }},
      {"solver.dtau", [](ModelConfig& c, const std::string& v) { c.solver.dtau = to_double(v); }},
      {"solver.max_iterations",
       [](ModelConfig& c, const std::string& v) {
         c.solver.max_iterations = static_cast<int>(to_count(v));
       }},
      {"solver.energy_tolerance",
       [](ModelConfig& c, const std::string& v) { c.solver.energy_tolerance = to_double(v); }},
      {"solver.residual_tolerance",
       [](ModelConfig& c, const std::string& v) { c.solver.residual_tolerance = to_double(v); }},
      {"solver.mixing", [](ModelConfig& c, const std::string& v) { c.solver.mixing = to_double(v); }},
      {"solver.self_gravity",
       [](ModelConfig& c, const std::string& v) { c.solver.self_gravity = to_bool(v); }},
      {"solver.seed_check",
       [](ModelConfig& c, const std::string& v) { c.solver.seed_check = to_bool(v); }},
      {"evolution.dt", [](ModelConfig& c, const std::string& v) { c.evolution.dt = to_double(v); }},
      {"evolution.dt_factor",
       [](ModelConfig& c, const std::string& v) { c.evolution.dt_factor = to_double(v); }},
      {"evolution.t_final",
       [](ModelConfig& c, const std::string& v) { c.evolution.t_final = to_double(v); }},
      {"evolution.periods",
       [](ModelConfig& c, const std::string& v) { c.evolution.periods = to_double(v); }},
      {"evolution.output_every",
       [](ModelConfig& c, const std::string& v) {
         c.evolution.output_every = static_cast<int>(to_count(v));
       }},
      {"evolution.perturbation",
       [](ModelConfig& c, const std::string& v) { c.evolution.perturbation = v; }},
      {"evolution.amplitude",
       [](ModelConfig& c, const std::string& v) { c.evolution.amplitude = to_double(v); }},
      {"evolution.seed",
       [](ModelConfig& c, const std::string& v) {
         c.evolution.seed = static_cast<std::uint64_t>(to_integer(v));
       }},
      {"evolution.n_points",
       [](ModelConfig& c, const std::string& v) { c.evolution.n_points = to_count(v); }},
      {"evolution.domain_factor",
       [](ModelConfig& c, const std::string& v) { c.evolution.domain_factor = to_double(v); }},
      {"evolution.boundary_guard",
       [](ModelConfig& c, const std::string& v) { c.evolution.boundary_guard = to_bool(v); }},
      {"shoot.n_nodes",
       [](ModelConfig& c, const std::string& v) { c.shoot.n_nodes = static_cast<int>(to_integer(v)); }},
      {"shoot.central_value",
       [](ModelConfig& c, const std::string& v) { c.shoot.central_value = to_double(v); }},
      {"sweep.ell",
       [](ModelConfig& c, const std::string& v) { c.sweep.ell = static_cast<int>(to_integer(v)); }},
      {"sweep.M", [](ModelConfig& c, const std::string& v) { c.sweep.M = to_list(v); }},
      {"sweep.N", [](ModelConfig& c, const std::string& v) { c.sweep.N = to_list(v); }},
      {"sweep.workers",
       [](ModelConfig& c, const std::string& v) { c.sweep.workers = static_cast<int>(to_integer(v)); }},
      {"tolerance.pointwise",
       [](ModelConfig& c, const std::string& v) { c.tolerance.pointwise = to_double(v); }},
      {"tolerance.multi",
       [](ModelConfig& c, const std::string& v) { c.tolerance.multi = to_double(v); }},
      {"tolerance.comparison",
       [](ModelConfig& c, const std::string& v) { c.tolerance.comparison = to_double(v); }},
      {"tolerance.limit",
       [](ModelConfig& c, const std::string& v) { c.tolerance.limit = to_double(v); }},
      {"verify.n_points",
       [](ModelConfig& c, const std::string& v) { c.verify_points = to_count(v); }},
      {"output.directory",
       [](ModelConfig& c, const std::string& v) { c.output_directory = v; }},
  };
  return table;
}

}  // namespace

std::vector<ComponentSpec> parse_components(const std::string& text) {
  std::vector<ComponentSpec> out;
  for (const auto& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw ConfigError("component '" + item + "' is not of the form ell:N");
    }
    const long ell = to_integer(trim(item.substr(0, colon)));
    out.push_back({static_cast<int>(ell), to_double(trim(item.substr(colon + 1)))});
  }
  validate_components(out);
  return out;
}

void ModelConfig::validate() const {
  validate_components(components);
  potential.validate();
  solver.validate();
  if (grid.r_max && !(*grid.r_max > 0.0)) throw ConfigError("grid.r_max must be positive");
  if (grid.n_points < kMinGridPoints) throw ConfigError("grid.n_points must be >= 16");
  if (evolution.dt && !(*evolution.dt > 0.0)) throw ConfigError("evolution.dt must be positive");
  if (!(evolution.dt_factor > 0.0)) throw ConfigError("evolution.dt_factor must be positive");
  if (evolution.t_final && !(*evolution.t_final > 0.0)) {
    throw ConfigError("evolution.t_final must be positive");
  }
  if (!(evolution.periods > 0.0)) throw ConfigError("evolution.periods must be positive");
  if (evolution.perturbation != "none" && evolution.perturbation != "radial_bump" &&
      evolution.perturbation != "noise") {
    throw ConfigError("evolution.perturbation must be none, radial_bump or noise");
  }
  if (!(evolution.amplitude >= 0.0)) throw ConfigError("evolution.amplitude must be >= 0");
  if (evolution.n_points < kMinGridPoints) throw ConfigError("evolution.n_points must be >= 16");
  if (!(evolution.domain_factor >= 1.0)) throw ConfigError("evolution.domain_factor must be >= 1");
  if (shoot.n_nodes < 0) throw ConfigError("shoot.n_nodes must be >= 0");
  if (shoot.central_value && !(*shoot.central_value > 0.0)) {
    throw ConfigError("shoot.central_value must be positive");
  }
  if (sweep.ell < 0) throw ConfigError("sweep.ell must be >= 0");
  if (sweep.workers < 0) throw ConfigError("sweep.workers must be >= 0");
  for (double m : sweep.M) {
    if (!(m >= 0.0)) throw ConfigError("sweep.M values must be >= 0");
  }
  for (double n : sweep.N) {
    if (!(n > 0.0)) throw ConfigError("sweep.N values must be positive");
  }
  if (!(tolerance.pointwise > 0.0 && tolerance.multi > 0.0 && tolerance.comparison > 0.0 &&
        tolerance.limit > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  if (verify_points < kMinGridPoints) throw ConfigError("verify.n_points must be >= 16");
}

ModelConfig parse_config(std::istream& in, const std::string& source) {
  ModelConfig cfg;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(number) + ": ";
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + "unknown key '" + key + "'");
    try {
      it->second(cfg, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

}  // namespace ellstar
