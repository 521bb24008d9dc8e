#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ctc/cli.hpp"

namespace ctc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

double to_real(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidConfig(key + ": expected a number, got '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(x)) throw InvalidConfig(key + ": expected a finite number, got '" + text + "'");
  return x;
}

long to_int(const std::string& key, const std::string& text) {
  const double x = to_real(key, text);
  if (x != std::floor(x) || std::abs(x) > 9e15) throw InvalidConfig(key + ": expected an integer, got '" + text + "'");
  return static_cast<long>(x);
}

void set_scenario_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "name") cfg.scenario = value;
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(key, value));
  else if (key == "workers") cfg.workers = static_cast<int>(to_int(key, value));
  else if (key == "out" || key == "dir") cfg.out_dir = value;
  else throw InvalidConfig("unknown key '" + key + "'");
}

}  // namespace

std::vector<double> parse_grid(const std::string& raw) {
  const std::string text = trim(raw);
  if (text.empty()) return {};
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(trim(p));
    if (parts.size() != 3) throw InvalidConfig("grid '" + text + "' must be lo:hi:step");
    const double lo = to_real("grid", parts[0]), hi = to_real("grid", parts[1]), step = to_real("grid", parts[2]);
    if (!(step > 0) || hi < lo) throw InvalidConfig("grid '" + text + "' needs step > 0 and hi >= lo");
    const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (n > 10000000) throw InvalidConfig("grid '" + text + "' is too large");
    for (long i = 0; i < n; ++i) out.push_back(i + 1 == n && std::abs(lo + i * step - hi) < 1e-9 * step ? hi : lo + i * step);
    return out;
  }
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) out.push_back(to_real("grid", trim(p)));
  return out;
}

void ScenarioConfig::validate() const {
  const auto& info = scenario_info(scenario);
  for (const auto& [key, value] : params) {
    const ParamSpec* spec = nullptr;
    for (const auto& p : info.params)
      if (p.name == key) spec = &p;
    if (!spec) throw InvalidConfig("unknown key '" + key + "' for scenario " + scenario);
    switch (spec->kind) {
      case ParamKind::Real: to_real(key, value); break;
      case ParamKind::Int: to_int(key, value); break;
      case ParamKind::Grid:
        if (parse_grid(value).empty()) throw InvalidConfig(key + ": empty grid");
        break;
      case ParamKind::Text: break;
    }
  }
  if (workers < 0) throw InvalidConfig("workers must be >= 0");
}

ScenarioConfig parse_config(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidConfig(std::string("config syntax: ") + e.what());
  }
  ScenarioConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) throw InvalidConfig("key '" + section + "' outside a section");
    for (const auto& [key, node] : body) {
      const std::string value = trim(node.data());
      if (section == "scenario" || section == "output") set_scenario_key(cfg, key, value);
      else if (section == "params" || section == "truncation") cfg.params[key] = value;
      else throw InvalidConfig("unknown section [" + section + "]");
    }
  }
  if (cfg.scenario.empty()) throw InvalidConfig("missing [scenario] name");
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidConfig("cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ScenarioConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InvalidConfig("override '" + assignment + "' must be key=value");
  const std::string key = trim(assignment.substr(0, eq)), value = trim(assignment.substr(eq + 1));
  static const std::set<std::string> scenario_keys{"seed", "workers", "out"};
  if (scenario_keys.count(key)) set_scenario_key(cfg, key, value);
  else cfg.params[key] = value;
  cfg.validate();
}

AxisSpec parse_axis(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) return {};
  const auto eq = t.find('=');
  if (eq == std::string::npos) throw InvalidConfig("axis '" + t + "' must be key=lo:hi:step");
  return {trim(t.substr(0, eq)), parse_grid(t.substr(eq + 1))};
}

}  // namespace ctc
