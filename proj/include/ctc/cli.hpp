#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ctc/errors.hpp"
#include "json.hpp"

namespace ctc {

using Json = nlohmann::ordered_json;

enum class ParamKind { Real, Int, Text, Grid };

struct ParamSpec {
  std::string name;
  ParamKind kind;
  std::string fallback;
  std::string help;
};

struct ScenarioInfo {
  std::string name;
  std::string summary;
  std::vector<ParamSpec> params;
};

const std::vector<ScenarioInfo>& scenario_registry();
const ScenarioInfo& scenario_info(const std::string& name);  // UnknownScenario

struct ScenarioConfig {
  std::string scenario;
  std::map<std::string, std::string> params;  // raw text, checked against the registry
  std::uint64_t seed = 1;
  std::string out_dir;                        // empty: no artifacts
  int workers = 0;                            // 0: environment / hardware default

  void validate() const;  // UnknownScenario, InvalidConfig
};

// key = value lines grouped in [scenario], [params], [truncation], [output].
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);
// "key=value"; scenario keys (seed, out, workers) are accepted too.
void apply_override(ScenarioConfig& cfg, const std::string& assignment);

// "lo:hi:step", "a,b,c" or a single number.
std::vector<double> parse_grid(const std::string& text);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ScenarioResult {
  std::string scenario;
  Json params = Json::object();
  Json outputs = Json::object();
  std::vector<Table> tables;
  Json metadata = Json::object();
};

ScenarioResult run(const ScenarioConfig& cfg);

struct AxisSpec {
  std::string key;
  std::vector<double> values;  // empty: single run
};
AxisSpec parse_axis(const std::string& text);  // "key=lo:hi:step" or "key=a,b,c"

struct SweepResult {
  std::vector<ScenarioResult> runs;
  Table merged;
};
SweepResult sweep(const ScenarioConfig& cfg, const AxisSpec& axis);

// 17 significant digits.
std::string format_real(double x);
std::string to_csv(const Table& t);
Json to_json(const ScenarioResult& r);
// <dir>/<stem>.json plus <dir>/<stem>_<table>.csv; returns the written paths.
std::vector<std::string> write_artifacts(const ScenarioResult& r, const std::string& dir, const std::string& stem = "");
void write_text(const std::string& path, const std::string& text);

}  // namespace ctc
