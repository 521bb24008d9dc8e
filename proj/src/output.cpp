#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ctc/cli.hpp"

namespace ctc {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_real(row[i]);
    out += '\n';
  }
  return out;
}

Json to_json(const ScenarioResult& r) {
  Json j;
  j["scenario"] = r.scenario;
  j["params"] = r.params;
  j["outputs"] = r.outputs;
  Json tables = Json::array();
  for (const auto& t : r.tables) tables.push_back({{"name", t.name}, {"columns", t.columns}, {"rows", t.rows.size()}});
  j["tables"] = tables;
  j["metadata"] = r.metadata;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidConfig("cannot write " + path);
  f << text;
}

std::vector<std::string> write_artifacts(const ScenarioResult& r, const std::string& dir, const std::string& stem) {
  std::filesystem::create_directories(dir);
  const std::string base = (std::filesystem::path(dir) / (stem.empty() ? r.scenario : stem)).string();
  std::vector<std::string> paths{base + ".json"};
  write_text(paths[0], to_json(r).dump(2) + "\n");
  for (const auto& t : r.tables) {
    paths.push_back(base + "_" + t.name + ".csv");
    write_text(paths.back(), to_csv(t));
  }
  return paths;
}

}  // namespace ctc
