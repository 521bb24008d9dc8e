#include <iostream>

#include "CLI11.hpp"
#include "ctc/cli.hpp"
#include "ctc/deutsch.hpp"

using namespace ctc;

namespace {

ScenarioConfig build_config(const std::string& scenario, const std::string& config_path,
                            const std::vector<std::string>& sets, const std::string& seed, const std::string& out,
                            const std::string& workers) {
  ScenarioConfig cfg;
  if (!config_path.empty()) cfg = load_config(config_path);
  if (!scenario.empty()) {
    if (!config_path.empty() && cfg.scenario != scenario)
      throw InvalidConfig("config is for " + cfg.scenario + ", not " + scenario);
    cfg.scenario = scenario;
  }
  if (cfg.scenario.empty()) throw InvalidConfig("no scenario given");
  // Flags win over the file.
  for (const auto& s : sets) apply_override(cfg, s);
  if (!seed.empty()) apply_override(cfg, "seed=" + seed);
  if (!workers.empty()) apply_override(cfg, "workers=" + workers);
  if (!out.empty()) cfg.out_dir = out;
  cfg.validate();
  return cfg;
}

void report(const ScenarioResult& r, const std::string& dir, const std::string& stem) {
  if (dir.empty()) {
    std::cout << to_json(r).dump(2) << "\n";
    for (const auto& t : r.tables) std::cout << "# " << t.name << "\n" << to_csv(t);
  } else {
    for (const auto& path : write_artifacts(r, dir, stem)) std::cout << path << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-timelike-curve circuit and field simulations"};
  app.require_subcommand(1);

  std::string scenario, config_path, seed, out, workers, axis;
  std::vector<std::string> sets;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("scenario", scenario, "scenario name (see list)");
    sub->add_option("--config,-c", config_path, "key = value config file");
    sub->add_option("--set", sets, "parameter override key=value")->take_all()->allow_extra_args(false);
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--out", out, "artifact directory");
    sub->add_option("--workers", workers, "worker threads (overrides CTC_WORKERS)");
  };
  auto* run_cmd = app.add_subcommand("run", "run one scenario");
  add_common(run_cmd);
  auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario over a parameter axis");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--axis", axis, "key=lo:hi:step or key=a,b,c");
  auto* list_cmd = app.add_subcommand("list", "print the scenario registry");
  bool verbose = false;
  list_cmd->add_flag("--params,-p", verbose, "show parameters");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& s : scenario_registry()) {
        std::cout << s.name << "\t" << s.summary << "\n";
        if (verbose)
          for (const auto& p : s.params) std::cout << "    " << p.name << " = " << p.fallback << "\t" << p.help << "\n";
      }
      return 0;
    }
    const auto cfg = build_config(scenario, config_path, sets, seed, out, workers);
    if (run_cmd->parsed()) {
      report(run(cfg), cfg.out_dir, "");
      return 0;
    }
    const auto result = sweep(cfg, parse_axis(axis));
    if (cfg.out_dir.empty()) {
      std::cout << to_csv(result.merged);
    } else {
      for (std::size_t i = 0; i < result.runs.size(); ++i)
        report(result.runs[i], cfg.out_dir, cfg.scenario + "_" + std::to_string(i));
      const std::string merged = cfg.out_dir + "/" + cfg.scenario + "_sweep.csv";
      write_text(merged, to_csv(result.merged));
      std::cout << merged << "\n";
    }
    return 0;
  } catch (const NotConverged& e) {
    std::cerr << e.what() << " (residual " << e.residual << ")\n";
    return 3;
  } catch (const NoSolution& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const UnknownScenario& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const InvalidConfig& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
}
