#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "halfres/errors.hpp"
#include "halfres/harness/commands.hpp"

namespace {

enum Exit { kPass = 0, kFail = 1, kConfig = 2, kInternal = 3 };

}  // namespace

int main(int argc, char** argv) {
  using namespace halfres::harness;
  CLI::App app{"halfres: resonance experiments for half-line Schrodinger operators"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::size_t threads = 1;
  std::uint64_t seed = RunContext{}.seed;
  bool quiet = false;

  struct Entry {
    const char* name;
    const char* help;
    CommandResult (*run)(const ExperimentConfig&, const RunContext&);
  };
  const Entry entries[] = {
      {"validate", "Check decay, weight, window and grid invariants", run_validate},
      {"scan", "Resonance tables for every h (or every l)", run_scan},
      {"quasimode", "Cutoff Dirichlet quasimodes and their accuracy", run_quasimode},
      {"theorem-check", "Quasimode-to-resonance end-to-end check", run_theorem_check},
      {"ads-sweep", "Width sweep over the ads_like family", run_ads_sweep},
      {"bounds", "Resolvent and complex-analysis bound suites", run_bounds},
  };
  const Entry* chosen = nullptr;
  for (const auto& e : entries) {
    auto* sub = app.add_subcommand(e.name, e.help);
    sub->add_option("--config", config_path, "YAML experiment config")->required();
    sub->add_option("--out", out_dir, "Output directory (default: output_dir from the config)");
    sub->add_option("--threads", threads, "Worker threads for per-h experiments")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed of the property-suite function families");
    sub->add_flag("--quiet", quiet, "Do not print the report");
    sub->callback([&chosen, &e] { chosen = &e; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    const auto cfg = load_experiment_config(config_path);
    RunContext ctx;
    ctx.threads = threads;
    ctx.seed = seed;
    ctx.out = out_dir.empty() ? cfg.output_dir : out_dir;
    const auto result = chosen->run(cfg, ctx);
    if (!quiet) std::cout << result.report.dump(2) << "\n";
    return result.status == 0 ? kPass : kFail;
  } catch (const halfres::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
