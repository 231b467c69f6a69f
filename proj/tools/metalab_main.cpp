// metalab: run meta-learning experiments described by a JSON config.
//
//   metalab run <config> [--check] [--seed <u64>] [--output <dir>] [--trials <k>]
//
// Exit codes: 0 success, 1 config error, 2 runtime error, 3 failed guarantee
// under --check.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "metalab/config.hpp"
#include "metalab/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitCheckFailed = 3;

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("METALAB_SEED");
  if (!raw || !*raw) return std::nullopt;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used, 10);
    if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
    return static_cast<std::uint64_t>(v);
  } catch (const std::exception&) {
    std::cerr << "warning: ignoring METALAB_SEED='" << raw << "' (not an unsigned integer)\n";
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metalab - bi-level representation learning and generalization-guarantee lab"};
  app.require_subcommand(1);

  std::string config_path;
  bool check = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
  std::optional<std::size_t> trials;

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Path to the JSON experiment config")->required();
  run->add_flag("--check", check, "Exit with status 3 when a guarantee check fails");
  run->add_option("--seed", seed, "Seed override (beats the config and METALAB_SEED)");
  run->add_option("--output", output, "Output directory override");
  run->add_option("--trials", trials, "Monte Carlo trial count override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  metalab::ConfigOverrides overrides;
  overrides.seed = seed;
  overrides.fallback_seed = seed_from_env();
  overrides.trials = trials;
  if (output) overrides.output = *output;

  metalab::ExperimentConfig cfg;
  try {
    cfg = metalab::load_config(config_path, overrides);
  } catch (const metalab::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  }

  metalab::RunReport report;
  try {
    report = metalab::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }

  std::cout << "kind:        " << metalab::to_string(report.kind) << '\n'
            << "config hash: " << report.config_hash << '\n'
            << "seed:        " << report.seed << '\n'
            << "summary:     " << report.payload_json << '\n';
  for (const auto& f : report.files) std::cout << "wrote        " << f.string() << '\n';
  std::cout << "elapsed:     " << report.duration_seconds << " s\n";

  if (check && report.check_passed.has_value() && !*report.check_passed) {
    std::cerr << "check failed: guarantee not met\n";
    return kExitCheckFailed;
  }
  return kExitOk;
}
