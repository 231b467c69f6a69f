#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "metalab/capacity.hpp"
#include "metalab/env.hpp"
#include "metalab/hypo.hpp"

namespace metalab {

enum class ExperimentKind {
  MetaTrainEval,
  CapacityTable,
  BoundsTable,
  ValidateThm1,
  ValidateThm2,
  TransferRisk,
};

std::string_view to_string(ExperimentKind kind);

/// How the validate kinds obtain (n, m).
enum class SampleSizeMode { Explicit, Theorem };

struct ExperimentParams {
  std::optional<double> alpha;
  std::optional<double> delta;
  std::optional<double> nu;
  std::optional<double> eps1;
  std::optional<double> eps2;
  std::optional<std::size_t> n;
  std::optional<std::size_t> m;
  std::size_t trials = 1000;
  std::optional<std::size_t> targets;   // meta_train_eval: number of target tasks
  std::optional<std::size_t> target_m;  // meta_train_eval: samples per target task
  SampleSizeMode sample_sizes = SampleSizeMode::Explicit;
  double holdout_fraction = 0.0;
  CoverMode cover_mode = CoverMode::Greedy;
  std::vector<double> eps_grid;
  std::vector<double> alpha_grid;
  double eps_split = 0.5;
  std::vector<std::size_t> fixed_tasks;
  ProbeSpec probes;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::MetaTrainEval;
  std::uint64_t seed = 0;
  std::shared_ptr<const Environment> environment;
  std::shared_ptr<const Environment> source_environment;  // defaults to environment
  std::shared_ptr<const Environment> target_environment;  // defaults to environment
  std::shared_ptr<const HypothesisFamily> family;
  FamilySpec family_spec;
  double loss_bound = 1.0;
  ExperimentParams params;
  std::filesystem::path output;
  /// Effective configuration (overrides and defaults applied) as canonical
  /// JSON with sorted keys.
  std::string canonical_json;

  const Environment& source() const { return source_environment ? *source_environment : *environment; }
  const Environment& target() const { return target_environment ? *target_environment : *environment; }
};

struct ConfigIssue {
  enum class Kind { Parse, UnknownKey, Range, Missing, Constraint };
  Kind kind;
  std::string key;  // dotted path, e.g. "params.alpha"
  std::string message;
};

std::string describe(const ConfigIssue& issue);

/// Command-line overrides. `seed` beats the config's seed; `fallback_seed`
/// (from METALAB_SEED) is used only when neither is given.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> fallback_seed;
  std::optional<std::size_t> trials;
  std::optional<std::filesystem::path> output;
};

using ConfigResult = std::variant<ExperimentConfig, std::vector<ConfigIssue>>;

/// Parses and fully validates a JSON experiment config. Either a complete
/// config or the full list of problems is returned, never both.
ConfigResult validate_config(std::string_view text, const ConfigOverrides& overrides = {});

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

/// Reads and validates `path`; throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

/// Git blob hash ("blob <len>\0" + text, SHA-1) as lowercase hex.
std::string git_blob_hash(std::string_view text);

}  // namespace metalab
