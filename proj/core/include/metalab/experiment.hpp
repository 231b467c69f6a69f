#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "metalab/config.hpp"
#include "metalab/error.hpp"

namespace metalab {

struct RunReport {
  ExperimentKind kind = ExperimentKind::MetaTrainEval;
  std::string config_echo;  // canonical JSON of the effective config
  std::string config_hash;  // git blob hash of config_echo
  std::uint64_t seed = 0;
  std::vector<std::filesystem::path> files;  // written files, CSV first, summary.json last
  std::string payload_json;                  // kind-specific summary record
  std::optional<bool> check_passed;          // set by the validate kinds
  double duration_seconds = 0.0;
};

/// Downstream failure wrapped with the experiment kind.
class ExperimentError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

/// Runs the pipeline for `cfg.kind`, writing CSV tables and summary.json into
/// `cfg.output` (created if needed). Nothing is written elsewhere. CSV
/// payloads depend only on the config and seed.
RunReport run_experiment(const ExperimentConfig& cfg);

}  // namespace metalab
