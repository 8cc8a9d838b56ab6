#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pomg/games.hpp"
#include "pomg/learner.hpp"
#include "pomg/oracle.hpp"

namespace pomg {

struct EvaluationOptions {
  int gap_cadence = 0;        // 0 disables gap evaluation
  bool class_window = true;   // Π^m gap in the superstate game
  bool class_history = true;  // Π^H gap in the POMG
};

struct ExperimentConfig {
  std::string model_path;        // either a model file...
  std::optional<GameSpec> game;  // ...or an inline generator spec
  LearnerConfig learner;
  EvaluationOptions evaluation;
  std::string out_dir = "out";
  // When set, the bound-verification sweep runs after the experiment on the
  // configured seed range; failures turn into a nonzero exit status.
  bool verify_after_run = false;
  std::uint64_t verify_seed_begin = 0;
  std::uint64_t verify_seed_end = 4;
};

nlohmann::json experiment_config_to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);

/**
 * End-to-end run: resolve the model, run learning, and write metrics.csv
 * (one row per iteration), policy.json (final profile), and manifest.json
 * (resolved config, seed, config hash, version, thread count) into out_dir.
 * The manifest is sufficient to reproduce the run byte-identically.
 */
int run_experiment(const ExperimentConfig& config);

struct VerifyOptions {
  std::uint64_t seed_begin = 0;
  std::uint64_t seed_end = 9;  // inclusive
  GameSpec base;               // dimensions/mixing template; seed is overwritten
  std::vector<int> window_lens = {1, 2, 3};
  int profiles_per_check = 3;
  int deviations_per_check = 8;
  std::int64_t budget = 10'000'000;
};

/// Bound sweep on generated instances. Every returned
/// check carries its name, the allowed bound and the measured value.
std::vector<CheckResult> verify_suite(const VerifyOptions& opts);

/// Renders checks as aligned "PASS/FAIL name measured bound" lines.
std::string format_checks(const std::vector<CheckResult>& checks);

}  // namespace pomg
