#pragma once

// Experiment configuration: flat sectioned key = value text. All validation
// errors are collected (not just the first), each with its key path.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "banditforge/agents.hpp"
#include "banditforge/env.hpp"

namespace banditforge {

struct ActionSetSpec {
  SetKind kind = SetKind::L2Ball;
  double q = 2.0;                 // LqBall
  std::vector<Vec> points;        // Finite

  ActionSet build(std::size_t dim) const;
};

struct ThetaSpec {
  bool random = true;
  double norm = 0.8;   // random case
  Vec explicit_value;  // explicit case
};

struct InstanceSpec {
  int d = 2;
  ThetaSpec theta;
  ActionSetSpec set;
  NoiseKind noise = NoiseKind::Gaussian;
  double S = 0.5;
  double R = 1.0;
};

struct AgentSpec {
  std::string name;
  AgentConfig config;  // R and S are filled in from the instance
};

struct RunSpec {
  std::int64_t horizon = 1024;
  int trials = 8;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0 = take from --workers / BANDITFORGE_WORKERS / 1
  bool diagnostics = false;
  std::string out_dir = "out";
};

struct ScaleSpec {
  std::vector<int> d_values = {2, 4, 8, 16};
  std::vector<std::int64_t> checkpoints = {256, 512, 1024, 2048, 4096};
  int trials = 50;
  std::int64_t dim_checkpoint = 4096;
};

struct ExperimentConfig {
  InstanceSpec instance;
  std::vector<AgentSpec> agents;
  RunSpec run;
  std::optional<ScaleSpec> scale;
};

struct ConfigError {
  std::string path;  // e.g. "agent.lambda"
  std::string message;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<ConfigError> errors;

  bool ok() const { return errors.empty() && config.has_value(); }
};

// Named presets: "smooth" (ℓq ball), "sphere" (ℓ2 ball), "trap" (finite
// non-absorbing set). Selected with `scenario = NAME` under [instance];
// explicit keys override preset values.
ParseResult parse_config(const std::string& text);

ParseResult parse_config_file(const std::string& path);

}  // namespace banditforge
