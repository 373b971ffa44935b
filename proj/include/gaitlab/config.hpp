#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "gaitlab/gait_synthesis.hpp"
#include "gaitlab/kmp_extract.hpp"
#include "gaitlab/ppo.hpp"
#include "gaitlab/quad_env.hpp"

namespace gaitlab {

struct SynthesisConfig {
  std::map<std::string, GaitSpec> gaits;  // seeded with the builtin table
  // Fraction of joint values allowed to clamp before synthesize fails.
  double max_clamp_fraction = 1.0;

  SynthesisConfig();
};

struct StreamConfig {
  int port = 7777;
  double rate_hz = 50.0;
};

// Whole-pipeline configuration: one JSON document, strict keys, every
// value checked against its module's constraints at load time.
struct PipelineConfig {
  EnvConfig environment;
  PpoConfig ppo;
  ExtractionParams extraction;
  SynthesisConfig synthesis;
  StreamConfig stream;
  int eval_steps = 4800;  // deterministic rollout recorded after training

  void validate() const;  // throws ConfigError

  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);
  nlohmann::json to_json() const;
};

// Joint column name -> index; throws ConfigError on unknown names.
int joint_column_index(const std::string& name);

}  // namespace gaitlab
