#pragma once

#include <string>
#include <vector>

#include "maze/coevo.hpp"
#include "maze/env.hpp"

namespace maze {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A full run description. Unset fields take the stock defaults; `scale`
// shrinks iteration_timesteps and shaping_horizon together at use time.
struct RunConfig {
  std::string layout = "cr";
  std::string method = "maze";
  std::vector<std::uint64_t> seeds = {1000, 2000, 3000, 4000, 5000};
  double scale = 1.0;
  std::string out = "runs/run";
  int cook_time = -1;  // -1: layout preset value
  int horizon = -1;
  EnvConfig env;
  CoevoConfig coevo;  // includes the PPO settings

  // Coevo settings with the scale factor applied and the per-run seed set.
  CoevoConfig scaled_coevo(std::uint64_t seed) const;
  void validate() const;
};

// Strict JSON loader: unknown keys are rejected with field-level messages;
// an empty file means "all defaults". Throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Full snapshot of every resolved field, suitable for re-loading.
std::string config_to_text(const RunConfig& cfg);

std::string pairing_name(PairingStrategy s);
PairingStrategy parse_pairing(const std::string& name);

}  // namespace maze
