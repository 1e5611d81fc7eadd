#pragma once

#include <span>

#include "maze/archive.hpp"
#include "maze/evaluate.hpp"
#include "maze/policy.hpp"

namespace maze {

// Plurality vote over the population's argmax actions; ties broken by the
// larger summed probability mass over the tied action, then lowest index.
int ensemble_action(std::span<const PolicyParams> agents,
                    std::span<const double> obs);

class EnsembleActor : public Actor {
 public:
  explicit EnsembleActor(std::span<const PolicyParams> agents)
      : agents_(agents) {}

  int act(const GameState& state, Role role, bool, Rng*) override {
    encode_observation(state, role, obs_);
    return ensemble_action(agents_, obs_);
  }

 private:
  std::span<const PolicyParams> agents_;
  std::vector<double> obs_;
};

// Index of the agent with the highest mean reward across every archived
// partner (greedy episodes); ties go to the lowest index.
int select_best_response_offline(std::span<const PolicyParams> agents,
                                 const Archive& archive, const Layout& layout,
                                 const EnvConfig& env_cfg, int episodes);

}  // namespace maze
