#pragma once

#include <memory>

#include "maze/env.hpp"
#include "maze/policy.hpp"
#include "maze/rng.hpp"

namespace maze {

// Anything that can pick an action for one seat of the game. Policies,
// scripted heuristics and ensembles all evaluate through this.
class Actor {
 public:
  virtual ~Actor() = default;
  // `rng` may be null in greedy mode.
  virtual int act(const GameState& state, Role role, bool greedy,
                  Rng* rng) = 0;
};

class PolicyActor : public Actor {
 public:
  explicit PolicyActor(const PolicyParams* params) : params_(params) {}

  int act(const GameState& state, Role role, bool greedy, Rng* rng) override {
    encode_observation(state, role, obs_);
    const ActionDistribution dist = forward(*params_, obs_);
    if (greedy) return greedy_action(dist);
    return sample_action(dist, *rng).first;
  }

 private:
  const PolicyParams* params_;
  std::vector<double> obs_;
};

// Always stays put; used to park a seat.
class StayActor : public Actor {
 public:
  int act(const GameState&, Role, bool, Rng*) override {
    return static_cast<int>(Action::Stay);
  }
};

class RandomActor : public Actor {
 public:
  int act(const GameState&, Role, bool greedy, Rng* rng) override {
    if (greedy || rng == nullptr) return static_cast<int>(Action::Stay);
    return rng->uniform_int(kNumActions);
  }
};

}  // namespace maze
