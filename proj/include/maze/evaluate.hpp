#pragma once

#include "maze/actor.hpp"
#include "maze/env.hpp"
#include "maze/rng.hpp"

namespace maze {

enum class EvalMode { Greedy, Sample };

struct EvalResult {
  double mean = 0.0;
  double stdev = 0.0;
};

// Runs full-horizon episodes with `agent` on seat 1 and `partner` on seat 2
// and returns mean/std of the total sparse episode reward. Greedy mode is
// deterministic and ignores `rng`.
EvalResult evaluate_pair(Actor& agent, Actor& partner, const Layout& layout,
                         const EnvConfig& env_cfg, int episodes, EvalMode mode,
                         Rng* rng);

EvalResult evaluate_pair(const PolicyParams& agent, const PolicyParams& partner,
                         const Layout& layout, const EnvConfig& env_cfg,
                         int episodes, EvalMode mode, Rng* rng);

// One episode; returns total sparse reward.
double play_episode(Actor& agent, Actor& partner, const Layout& layout,
                    const EnvConfig& env_cfg, EvalMode mode, Rng* rng);

}  // namespace maze
