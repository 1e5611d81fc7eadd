#include "maze/evaluate.hpp"

#include <cmath>

namespace maze {

double play_episode(Actor& agent, Actor& partner, const Layout& layout,
                    const EnvConfig& env_cfg, EvalMode mode, Rng* rng) {
  const bool greedy = mode == EvalMode::Greedy;
  GameState state = reset(layout);
  double total = 0.0;
  while (!state.done()) {
    const int a0 = agent.act(state, Role::Agent, greedy, rng);
    const int a1 = partner.act(state, Role::Partner, greedy, rng);
    StepOutcome out = step(
        state, JointAction{static_cast<Action>(a0), static_cast<Action>(a1)},
        env_cfg);
    total += out.sparse_reward;
    state = std::move(out.next);
  }
  return total;
}

EvalResult evaluate_pair(Actor& agent, Actor& partner, const Layout& layout,
                         const EnvConfig& env_cfg, int episodes, EvalMode mode,
                         Rng* rng) {
  if (episodes < 1) throw std::invalid_argument("evaluate_pair: episodes < 1");
  std::vector<double> totals(episodes);
  for (int e = 0; e < episodes; ++e)
    totals[e] = play_episode(agent, partner, layout, env_cfg, mode, rng);
  double mean = 0.0;
  for (double t : totals) mean += t;
  mean /= episodes;
  double var = 0.0;
  for (double t : totals) var += (t - mean) * (t - mean);
  return {mean, std::sqrt(var / episodes)};
}

EvalResult evaluate_pair(const PolicyParams& agent, const PolicyParams& partner,
                         const Layout& layout, const EnvConfig& env_cfg,
                         int episodes, EvalMode mode, Rng* rng) {
  PolicyActor a(&agent), p(&partner);
  return evaluate_pair(a, p, layout, env_cfg, episodes, mode, rng);
}

}  // namespace maze
