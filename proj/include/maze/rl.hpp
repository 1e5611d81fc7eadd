#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "maze/actor.hpp"
#include "maze/env.hpp"
#include "maze/policy.hpp"
#include "maze/rng.hpp"

namespace maze {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PpoConfig {
  double learning_rate = 8e-4;
  double gamma = 0.99;
  double gae_lambda = 0.98;
  double clip = 0.05;
  double value_coef = 0.5;
  double max_grad_norm = 0.1;
  int minibatch_size = 2000;
  int num_minibatches = 10;
  long iteration_timesteps = 40000;
  int parallel_envs = 50;
  double alpha = 0.01;        // diversity weight
  double shaping_horizon = 5e6;
  double entropy_coef = 0.0;  // per-policy entropy, off by default

  void validate() const;
  // Desk-scale factor: shrinks iteration_timesteps and shaping_horizon.
  PpoConfig scaled(double factor) const;
};

// One role's view of a pair's rollout.
struct RolloutBatch {
  int obs_dim = 0;
  std::vector<double> obs;  // steps x obs_dim, row-major
  std::vector<int> actions;
  std::vector<double> logprobs;
  std::vector<double> values;
  std::vector<double> env_rewards;     // sparse + annealed shaped
  std::vector<double> sparse_rewards;  // sparse component alone, for metrics
  std::vector<double> diversity_bonus;
  std::vector<std::uint8_t> dones;

  int steps() const { return static_cast<int>(actions.size()); }
  std::span<const double> obs_at(int t) const {
    return {obs.data() + static_cast<size_t>(t) * obs_dim,
            static_cast<size_t>(obs_dim)};
  }
  double total_reward(int t) const {
    return env_rewards[t] + diversity_bonus[t];
  }
};

// Population diversity at one state: mean KL of each member's action
// distribution to the arithmetic mean distribution. In [0, ln n]; zero-mass
// actions contribute nothing; returns exactly 0 for identical members.
double population_jsd(std::span<const std::vector<double>> dists);
double population_jsd(std::span<const ActionDistribution> dists);

// Fills batch.diversity_bonus with alpha * JSD of the population's action
// distributions at each visited state. `population` must contain the policy
// the batch belongs to (matched by lineage). JSD values are cached per
// distinct observation within the call.
void augment_rewards(RolloutBatch& batch,
                     std::span<const PolicyParams> population,
                     std::string_view self_lineage, double alpha);

// delta_t = r_t + gamma*V_{t+1}*(1-done_t) - V_t;
// A_t = delta_t + gamma*lambda*(1-done_t)*A_{t+1}; returns = A + V.
void compute_gae(std::span<const double> rewards,
                 std::span<const double> values,
                 std::span<const std::uint8_t> dones, double gamma,
                 double lambda, std::span<double> advantages,
                 std::span<double> returns);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;

  void ensure_size(size_t n) {
    if (m.size() != n) {
      m.assign(n, 0.0);
      v.assign(n, 0.0);
    }
  }
};

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double grad_norm = 0.0;
};

// Clipped-surrogate PPO step: num_minibatches passes of minibatch_size over
// the shuffled batch (minibatch clamped to the batch size), advantages
// normalized over the whole batch, global gradient-norm clipping, Adam.
// Throws TrainingError on a non-finite loss, naming the minibatch.
UpdateStats ppo_update(PolicyParams& params, AdamState& adam,
                       const RolloutBatch& batch, const PpoConfig& cfg,
                       Rng& rng);

// --- rollout collection ---

// Trainable seat description: a policy whose batch we keep, or a frozen actor.
struct SeatRef {
  PolicyParams* policy = nullptr;  // trainable if non-null
  Actor* frozen = nullptr;         // used when policy == null
};

struct RolloutResult {
  RolloutBatch agent;    // empty if that seat was frozen
  RolloutBatch partner;  // empty if that seat was frozen
  int episodes = 0;
  long env_steps = 0;
  double mean_sparse_episode_reward = 0.0;
  double mean_shaped_episode_reward = 0.0;  // unannealed shaped event values
};

// Runs whole episodes until at least min_timesteps env steps were taken.
// Shaped rewards are credited to the acting player and multiplied by
// `shaped_coef`; the shared sparse reward goes to both seats.
RolloutResult collect_rollout(const Layout& layout, const EnvConfig& env_cfg,
                              SeatRef agent_seat, SeatRef partner_seat,
                              long min_timesteps, double shaped_coef,
                              Rng& rng);

// Anneal coefficient for shaped rewards after `steps_done` env steps.
inline double shaping_coefficient(long steps_done, double shaping_horizon) {
  if (shaping_horizon <= 0) return 0.0;
  return std::max(0.0, 1.0 - static_cast<double>(steps_done) / shaping_horizon);
}

}  // namespace maze
