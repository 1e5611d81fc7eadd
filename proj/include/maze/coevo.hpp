#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "maze/archive.hpp"
#include "maze/env.hpp"
#include "maze/rl.hpp"
#include "maze/rng.hpp"

namespace maze {

// Generation loop over two coevolving populations: pair, update each pair
// with PPO for a fixed number of iterations, then either keep the updated
// partners (vanilla variants) or push them through the behavior archive and
// re-select the partner population.

enum class PairingStrategy { Fixed, Random, Best, Worst };

struct Population {
  Role role = Role::Agent;
  std::vector<PolicyParams> members;

  int size() const { return static_cast<int>(members.size()); }
};

struct CoevoConfig {
  int n_p = 5;
  int n_q = 5;
  int generations = 10;           // T
  int updates_per_generation = 5; // T'
  int archive_capacity = 20;      // n_A
  PairingStrategy pairing = PairingStrategy::Random;
  PpoConfig ppo;
  int eval_episodes = 5;
  std::uint64_t seed = 1000;
  bool use_archive = true;
  bool random_no_replacement = false;  // permutation variant of random pairing
  double threshold_coef = 0.1;         // adaptive insertion threshold
  double absolute_threshold = -1.0;    // >= 0 overrides the adaptive rule
  std::vector<int> hidden = {64, 64, 64};
  bool swap_roles = false;  // P occupies seat 2; used to train suite partners

  void validate() const;
};

// Pairing step: one partner index per agent. Best/worst need the n_p x n_q
// mean-reward matrix; fixed needs n_p == n_q. Ties break to the lowest index.
std::vector<std::pair<int, int>> pair_populations(
    int n_p, int n_q, PairingStrategy strategy, Rng& rng,
    const std::vector<std::vector<double>>* eval_matrix = nullptr,
    bool no_replacement = false);

struct GenerationMetrics {
  int generation = 0;
  double train_sparse_mean = 0.0;  // sparse episode reward over the
                                   // generation's training rollouts
  double train_shaped_mean = 0.0;  // unannealed shaped event values
  double eval_sparse_mean = 0.0;   // greedy eval of the generation's pairs
  double agent_jsd = 0.0;
  double partner_jsd = 0.0;
  double shaped_coef = 0.0;
  long env_steps_per_member = 0;   // cumulative, from P[0]
};

struct TrainState {
  Population P;
  Population Q;
  std::vector<AdamState> adam_p;
  std::vector<AdamState> adam_q;
  Archive archive;
  Rng master{0};
  int generation = 0;
};

class GenerationSink {
 public:
  virtual ~GenerationSink() = default;
  virtual void on_generation(const TrainState& state,
                             const GenerationMetrics& metrics) = 0;
};

TrainState init_train_state(const Layout& layout, const CoevoConfig& cfg);

GenerationMetrics run_generation(TrainState& state, const Layout& layout,
                                 const EnvConfig& env_cfg,
                                 const CoevoConfig& cfg);

struct TrainResult {
  Population P;
  Population Q;
  Archive archive;
  std::vector<GenerationMetrics> metrics;
};

// Runs `state` to cfg.generations; usable both fresh and after loading a
// checkpoint. The sink, when given, observes every completed generation.
TrainResult train_loop(TrainState state, const Layout& layout,
                       const EnvConfig& env_cfg, const CoevoConfig& cfg,
                       GenerationSink* sink = nullptr);

TrainResult train_maze(const Layout& layout, const EnvConfig& env_cfg,
                       const CoevoConfig& cfg, GenerationSink* sink = nullptr);

// Greedy pairwise evaluation with seats assigned by role.
EvalResult evaluate_by_role(const PolicyParams& a, const PolicyParams& b,
                            const Layout& layout, const EnvConfig& env_cfg,
                            int episodes, EvalMode mode, Rng* rng);

}  // namespace maze
