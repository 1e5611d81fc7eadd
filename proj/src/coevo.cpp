#include "maze/coevo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace maze {

void CoevoConfig::validate() const {
  auto positive = [](long v, const char* what) {
    if (v <= 0) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  positive(n_p, "n_p");
  positive(n_q, "n_q");
  positive(updates_per_generation, "updates_per_generation");
  positive(archive_capacity, "archive_capacity");
  positive(eval_episodes, "eval_episodes");
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (use_archive && archive_capacity < n_q)
    throw std::invalid_argument("archive_capacity must be >= n_q");
  if (pairing == PairingStrategy::Fixed && n_p != n_q)
    throw std::invalid_argument("fixed pairing requires n_p == n_q");
  if (threshold_coef < 0.0)
    throw std::invalid_argument("threshold_coef must be nonnegative");
  if (hidden.empty()) throw std::invalid_argument("hidden layers required");
  ppo.validate();
}

std::vector<std::pair<int, int>> pair_populations(
    int n_p, int n_q, PairingStrategy strategy, Rng& rng,
    const std::vector<std::vector<double>>* eval_matrix, bool no_replacement) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(n_p);
  switch (strategy) {
    case PairingStrategy::Fixed:
      if (n_p != n_q)
        throw std::invalid_argument("fixed pairing requires n_p == n_q");
      for (int i = 0; i < n_p; ++i) pairs.emplace_back(i, i);
      break;
    case PairingStrategy::Random:
      if (no_replacement) {
        if (n_p > n_q)
          throw std::invalid_argument("permutation pairing requires n_p <= n_q");
        std::vector<int> idx(n_q);
        std::iota(idx.begin(), idx.end(), 0);
        rng.shuffle(idx);
        for (int i = 0; i < n_p; ++i) pairs.emplace_back(i, idx[i]);
      } else {
        for (int i = 0; i < n_p; ++i)
          pairs.emplace_back(i, rng.uniform_int(n_q));
      }
      break;
    case PairingStrategy::Best:
    case PairingStrategy::Worst: {
      if (eval_matrix == nullptr)
        throw std::invalid_argument("best/worst pairing needs an eval matrix");
      if (static_cast<int>(eval_matrix->size()) != n_p)
        throw std::invalid_argument("eval matrix has wrong row count");
      const bool best = strategy == PairingStrategy::Best;
      for (int i = 0; i < n_p; ++i) {
        const auto& row = (*eval_matrix)[i];
        if (static_cast<int>(row.size()) != n_q)
          throw std::invalid_argument("eval matrix has wrong column count");
        int pick = 0;
        for (int j = 1; j < n_q; ++j) {
          if (best ? row[j] > row[pick] : row[j] < row[pick]) pick = j;
        }
        pairs.emplace_back(i, pick);
      }
      break;
    }
  }
  return pairs;
}

EvalResult evaluate_by_role(const PolicyParams& a, const PolicyParams& b,
                            const Layout& layout, const EnvConfig& env_cfg,
                            int episodes, EvalMode mode, Rng* rng) {
  const PolicyParams& seat0 = a.role == Role::Agent ? a : b;
  const PolicyParams& seat1 = a.role == Role::Agent ? b : a;
  return evaluate_pair(seat0, seat1, layout, env_cfg, episodes, mode, rng);
}

TrainState init_train_state(const Layout& layout, const CoevoConfig& cfg) {
  cfg.validate();
  const int obs_dim = ObsSpec::for_layout(layout).size();
  const ArchSpec arch{obs_dim, cfg.hidden};
  const Role p_role = cfg.swap_roles ? Role::Partner : Role::Agent;
  const Role q_role = cfg.swap_roles ? Role::Agent : Role::Partner;

  TrainState state;
  state.P.role = p_role;
  state.Q.role = q_role;
  for (int i = 0; i < cfg.n_p; ++i) {
    state.P.members.push_back(init_policy(arch, p_role,
                                          "p" + std::to_string(i),
                                          derive_seed(cfg.seed, 1, i)));
  }
  for (int i = 0; i < cfg.n_q; ++i) {
    state.Q.members.push_back(init_policy(arch, q_role,
                                          "q" + std::to_string(i),
                                          derive_seed(cfg.seed, 2, i)));
  }
  state.adam_p.resize(cfg.n_p);
  state.adam_q.resize(cfg.n_q);
  state.master = Rng(derive_seed(cfg.seed, 3));

  state.archive.capacity = cfg.archive_capacity;
  for (const auto& q : state.Q.members) {
    ArchiveEntry e;
    e.partner = q;
    e.inserted_at = state.archive.next_insert_id++;
    state.archive.entries.push_back(std::move(e));
  }
  return state;
}

namespace {

// Refresh every archived behavior against the current P members.
void refresh_archive_behaviors(TrainState& state, const Layout& layout,
                               const EnvConfig& env_cfg,
                               const CoevoConfig& cfg) {
  for (auto& entry : state.archive.entries) {
    entry.behavior.clear();
    entry.behavior.reserve(state.P.members.size());
    for (const auto& p : state.P.members) {
      entry.behavior.push_back(
          evaluate_by_role(p, entry.partner, layout, env_cfg,
                           cfg.eval_episodes, EvalMode::Greedy, nullptr)
              .mean);
    }
  }
}

struct JsdProbe {
  double p_jsd = 0.0;
  double q_jsd = 0.0;
};

// Mean population JSD over states visited by pair (P[0], Q[0]) playing
// greedily; cheap diversity statistic for the metrics log.
JsdProbe probe_population_jsd(const TrainState& state, const Layout& layout,
                              const EnvConfig& env_cfg) {
  JsdProbe probe;
  if (state.P.size() <= 1 && state.Q.size() <= 1) return probe;
  const PolicyParams& seat0 =
      state.P.role == Role::Agent ? state.P.members[0] : state.Q.members[0];
  const PolicyParams& seat1 =
      state.P.role == Role::Agent ? state.Q.members[0] : state.P.members[0];
  PolicyActor a0(&seat0), a1(&seat1);

  GameState s = reset(layout);
  const int stride = std::max(1, layout.horizon / 32);
  std::vector<double> obs;
  std::vector<ActionDistribution> dists;
  int samples = 0;
  while (!s.done()) {
    if (s.t % stride == 0) {
      for (const Population* pop : {&state.P, &state.Q}) {
        if (pop->size() <= 1) continue;
        encode_observation(s, pop->role, obs);
        dists.clear();
        for (const auto& m : pop->members) dists.push_back(forward(m, obs));
        const double jsd =
            population_jsd(std::span<const ActionDistribution>(dists));
        (pop == &state.P ? probe.p_jsd : probe.q_jsd) += jsd;
      }
      samples++;
    }
    const int act0 = a0.act(s, Role::Agent, true, nullptr);
    const int act1 = a1.act(s, Role::Partner, true, nullptr);
    s = step(s,
             JointAction{static_cast<Action>(act0), static_cast<Action>(act1)},
             env_cfg)
            .next;
  }
  if (samples > 0) {
    probe.p_jsd /= samples;
    probe.q_jsd /= samples;
  }
  return probe;
}

}  // namespace

GenerationMetrics run_generation(TrainState& state, const Layout& layout,
                                 const EnvConfig& env_cfg,
                                 const CoevoConfig& cfg) {
  const int n_p = state.P.size();
  const int n_q = state.Q.size();

  // Pairing; best/worst re-evaluate the full cross matrix each generation.
  std::vector<std::vector<double>> eval_matrix;
  const std::vector<std::vector<double>>* matrix_ptr = nullptr;
  if (cfg.pairing == PairingStrategy::Best ||
      cfg.pairing == PairingStrategy::Worst) {
    eval_matrix.assign(n_p, std::vector<double>(n_q, 0.0));
    for (int i = 0; i < n_p; ++i) {
      for (int j = 0; j < n_q; ++j) {
        eval_matrix[i][j] =
            evaluate_by_role(state.P.members[i], state.Q.members[j], layout,
                             env_cfg, cfg.eval_episodes, EvalMode::Greedy,
                             nullptr)
                .mean;
      }
    }
    matrix_ptr = &eval_matrix;
  }
  const auto pairs = pair_populations(n_p, n_q, cfg.pairing, state.master,
                                      matrix_ptr, cfg.random_no_replacement);

  // Updating: T' PPO iterations per pair, pair-major within each round.
  std::vector<Rng> pair_rngs;
  pair_rngs.reserve(pairs.size());
  for (size_t i = 0; i < pairs.size(); ++i) {
    pair_rngs.emplace_back(derive_seed(cfg.seed, 100 + state.generation, i));
  }

  GenerationMetrics metrics;
  metrics.generation = state.generation;
  double train_sparse = 0.0, train_shaped = 0.0, coef_sum = 0.0;
  long rollouts = 0;

  for (int j = 0; j < cfg.updates_per_generation; ++j) {
    for (size_t i = 0; i < pairs.size(); ++i) {
      PolicyParams& p_member = state.P.members[pairs[i].first];
      PolicyParams& q_member = state.Q.members[pairs[i].second];
      AdamState& p_adam = state.adam_p[pairs[i].first];
      AdamState& q_adam = state.adam_q[pairs[i].second];
      Rng& rng = pair_rngs[i];

      PolicyParams& seat0 = p_member.role == Role::Agent ? p_member : q_member;
      PolicyParams& seat1 = p_member.role == Role::Agent ? q_member : p_member;

      const double coef =
          shaping_coefficient(seat0.train_steps, cfg.ppo.shaping_horizon);
      RolloutResult rollout = collect_rollout(
          layout, env_cfg, SeatRef{&seat0, nullptr}, SeatRef{&seat1, nullptr},
          cfg.ppo.iteration_timesteps, coef, rng);

      RolloutBatch& p_batch =
          p_member.role == Role::Agent ? rollout.agent : rollout.partner;
      RolloutBatch& q_batch =
          p_member.role == Role::Agent ? rollout.partner : rollout.agent;
      if (cfg.ppo.alpha > 0.0) {
        augment_rewards(p_batch, state.P.members, p_member.lineage,
                        cfg.ppo.alpha);
        augment_rewards(q_batch, state.Q.members, q_member.lineage,
                        cfg.ppo.alpha);
      }
      ppo_update(p_member, p_adam, p_batch, cfg.ppo, rng);
      ppo_update(q_member, q_adam, q_batch, cfg.ppo, rng);
      p_member.train_steps += rollout.env_steps;
      q_member.train_steps += rollout.env_steps;

      train_sparse += rollout.mean_sparse_episode_reward;
      train_shaped += rollout.mean_shaped_episode_reward;
      coef_sum += coef;
      rollouts++;
    }
  }
  metrics.train_sparse_mean = train_sparse / rollouts;
  metrics.train_shaped_mean = train_shaped / rollouts;
  metrics.shaped_coef = coef_sum / rollouts;

  // Post-update greedy evaluation of the generation's pairs.
  double eval_sum = 0.0;
  for (const auto& [pi, qi] : pairs) {
    eval_sum += evaluate_by_role(state.P.members[pi], state.Q.members[qi],
                                 layout, env_cfg, cfg.eval_episodes,
                                 EvalMode::Greedy, nullptr)
                    .mean;
  }
  metrics.eval_sparse_mean = eval_sum / static_cast<double>(pairs.size());

  const JsdProbe probe = probe_population_jsd(state, layout, env_cfg);
  metrics.agent_jsd = state.P.role == Role::Agent ? probe.p_jsd : probe.q_jsd;
  metrics.partner_jsd = state.P.role == Role::Agent ? probe.q_jsd : probe.p_jsd;
  metrics.env_steps_per_member = state.P.members[0].train_steps;

  // Selection: agents carry over; partners go through the archive.
  if (cfg.use_archive) {
    refresh_archive_behaviors(state, layout, env_cfg, cfg);
    state.archive.distance_threshold =
        cfg.absolute_threshold >= 0.0
            ? cfg.absolute_threshold
            : adaptive_threshold(state.archive, cfg.threshold_coef);
    for (int j = 0; j < n_q; ++j) {
      ArchiveEntry entry;
      entry.partner = state.Q.members[j];
      entry.partner.lineage =
          state.Q.members[j].lineage + "@g" + std::to_string(state.generation);
      entry.behavior.reserve(n_p);
      for (const auto& p : state.P.members) {
        entry.behavior.push_back(
            evaluate_by_role(p, entry.partner, layout, env_cfg,
                             cfg.eval_episodes, EvalMode::Greedy, nullptr)
                .mean);
      }
      archive_insert(state.archive, std::move(entry), state.master);
    }
    auto selected = select_partner_population(state.archive, n_q, state.master);
    for (int j = 0; j < n_q; ++j) {
      state.Q.members[j] = std::move(selected[j]);
      state.adam_q[j] = AdamState{};  // fresh moments for re-selected partners
    }
  }

  state.generation++;
  return metrics;
}

TrainResult train_loop(TrainState state, const Layout& layout,
                       const EnvConfig& env_cfg, const CoevoConfig& cfg,
                       GenerationSink* sink) {
  TrainResult result;
  while (state.generation < cfg.generations) {
    GenerationMetrics metrics = run_generation(state, layout, env_cfg, cfg);
    if (sink != nullptr) sink->on_generation(state, metrics);
    result.metrics.push_back(metrics);
  }
  result.P = std::move(state.P);
  result.Q = std::move(state.Q);
  result.archive = std::move(state.archive);
  return result;
}

TrainResult train_maze(const Layout& layout, const EnvConfig& env_cfg,
                       const CoevoConfig& cfg, GenerationSink* sink) {
  return train_loop(init_train_state(layout, cfg), layout, env_cfg, cfg, sink);
}

}  // namespace maze
