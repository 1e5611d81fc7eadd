#include "maze/rl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace maze {

void PpoConfig::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
  };
  positive(learning_rate, "learning_rate");
  positive(value_coef, "value_coef");
  positive(max_grad_norm, "max_grad_norm");
  positive(static_cast<double>(minibatch_size), "minibatch_size");
  positive(static_cast<double>(num_minibatches), "num_minibatches");
  positive(static_cast<double>(iteration_timesteps), "iteration_timesteps");
  positive(static_cast<double>(parallel_envs), "parallel_envs");
  positive(shaping_horizon, "shaping_horizon");
  if (!(clip > 0.0 && clip < 1.0))
    throw std::invalid_argument("clip must be in (0,1)");
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gamma must be in (0,1]");
  if (!(gae_lambda > 0.0 && gae_lambda <= 1.0))
    throw std::invalid_argument("gae_lambda must be in (0,1]");
  if (alpha < 0.0) throw std::invalid_argument("alpha must be nonnegative");
  if (entropy_coef < 0.0)
    throw std::invalid_argument("entropy_coef must be nonnegative");
}

PpoConfig PpoConfig::scaled(double factor) const {
  PpoConfig out = *this;
  out.iteration_timesteps =
      std::max<long>(1, static_cast<long>(iteration_timesteps * factor));
  out.shaping_horizon = shaping_horizon * factor;
  return out;
}

namespace {

double jsd_impl(std::span<const double* const> dists, size_t support) {
  const size_t n = dists.size();
  if (n == 0) throw std::invalid_argument("population_jsd: empty population");

  bool all_identical = true;
  for (size_t i = 1; i < n && all_identical; ++i) {
    for (size_t a = 0; a < support; ++a) {
      if (dists[i][a] != dists[0][a]) {
        all_identical = false;
        break;
      }
    }
  }
  if (all_identical) return 0.0;

  std::vector<double> mean(support, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t a = 0; a < support; ++a) mean[a] += dists[i][a];
  for (double& m : mean) m /= static_cast<double>(n);

  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double kl = 0.0;
    for (size_t a = 0; a < support; ++a) {
      const double p = dists[i][a];
      if (p > 0.0) kl += p * std::log(p / mean[a]);
    }
    acc += kl;
  }
  const double jsd = acc / static_cast<double>(n);
  return jsd < 0.0 ? 0.0 : jsd;  // guard against rounding below zero
}

}  // namespace

double population_jsd(std::span<const std::vector<double>> dists) {
  if (dists.empty()) throw std::invalid_argument("population_jsd: empty population");
  const size_t support = dists[0].size();
  if (support == 0) throw std::invalid_argument("population_jsd: empty support");
  std::vector<const double*> ptrs;
  ptrs.reserve(dists.size());
  for (const auto& d : dists) {
    if (d.size() != support)
      throw std::invalid_argument("population_jsd: mismatched support sizes");
    ptrs.push_back(d.data());
  }
  return jsd_impl(ptrs, support);
}

double population_jsd(std::span<const ActionDistribution> dists) {
  if (dists.empty()) throw std::invalid_argument("population_jsd: empty population");
  std::vector<const double*> ptrs;
  ptrs.reserve(dists.size());
  for (const auto& d : dists) ptrs.push_back(d.probs.data());
  return jsd_impl(ptrs, kNumActions);
}

namespace {
struct VecHash {
  size_t operator()(const std::vector<double>& v) const {
    std::uint64_t h = 1469598103934665603ULL;
    const auto* bytes = reinterpret_cast<const unsigned char*>(v.data());
    for (size_t i = 0; i < v.size() * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 1099511628211ULL;
    }
    return static_cast<size_t>(h);
  }
};
}  // namespace

void augment_rewards(RolloutBatch& batch,
                     std::span<const PolicyParams> population,
                     std::string_view self_lineage, double alpha) {
  bool contains_self = false;
  for (const auto& member : population) {
    if (member.lineage == self_lineage) {
      contains_self = true;
      break;
    }
  }
  if (!contains_self)
    throw std::invalid_argument(
        "augment_rewards: population does not contain the updating policy");

  batch.diversity_bonus.assign(batch.actions.size(), 0.0);
  if (alpha == 0.0) return;

  std::unordered_map<std::vector<double>, double, VecHash> cache;
  std::vector<ActionDistribution> dists(population.size());
  for (int t = 0; t < batch.steps(); ++t) {
    const auto obs = batch.obs_at(t);
    std::vector<double> key(obs.begin(), obs.end());
    auto it = cache.find(key);
    double jsd;
    if (it != cache.end()) {
      jsd = it->second;
    } else {
      for (size_t i = 0; i < population.size(); ++i)
        dists[i] = forward(population[i], obs);
      jsd = population_jsd(std::span<const ActionDistribution>(dists));
      cache.emplace(std::move(key), jsd);
    }
    batch.diversity_bonus[t] = alpha * jsd;
  }
}

void compute_gae(std::span<const double> rewards,
                 std::span<const double> values,
                 std::span<const std::uint8_t> dones, double gamma,
                 double lambda, std::span<double> advantages,
                 std::span<double> returns) {
  const size_t n = rewards.size();
  if (values.size() != n || dones.size() != n || advantages.size() != n ||
      returns.size() != n)
    throw std::invalid_argument("compute_gae: length mismatch");
  double next_adv = 0.0;
  for (size_t t = n; t-- > 0;) {
    const double not_done = dones[t] ? 0.0 : 1.0;
    const double next_value = (t + 1 < n) ? values[t + 1] : 0.0;
    const double delta =
        rewards[t] + gamma * next_value * not_done - values[t];
    next_adv = delta + gamma * lambda * not_done * next_adv;
    advantages[t] = next_adv;
    returns[t] = next_adv + values[t];
  }
}

UpdateStats ppo_update(PolicyParams& params, AdamState& adam,
                       const RolloutBatch& batch, const PpoConfig& cfg,
                       Rng& rng) {
  const int n = batch.steps();
  if (n == 0) throw std::invalid_argument("ppo_update: empty batch");

  std::vector<double> rewards(n);
  for (int t = 0; t < n; ++t) rewards[t] = batch.total_reward(t);
  std::vector<double> advantages(n), returns(n);
  compute_gae(rewards, batch.values, batch.dones, cfg.gamma, cfg.gae_lambda,
              advantages, returns);

  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  const double stdev = std::sqrt(var / n);
  for (double& a : advantages) a = (a - mean) / std::max(stdev, 1e-8);

  const size_t np = params.w.size();
  adam.ensure_size(np);
  std::vector<double> grad(np);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);

  const int mb_size = std::min<int>(cfg.minibatch_size, n);
  int cursor = 0;
  UpdateStats stats;
  ForwardCache cache;

  for (int mb = 0; mb < cfg.num_minibatches; ++mb) {
    if (cursor + mb_size > n) {
      rng.shuffle(order);
      cursor = 0;
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    double policy_loss = 0.0, value_loss = 0.0, entropy_sum = 0.0;
    const double inv = 1.0 / mb_size;

    for (int k = 0; k < mb_size; ++k) {
      const int t = order[cursor + k];
      const auto obs = batch.obs_at(t);
      const ActionDistribution dist = forward(params, obs, cache);
      const int a = batch.actions[t];
      const double lp_new = log_prob(dist, a);
      const double ratio = std::exp(lp_new - batch.logprobs[t]);
      const double adv = advantages[t];
      const double unclipped = ratio * adv;
      const double clipped =
          std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip) * adv;
      const double surr = std::min(unclipped, clipped);

      double entropy = 0.0;
      for (double p : dist.probs)
        if (p > 0.0) entropy -= p * std::log(p);

      const double verr = dist.value - returns[t];
      policy_loss -= surr * inv;
      value_loss += 0.5 * verr * verr * inv;
      entropy_sum += entropy * inv;

      // d(loss)/d(logits): surrogate flows only when the unclipped term is
      // the active min; the log floor kills the gradient when probs[a] is
      // floored.
      std::array<double, kNumActions> dlogits{};
      if (unclipped <= clipped && dist.probs[a] > 1e-8) {
        const double dsurr_dlp = ratio * adv;
        for (int j = 0; j < kNumActions; ++j) {
          dlogits[j] = -dsurr_dlp * ((j == a ? 1.0 : 0.0) - dist.probs[j]) * inv;
        }
      }
      if (cfg.entropy_coef > 0.0) {
        for (int j = 0; j < kNumActions; ++j) {
          const double p = dist.probs[j];
          if (p > 0.0)
            dlogits[j] -= cfg.entropy_coef * (-p * (std::log(p) + entropy)) * inv;
        }
      }
      const double dvalue = cfg.value_coef * verr * inv;
      backward(params, cache, obs, dlogits, dvalue, grad);
    }
    cursor += mb_size;

    const double loss =
        policy_loss + cfg.value_coef * value_loss - cfg.entropy_coef * entropy_sum;
    if (!std::isfinite(loss))
      throw TrainingError("ppo_update: non-finite loss in minibatch " +
                          std::to_string(mb));

    double norm2 = 0.0;
    for (double g : grad) norm2 += g * g;
    const double norm = std::sqrt(norm2);
    stats.grad_norm += norm / cfg.num_minibatches;
    if (norm > cfg.max_grad_norm) {
      const double scale = cfg.max_grad_norm / (norm + 1e-12);
      for (double& g : grad) g *= scale;
    }

    adam.t++;
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam.t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam.t));
    for (size_t i = 0; i < np; ++i) {
      adam.m[i] = b1 * adam.m[i] + (1.0 - b1) * grad[i];
      adam.v[i] = b2 * adam.v[i] + (1.0 - b2) * grad[i] * grad[i];
      const double mhat = adam.m[i] / bc1;
      const double vhat = adam.v[i] / bc2;
      params.w[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + eps);
    }

    stats.policy_loss += policy_loss / cfg.num_minibatches;
    stats.value_loss += value_loss / cfg.num_minibatches;
    stats.entropy += entropy_sum / cfg.num_minibatches;
  }
  return stats;
}

RolloutResult collect_rollout(const Layout& layout, const EnvConfig& env_cfg,
                              SeatRef agent_seat, SeatRef partner_seat,
                              long min_timesteps, double shaped_coef,
                              Rng& rng) {
  RolloutResult result;
  const int obs_dim = ObsSpec::for_layout(layout).size();
  result.agent.obs_dim = obs_dim;
  result.partner.obs_dim = obs_dim;

  SeatRef seats[2] = {agent_seat, partner_seat};
  RolloutBatch* batches[2] = {&result.agent, &result.partner};
  std::vector<double> obs;
  double sparse_sum = 0.0, shaped_sum = 0.0;

  while (result.env_steps < min_timesteps) {
    GameState state = reset(layout);
    while (!state.done()) {
      int actions[2];
      double logprobs[2] = {0.0, 0.0};
      double values[2] = {0.0, 0.0};
      for (int p = 0; p < 2; ++p) {
        const Role role = role_of_player(p);
        if (seats[p].policy != nullptr) {
          encode_observation(state, role, obs);
          const ActionDistribution dist = forward(*seats[p].policy, obs);
          auto [a, lp] = sample_action(dist, rng);
          actions[p] = a;
          logprobs[p] = lp;
          values[p] = dist.value;
          RolloutBatch& b = *batches[p];
          b.obs.insert(b.obs.end(), obs.begin(), obs.end());
          b.actions.push_back(a);
          b.logprobs.push_back(lp);
          b.values.push_back(dist.value);
        } else {
          actions[p] = seats[p].frozen->act(state, role, false, &rng);
        }
      }
      const StepOutcome outcome =
          step(state,
               JointAction{static_cast<Action>(actions[0]),
                           static_cast<Action>(actions[1])},
               env_cfg);
      double shaped[2] = {0.0, 0.0};
      for (const auto& [player, event] : outcome.shaped_events)
        shaped[player] += env_cfg.shaped_value(event);
      shaped_sum += shaped[0] + shaped[1];
      sparse_sum += outcome.sparse_reward;
      for (int p = 0; p < 2; ++p) {
        if (seats[p].policy == nullptr) continue;
        RolloutBatch& b = *batches[p];
        b.sparse_rewards.push_back(outcome.sparse_reward);
        b.env_rewards.push_back(outcome.sparse_reward +
                                shaped_coef * shaped[p]);
        b.dones.push_back(outcome.done ? 1 : 0);
      }
      state = std::move(outcome.next);
      result.env_steps++;
    }
    result.episodes++;
  }

  for (int p = 0; p < 2; ++p) {
    if (seats[p].policy != nullptr)
      batches[p]->diversity_bonus.assign(batches[p]->actions.size(), 0.0);
  }
  result.mean_sparse_episode_reward = sparse_sum / result.episodes;
  result.mean_shaped_episode_reward = shaped_sum / result.episodes;
  return result;
}

}  // namespace maze
