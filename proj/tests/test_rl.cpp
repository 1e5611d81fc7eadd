#include <cmath>
#include <numeric>

#include "doctest.h"
#include "maze/layouts.hpp"
#include "maze/rl.hpp"
#include "oracles.hpp"

using namespace maze;

namespace {
std::vector<double> random_dist(int support, Rng& rng) {
  std::vector<double> d(support);
  double sum = 0.0;
  for (double& x : d) {
    x = -std::log(1.0 - rng.uniform());
    sum += x;
  }
  for (double& x : d) x /= sum;
  return d;
}
}  // namespace

TEST_CASE("population_jsd matches the naive oracle and its bounds") {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + rng.uniform_int(4);
    std::vector<std::vector<double>> dists;
    for (int i = 0; i < n; ++i) dists.push_back(random_dist(6, rng));
    const double got = population_jsd(std::span<const std::vector<double>>(dists));
    const double want = oracle::jsd(dists);
    CHECK(std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    CHECK(got >= 0.0);
    CHECK(got <= std::log(static_cast<double>(n)) + 1e-12);

    // Permutation invariance.
    std::vector<std::vector<double>> shuffled = dists;
    rng.shuffle(shuffled);
    const double got2 =
        population_jsd(std::span<const std::vector<double>>(shuffled));
    CHECK(got2 == doctest::Approx(got).epsilon(1e-12));
  }
}

TEST_CASE("population_jsd exact cases") {
  // Identical members: exactly zero.
  std::vector<std::vector<double>> same(4, {0.3, 0.3, 0.1, 0.1, 0.1, 0.1});
  CHECK(population_jsd(std::span<const std::vector<double>>(same)) == 0.0);

  // Two deterministic policies on disjoint actions: ln 2.
  std::vector<std::vector<double>> disjoint = {{1, 0, 0, 0, 0, 0},
                                               {0, 1, 0, 0, 0, 0}};
  CHECK(std::abs(population_jsd(std::span<const std::vector<double>>(disjoint)) -
                 std::log(2.0)) < 1e-12);

  // Worked two-member example, checked against the oracle.
  std::vector<std::vector<double>> pair = {{0.5, 0.5, 0, 0, 0, 0},
                                           {0.9, 0.1, 0, 0, 0, 0}};
  const double want = oracle::jsd(pair);
  CHECK(want == doctest::Approx(0.10175).epsilon(1e-4));
  CHECK(population_jsd(std::span<const std::vector<double>>(pair)) ==
        doctest::Approx(want).epsilon(1e-12));

  // Error paths.
  std::vector<std::vector<double>> empty;
  CHECK_THROWS_AS(population_jsd(std::span<const std::vector<double>>(empty)),
                  std::invalid_argument);
  std::vector<std::vector<double>> ragged = {{0.5, 0.5}, {0.5, 0.25, 0.25}};
  CHECK_THROWS_AS(population_jsd(std::span<const std::vector<double>>(ragged)),
                  std::invalid_argument);
}

TEST_CASE("compute_gae matches the brute-force oracle") {
  Rng rng(555);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + rng.uniform_int(50);
    std::vector<double> rewards(n), values(n);
    std::vector<std::uint8_t> dones(n, 0);
    for (int t = 0; t < n; ++t) {
      rewards[t] = rng.normal();
      values[t] = rng.normal();
      if (rng.uniform() < 0.15) dones[t] = 1;
    }
    dones[n - 1] = 1;
    const double gamma = 0.9 + 0.1 * rng.uniform();
    const double lambda = rng.uniform();
    std::vector<double> adv(n), ret(n);
    compute_gae(rewards, values, dones, gamma, lambda, adv, ret);
    const auto want = oracle::gae(rewards, values, dones, gamma, lambda);
    for (int t = 0; t < n; ++t) {
      CHECK(std::abs(adv[t] - want[t]) < 1e-10);
      CHECK(ret[t] == adv[t] + values[t]);
    }
  }
}

TEST_CASE("compute_gae limit cases") {
  // All zero in, all zero out.
  std::vector<double> zeros(5, 0.0);
  std::vector<std::uint8_t> dones(5, 0);
  dones[4] = 1;
  std::vector<double> adv(5), ret(5);
  compute_gae(zeros, zeros, dones, 0.99, 0.98, adv, ret);
  for (double a : adv) CHECK(a == 0.0);

  // Single terminal step.
  std::vector<double> r1 = {1.0}, v1 = {0.0};
  std::vector<std::uint8_t> d1 = {1};
  std::vector<double> a1(1), g1(1);
  compute_gae(r1, v1, d1, 0.99, 0.98, a1, g1);
  CHECK(a1[0] == 1.0);
  CHECK(g1[0] == 1.0);

  // The worked 3-step episode from the brute-force oracle.
  std::vector<double> r3 = {0.0, 0.0, 1.0}, v3 = {0.1, 0.2, 0.3};
  std::vector<std::uint8_t> d3 = {0, 0, 1};
  std::vector<double> a3(3), g3(3);
  compute_gae(r3, v3, d3, 0.99, 0.98, a3, g3);
  const auto want = oracle::gae(r3, v3, d3, 0.99, 0.98);
  for (int t = 0; t < 3; ++t) CHECK(std::abs(a3[t] - want[t]) < 1e-10);

  // lambda = 1: discounted Monte-Carlo advantage.
  Rng rng(8);
  const int n = 12;
  std::vector<double> rr(n), vv(n);
  std::vector<std::uint8_t> dd(n, 0);
  dd[n - 1] = 1;
  for (int t = 0; t < n; ++t) {
    rr[t] = rng.normal();
    vv[t] = rng.normal();
  }
  std::vector<double> amc(n), gmc(n);
  compute_gae(rr, vv, dd, 0.95, 1.0, amc, gmc);
  for (int t = 0; t < n; ++t) {
    double mc = -vv[t];
    double w = 1.0;
    for (int k = t; k < n; ++k) {
      mc += w * rr[k];
      w *= 0.95;
    }
    CHECK(std::abs(amc[t] - mc) < 1e-12);
  }

  // lambda = 0: one-step TD residual.
  std::vector<double> atd(n), gtd(n);
  compute_gae(rr, vv, dd, 0.95, 0.0, atd, gtd);
  for (int t = 0; t < n; ++t) {
    const double next_v = (t + 1 < n && !dd[t]) ? vv[t + 1] : 0.0;
    CHECK(std::abs(atd[t] - (rr[t] + 0.95 * next_v - vv[t])) < 1e-12);
  }
}

namespace {
RolloutBatch toy_batch(const PolicyParams& p, int steps, Rng& rng,
                       double reward_scale) {
  RolloutBatch b;
  b.obs_dim = p.arch.input_dim;
  for (int t = 0; t < steps; ++t) {
    std::vector<double> obs(b.obs_dim);
    for (double& x : obs) x = rng.uniform();
    const ActionDistribution dist = forward(p, obs);
    auto [a, lp] = sample_action(dist, rng);
    b.obs.insert(b.obs.end(), obs.begin(), obs.end());
    b.actions.push_back(a);
    b.logprobs.push_back(lp);
    b.values.push_back(dist.value);
    b.env_rewards.push_back(reward_scale * rng.uniform());
    b.sparse_rewards.push_back(0.0);
    b.dones.push_back(t == steps - 1 ? 1 : 0);
  }
  b.diversity_bonus.assign(steps, 0.0);
  return b;
}
}  // namespace

TEST_CASE("augment_rewards adds alpha-weighted population JSD") {
  const ArchSpec arch{4, {6}};
  std::vector<PolicyParams> pop;
  for (int i = 0; i < 3; ++i)
    pop.push_back(init_policy(arch, Role::Agent, "m" + std::to_string(i),
                              derive_seed(77, i)));
  Rng rng(1);
  RolloutBatch batch = toy_batch(pop[0], 40, rng, 1.0);
  const auto env_before = batch.env_rewards;

  // alpha = 0: bonus stays zero and env rewards untouched.
  augment_rewards(batch, pop, "m0", 0.0);
  CHECK(batch.env_rewards == env_before);
  for (double b : batch.diversity_bonus) CHECK(b == 0.0);

  // identical population: zero bonus everywhere.
  std::vector<PolicyParams> clones(3, pop[0]);
  clones[1].lineage = "m1";
  clones[2].lineage = "m2";
  augment_rewards(batch, clones, "m0", 0.5);
  for (double b : batch.diversity_bonus) CHECK(b == 0.0);

  // bonus equals alpha * jsd of the member distributions at each state.
  augment_rewards(batch, pop, "m0", 0.01);
  for (int t = 0; t < batch.steps(); ++t) {
    std::vector<std::vector<double>> dists;
    for (const auto& m : pop) {
      const auto d = forward(m, batch.obs_at(t));
      dists.emplace_back(d.probs.begin(), d.probs.end());
    }
    CHECK(batch.diversity_bonus[t] ==
          doctest::Approx(0.01 * oracle::jsd(dists)).epsilon(1e-9));
  }

  // population must contain the updating policy.
  CHECK_THROWS_AS(augment_rewards(batch, pop, "stranger", 0.01),
                  std::invalid_argument);
}

TEST_CASE("ppo_update with zero learning rate is the identity on params") {
  const ArchSpec arch{4, {6}};
  PolicyParams p = init_policy(arch, Role::Agent, "x", 4);
  Rng rng(5);
  const RolloutBatch batch = toy_batch(p, 64, rng, 1.0);
  PpoConfig cfg;
  cfg.learning_rate = 0.0;  // update-time contract, not a valid run config
  cfg.minibatch_size = 32;
  const std::vector<double> before = p.w;
  AdamState adam;
  ppo_update(p, adam, batch, cfg, rng);
  CHECK(p.w == before);
}

TEST_CASE("zero advantages leave the policy head untouched") {
  const ArchSpec arch{4, {6}};
  PolicyParams p = init_policy(arch, Role::Agent, "x", 4);
  Rng rng(6);
  RolloutBatch batch = toy_batch(p, 64, rng, 0.0);
  // Zero rewards and zero recorded values make every advantage zero.
  std::fill(batch.values.begin(), batch.values.end(), 0.0);
  std::fill(batch.env_rewards.begin(), batch.env_rewards.end(), 0.0);

  PpoConfig cfg;
  cfg.minibatch_size = 32;
  const ParamLayout layout = ParamLayout::of(arch);
  const std::vector<double> before = p.w;
  AdamState adam;
  ppo_update(p, adam, batch, cfg, rng);
  for (int i = 0; i < layout.policy_head.in * layout.policy_head.out; ++i)
    CHECK(p.w[layout.policy_head.w_off + i] == before[layout.policy_head.w_off + i]);
  for (int i = 0; i < layout.policy_head.out; ++i)
    CHECK(p.w[layout.policy_head.b_off + i] == before[layout.policy_head.b_off + i]);
}

TEST_CASE("clipped surrogate arithmetic") {
  // ratio 1.2, advantage > 0, clip 0.05: the clipped branch (1.05 * A) is the
  // min, so the sample contributes no policy gradient.
  const double ratio = 1.2, adv = 2.0, clip = 0.05;
  const double unclipped = ratio * adv;
  const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip) * adv;
  CHECK(clipped == doctest::Approx(1.05 * adv));
  CHECK(std::min(unclipped, clipped) == clipped);
}

TEST_CASE("ppo_update learns a bandit-style preference") {
  // Single observation, action 2 pays 1, everything else pays 0. After a few
  // updates the policy should lean toward action 2.
  const ArchSpec arch{3, {8}};
  PolicyParams p = init_policy(arch, Role::Agent, "bandit", 11);
  Rng rng(12);
  PpoConfig cfg;
  cfg.minibatch_size = 256;
  cfg.num_minibatches = 4;
  cfg.learning_rate = 3e-3;
  cfg.clip = 0.2;
  cfg.max_grad_norm = 1.0;
  const std::vector<double> obs = {0.2, -0.4, 0.7};
  for (int update = 0; update < 30; ++update) {
    RolloutBatch b;
    b.obs_dim = 3;
    for (int t = 0; t < 256; ++t) {
      const ActionDistribution dist = forward(p, obs);
      auto [a, lp] = sample_action(dist, rng);
      b.obs.insert(b.obs.end(), obs.begin(), obs.end());
      b.actions.push_back(a);
      b.logprobs.push_back(lp);
      b.values.push_back(dist.value);
      b.env_rewards.push_back(a == 2 ? 1.0 : 0.0);
      b.sparse_rewards.push_back(0.0);
      b.dones.push_back(1);
    }
    b.diversity_bonus.assign(256, 0.0);
    AdamState adam;
    ppo_update(p, adam, b, cfg, rng);
  }
  const ActionDistribution dist = forward(p, obs);
  CHECK(dist.probs[2] > 0.8);
  CHECK(dist.value == doctest::Approx(1.0).epsilon(0.25));
}

TEST_CASE("shaping coefficient anneals linearly to zero") {
  CHECK(shaping_coefficient(0, 100) == 1.0);
  CHECK(shaping_coefficient(50, 100) == doctest::Approx(0.5));
  CHECK(shaping_coefficient(100, 100) == 0.0);
  CHECK(shaping_coefficient(500, 100) == 0.0);
}

TEST_CASE("ppo config validation and scaling") {
  PpoConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  PpoConfig bad = cfg;
  bad.clip = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.gamma = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  const PpoConfig scaled = cfg.scaled(0.01);
  CHECK(scaled.iteration_timesteps == 400);
  CHECK(scaled.shaping_horizon == doctest::Approx(5e4));
  CHECK(scaled.minibatch_size == cfg.minibatch_size);
}

TEST_CASE("collect_rollout produces aligned role views") {
  const Layout layout = load_builtin_layout("cr", "", -1, 25);
  const EnvConfig env_cfg;
  const int obs_dim = ObsSpec::for_layout(layout).size();
  const ArchSpec arch{obs_dim, {16}};
  PolicyParams agent = init_policy(arch, Role::Agent, "a", 1);
  PolicyParams partner = init_policy(arch, Role::Partner, "p", 2);
  Rng rng(99);
  const RolloutResult r =
      collect_rollout(layout, env_cfg, SeatRef{&agent, nullptr},
                      SeatRef{&partner, nullptr}, 100, 1.0, rng);
  CHECK(r.env_steps == 100);  // 4 episodes of 25
  CHECK(r.episodes == 4);
  CHECK(r.agent.steps() == 100);
  CHECK(r.partner.steps() == 100);
  // Sparse rewards are the shared payoff: identical streams.
  CHECK(r.agent.sparse_rewards == r.partner.sparse_rewards);
  int done_count = 0;
  for (auto d : r.agent.dones) done_count += d;
  CHECK(done_count == 4);
}
