#include <cmath>

#include "doctest.h"
#include "maze/policy.hpp"
#include "oracles.hpp"

using namespace maze;

namespace {
std::vector<double> random_obs(int dim, Rng& rng) {
  std::vector<double> obs(dim);
  for (double& x : obs) x = rng.uniform();
  return obs;
}
}  // namespace

TEST_CASE("init_policy is seed-reproducible") {
  const ArchSpec arch{8, {16, 16}};
  const PolicyParams a = init_policy(arch, Role::Agent, "a", 1000);
  const PolicyParams b = init_policy(arch, Role::Agent, "a", 1000);
  const PolicyParams c = init_policy(arch, Role::Agent, "a", 2000);
  CHECK(a.w == b.w);
  CHECK(a.w != c.w);
  CHECK(static_cast<int>(a.w.size()) == arch.param_count());
  for (double w : a.w) CHECK(std::isfinite(w));
}

TEST_CASE("zero parameters yield the uniform distribution and zero value") {
  const ArchSpec arch{10, {8}};
  const PolicyParams p = init_policy_zero(arch, Role::Agent, "z");
  std::vector<double> obs(10, 0.3);
  const ActionDistribution dist = forward(p, obs);
  for (double pr : dist.probs) CHECK(pr == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(dist.value == 0.0);
}

TEST_CASE("forward normalizes and matches a hand-built softmax") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const ArchSpec arch{5, {7, 6}};
    const PolicyParams p =
        init_policy(arch, Role::Agent, "t", derive_seed(1, trial));
    const auto obs = random_obs(5, rng);
    const ActionDistribution dist = forward(p, obs);
    double sum = 0.0;
    for (double pr : dist.probs) {
      CHECK(pr >= 0.0);
      sum += pr;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
  }

  // No hidden layers: logits = W*obs + b, checked against a by-hand softmax.
  ArchSpec lin{2, {}};
  PolicyParams p = init_policy_zero(lin, Role::Agent, "lin");
  const ParamLayout layout = ParamLayout::of(lin);
  // logits = [0.5*x0, -x1, 0.25*x0 + x1, 0, 0, 0]
  p.w[layout.policy_head.w_off + 0] = 0.5;
  p.w[layout.policy_head.w_off + 3] = -1.0;
  p.w[layout.policy_head.w_off + 4] = 0.25;
  p.w[layout.policy_head.w_off + 5] = 1.0;
  const std::vector<double> obs = {2.0, 0.5};
  const double z[6] = {1.0, -0.5, 1.0, 0.0, 0.0, 0.0};
  double denom = 0.0;
  for (double zi : z) denom += std::exp(zi);
  const ActionDistribution dist = forward(p, obs);
  for (int a = 0; a < 6; ++a)
    CHECK(dist.probs[a] == doctest::Approx(std::exp(z[a]) / denom).epsilon(1e-12));
}

TEST_CASE("sample_action follows the distribution") {
  Rng rng(9);
  ActionDistribution onehot;
  onehot.probs = {0, 0, 0, 0, 0, 1.0};
  auto [a, lp] = sample_action(onehot, rng);
  CHECK(a == static_cast<int>(Action::Interact));
  CHECK(lp == 0.0);

  ActionDistribution uniform;
  uniform.probs.fill(1.0 / 6);
  for (int i = 0; i < 10; ++i) {
    auto [ua, ulp] = sample_action(uniform, rng);
    CHECK(ulp == doctest::Approx(-std::log(6.0)).epsilon(1e-12));
  }

  ActionDistribution skewed;
  skewed.probs = {0.7, 0.3, 0, 0, 0, 0};
  int counts[6] = {};
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) counts[sample_action(skewed, rng).first]++;
  CHECK(std::abs(counts[0] / double(draws) - 0.7) < 0.01);
  CHECK(std::abs(counts[1] / double(draws) - 0.3) < 0.01);
  CHECK(counts[2] + counts[3] + counts[4] + counts[5] == 0);
}

TEST_CASE("analytic gradients match central finite differences") {
  Rng rng(77);
  for (int net = 0; net < 8; ++net) {
    const ArchSpec arch{4, {6, 5}};
    const PolicyParams p =
        init_policy(arch, Role::Agent, "g", derive_seed(5, net));
    const auto obs = random_obs(4, rng);
    const int action = rng.uniform_int(kNumActions);

    const auto glp = grad_logprob(p, obs, action);
    const auto fd_lp = oracle::finite_diff(p.w, [&](const std::vector<double>& w) {
      PolicyParams q = p;
      q.w = w;
      return log_prob(forward(q, obs), action);
    });
    const auto gv = grad_value(p, obs);
    const auto fd_v = oracle::finite_diff(p.w, [&](const std::vector<double>& w) {
      PolicyParams q = p;
      q.w = w;
      return forward(q, obs).value;
    });

    auto rel_err = [](const std::vector<double>& a, const std::vector<double>& b) {
      double num = 0.0, da = 0.0, db = 0.0;
      for (size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        da += a[i] * a[i];
        db += b[i] * b[i];
      }
      return std::sqrt(num) / std::max({std::sqrt(da), std::sqrt(db), 1e-12});
    };
    CHECK(rel_err(glp, fd_lp) < 1e-4);
    CHECK(rel_err(gv, fd_v) < 1e-4);
  }
}

TEST_CASE("forward is a pure function of params and obs") {
  const ArchSpec arch{6, {8, 8}};
  const PolicyParams p = init_policy(arch, Role::Partner, "pure", 31);
  Rng rng(3);
  const auto obs = random_obs(6, rng);
  const ActionDistribution d1 = forward(p, obs);
  const ActionDistribution d2 = forward(p, obs);
  CHECK(d1.probs == d2.probs);
  CHECK(d1.value == d2.value);
}
