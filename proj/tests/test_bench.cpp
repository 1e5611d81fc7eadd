#include <cmath>

#include "doctest.h"
#include "maze/bench.hpp"
#include "maze/layouts.hpp"

using namespace maze;

namespace {
CoevoConfig tiny_base(std::uint64_t seed) {
  CoevoConfig cfg;
  cfg.n_p = 2;
  cfg.n_q = 2;
  cfg.generations = 1;
  cfg.updates_per_generation = 1;
  cfg.archive_capacity = 4;
  cfg.eval_episodes = 1;
  cfg.seed = seed;
  cfg.hidden = {12};
  cfg.ppo.iteration_timesteps = 40;
  cfg.ppo.minibatch_size = 20;
  cfg.ppo.num_minibatches = 2;
  cfg.ppo.alpha = 0.01;
  return cfg;
}
}  // namespace

TEST_CASE("method names round-trip") {
  for (Method m : all_methods()) CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("nope"), std::invalid_argument);
}

TEST_CASE("method_coevo_config wires the ladder flags") {
  CoevoConfig base = tiny_base(1);
  base.ppo.alpha = 0.04;

  const CoevoConfig sp = method_coevo_config(Method::SP, base);
  CHECK(sp.n_p == 1);
  CHECK(sp.n_q == 1);
  CHECK(sp.pairing == PairingStrategy::Fixed);
  CHECK(sp.ppo.alpha == 0.0);
  CHECK(!sp.use_archive);

  const CoevoConfig vmaze = method_coevo_config(Method::VMaze, base);
  CHECK(vmaze.pairing == PairingStrategy::Fixed);
  CHECK(vmaze.ppo.alpha == 0.0);
  CHECK(!vmaze.use_archive);
  CHECK(vmaze.n_p == base.n_p);

  const CoevoConfig vp = method_coevo_config(Method::VMazeP, base);
  CHECK(vp.pairing == PairingStrategy::Random);
  CHECK(vp.ppo.alpha == 0.0);
  CHECK(!vp.use_archive);

  const CoevoConfig vd = method_coevo_config(Method::VMazeD, base);
  CHECK(vd.pairing == PairingStrategy::Fixed);
  CHECK(vd.ppo.alpha == 0.04);
  CHECK(!vd.use_archive);

  const CoevoConfig vpd = method_coevo_config(Method::VMazePD, base);
  CHECK(vpd.pairing == PairingStrategy::Random);
  CHECK(vpd.ppo.alpha == 0.04);
  CHECK(!vpd.use_archive);

  // Full method differs from +PD only by the archive.
  const CoevoConfig full = method_coevo_config(Method::Maze, base);
  CHECK(full.pairing == vpd.pairing);
  CHECK(full.ppo.alpha == vpd.ppo.alpha);
  CHECK(full.use_archive);
}

TEST_CASE("scripted rule traces") {
  const EnvConfig cfg;
  // Mini room: facing the onion dispenser with a pot to fill -> interact.
  const Layout l = load_builtin_layout("cr_mini");
  GameState s = reset(l);
  s.players[0] = {1, 1, Dir::West, Item::None};
  s.players[1] = {2, 3, Dir::South, Item::None};
  CHECK(scripted_partner_action(s, Role::Agent) ==
        static_cast<int>(Action::Interact));

  // Holding soup adjacent to the serving window -> interact.
  s = reset(l);
  s.players[0] = {2, 3, Dir::South, Item::Soup};
  s.players[1] = {1, 1, Dir::North, Item::None};
  CHECK(scripted_partner_action(s, Role::Agent) ==
        static_cast<int>(Action::Interact));

  // All pots cooking, hands empty, the other player already carries the
  // dish -> no enabled subtask -> stay.
  s = reset(l);
  s.pots[0] = Pot{3, 1, PotPhase::Cooking};
  s.players[0] = {2, 2, Dir::North, Item::None};
  s.players[1] = {1, 3, Dir::North, Item::Dish};
  CHECK(scripted_partner_action(s, Role::Agent) ==
        static_cast<int>(Action::Stay));
}

TEST_CASE("scripted pairs deliver on every archetype") {
  const EnvConfig cfg;
  for (const char* name : {"cr", "aa", "aa2", "fc"}) {
    const Layout l = load_builtin_layout(name);
    ScriptedActor s1, s2;
    const EvalResult r =
        evaluate_pair(s1, s2, l, cfg, 1, EvalMode::Greedy, nullptr);
    CHECK(r.mean >= cfg.deliver_reward);
  }
}

TEST_CASE("single-seat play cannot deliver on the split kitchen") {
  const EnvConfig cfg;
  const Layout fc = load_builtin_layout("fc", "", -1, 100);
  ScriptedActor scripted;
  StayActor stay;
  // Even the rule policy, playing alone on either side, scores nothing.
  CHECK(play_episode(scripted, stay, fc, cfg, EvalMode::Greedy, nullptr) == 0.0);
  CHECK(play_episode(stay, scripted, fc, cfg, EvalMode::Greedy, nullptr) == 0.0);
}

TEST_CASE("sp baseline trains exactly one pair") {
  const Layout layout = load_builtin_layout("cr", "", 5, 20);
  const EnvConfig env_cfg;
  const BaselineResult r =
      run_baseline(Method::SP, layout, env_cfg, tiny_base(3));
  CHECK(r.agents.size() == 1);
  CHECK(r.partners.size() == 1);
  CHECK(r.curve.size() == 1);
}

TEST_CASE("fcp builds a 15-partner pool from 5 runs x 3 checkpoints") {
  const Layout layout = load_builtin_layout("cr", "", 5, 20);
  const EnvConfig env_cfg;
  const BaselineResult r =
      run_baseline(Method::FCP, layout, env_cfg, tiny_base(4));
  CHECK(r.partners.size() == 15);
  CHECK(r.agents.size() == 1);
  // First checkpoint of each run is untrained, last is not.
  CHECK(r.partners[0].train_steps == 0);
  CHECK(r.partners[2].train_steps > 0);
  for (const auto& p : r.partners) CHECK(p.role == Role::Partner);
}

TEST_CASE("mep-lite trains partners then a best-response agent") {
  const Layout layout = load_builtin_layout("cr", "", 5, 20);
  const EnvConfig env_cfg;
  const BaselineResult r =
      run_baseline(Method::MepLite, layout, env_cfg, tiny_base(5));
  CHECK(r.partners.size() == 2);
  CHECK(r.agents.size() == 1);
  CHECK(r.agents[0].role == Role::Agent);
  CHECK(r.curve.size() == 2);  // stage 1 + stage 2 rows
}

TEST_CASE("cross_evaluate fills the grid and renders ranks") {
  const Layout layout = load_builtin_layout("cr", "", 5, 20);
  const EnvConfig env_cfg;
  const int obs_dim = ObsSpec::for_layout(layout).size();
  const ArchSpec arch{obs_dim, {12}};

  LayoutEval in;
  in.layout = &layout;
  in.env_cfg = &env_cfg;
  for (const char* name : {"m1", "m2"}) {
    MethodAgents ma;
    ma.method = name;
    for (std::uint64_t seed : {1000ull, 2000ull}) {
      ma.seeds.push_back(seed);
      ma.per_seed.push_back({init_policy(
          arch, Role::Agent, std::string(name) + std::to_string(seed),
          derive_seed(11, seed, name[1]))});
    }
    in.methods.push_back(std::move(ma));
  }
  in.suite = build_partner_suite(layout, {12}, 99, nullptr, nullptr);
  REQUIRE(in.suite.size() == 2);  // random + scripted

  const EvalMatrix m = cross_evaluate(std::span<const LayoutEval>(&in, 1), 3,
                                      EvalMode::Greedy, 7);
  CHECK(m.methods == std::vector<std::string>{"m1", "m2"});
  CHECK(m.partners == std::vector<std::string>{"random", "scripted"});
  REQUIRE(m.cells.size() == 1);
  REQUIRE(m.cells[0].size() == 2);
  REQUIRE(m.cells[0][0].size() == 2);
  CHECK(m.rows.size() == 2 * 2 * 2);  // partner x method x seed
  for (const auto& cell : m.cells[0][0]) {
    CHECK(cell.stdev >= 0.0);
    CHECK(cell.per_seed_means.size() == 2);
  }
  CHECK(m.average_rank.size() == 2);
  // Greedy mode reproduces bit-exactly.
  const EvalMatrix m2 = cross_evaluate(std::span<const LayoutEval>(&in, 1), 3,
                                       EvalMode::Greedy, 7);
  for (size_t pi = 0; pi < 2; ++pi)
    for (size_t mi = 0; mi < 2; ++mi)
      CHECK(m.cells[0][pi][mi].mean == m2.cells[0][pi][mi].mean);

  // 1 method x 1 partner x 1 seed degenerates to evaluate_pair.
  LayoutEval one;
  one.layout = &layout;
  one.env_cfg = &env_cfg;
  MethodAgents ma;
  ma.method = "only";
  ma.seeds = {1000};
  ma.per_seed = {in.methods[0].per_seed[0]};
  one.methods.push_back(std::move(ma));
  SuitePartner sp;
  sp.name = "scripted";
  sp.scripted = true;
  one.suite.push_back(std::move(sp));
  const EvalMatrix single = cross_evaluate(std::span<const LayoutEval>(&one, 1),
                                           2, EvalMode::Greedy, 7);
  PolicyActor agent(&one.methods[0].per_seed[0][0]);
  ScriptedActor partner;
  const EvalResult direct =
      evaluate_pair(agent, partner, layout, env_cfg, 2, EvalMode::Greedy,
                    nullptr);
  CHECK(single.cells[0][0][0].mean == direct.mean);
}
