#include "maze/bench.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace maze {

std::string method_name(Method m) {
  switch (m) {
    case Method::SP: return "sp";
    case Method::PP: return "pp";
    case Method::FCP: return "fcp";
    case Method::MepLite: return "mep-lite";
    case Method::VMaze: return "vmaze";
    case Method::VMazeP: return "vmaze+p";
    case Method::VMazeD: return "vmaze+d";
    case Method::VMazePD: return "vmaze+pd";
    case Method::Maze: return "maze";
  }
  return "?";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = {
      Method::SP,      Method::PP,     Method::FCP,
      Method::MepLite, Method::VMaze,  Method::VMazeP,
      Method::VMazeD,  Method::VMazePD, Method::Maze,
  };
  return methods;
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods()) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method: " + name);
}

// ---------------------------------------------------------------------------
// Scripted rule policy
// ---------------------------------------------------------------------------

namespace {

constexpr int kUnreachable = INT_MAX;

struct Nav {
  const Layout* L = nullptr;
  int cols = 0;
  std::vector<int> dist;       // BFS steps from my cell; other player blocks
  std::vector<int> first_act;  // first move action toward each cell
  std::vector<char> my_region;     // floor region around me, players ignored
  std::vector<char> other_region;  // floor region around the other player

  int idx(int r, int c) const { return r * cols + c; }
};

void flood_region(const Layout& L, int r0, int c0, std::vector<char>& out) {
  out.assign(static_cast<size_t>(L.rows) * L.cols, 0);
  std::vector<int> stack = {r0 * L.cols + c0};
  out[stack[0]] = 1;
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    const int r = cur / L.cols, c = cur % L.cols;
    for (Dir d : {Dir::North, Dir::South, Dir::East, Dir::West}) {
      auto [dr, dc] = dir_delta(d);
      const int nr = r + dr, nc = c + dc;
      if (L.is_floor(nr, nc) && !out[nr * L.cols + nc]) {
        out[nr * L.cols + nc] = 1;
        stack.push_back(nr * L.cols + nc);
      }
    }
  }
}

Nav build_nav(const GameState& s, int p) {
  const Layout& L = *s.layout;
  Nav nav;
  nav.L = &L;
  nav.cols = L.cols;
  const int cells = L.rows * L.cols;
  nav.dist.assign(cells, kUnreachable);
  nav.first_act.assign(cells, -1);

  const PlayerState& me = s.players[p];
  const PlayerState& other = s.players[other_player(p)];
  const int start = nav.idx(me.row, me.col);
  nav.dist[start] = 0;

  // Role-dependent expansion order de-symmetrizes path ties between players.
  const Dir order0[4] = {Dir::North, Dir::South, Dir::East, Dir::West};
  const Dir order1[4] = {Dir::South, Dir::West, Dir::North, Dir::East};
  const Dir* order = p == 0 ? order0 : order1;

  std::vector<int> frontier = {start};
  while (!frontier.empty()) {
    std::vector<int> next;
    for (int cur : frontier) {
      const int r = cur / L.cols, c = cur % L.cols;
      for (int k = 0; k < 4; ++k) {
        auto [dr, dc] = dir_delta(order[k]);
        const int nr = r + dr, nc = c + dc;
        if (!L.is_floor(nr, nc)) continue;
        if (nr == other.row && nc == other.col) continue;
        const int ni = nav.idx(nr, nc);
        if (nav.dist[ni] != kUnreachable) continue;
        nav.dist[ni] = nav.dist[cur] + 1;
        nav.first_act[ni] =
            cur == start ? static_cast<int>(order[k]) : nav.first_act[cur];
        next.push_back(ni);
      }
    }
    frontier = std::move(next);
  }

  flood_region(L, me.row, me.col, nav.my_region);
  flood_region(L, other.row, other.col, nav.other_region);
  return nav;
}

Dir dir_between(int r0, int c0, int r1, int c1) {
  if (r1 < r0) return Dir::North;
  if (r1 > r0) return Dir::South;
  if (c1 > c0) return Dir::East;
  return Dir::West;
}

// Move to the closest floor cell adjacent to any of `features`, face it and
// interact. Returns -1 when nothing is reachable.
int approach(const Nav& nav, const GameState& s, int p,
             const std::vector<std::pair<int, int>>& features) {
  const Layout& L = *nav.L;
  const PlayerState& me = s.players[p];
  int best_dist = kUnreachable;
  int best_stand = -1;
  std::pair<int, int> best_feature{-1, -1};
  for (const auto& [fr, fc] : features) {
    for (Dir d : {Dir::North, Dir::South, Dir::East, Dir::West}) {
      auto [dr, dc] = dir_delta(d);
      const int gr = fr + dr, gc = fc + dc;
      if (!L.is_floor(gr, gc)) continue;
      const int gi = nav.idx(gr, gc);
      if (nav.dist[gi] < best_dist) {
        best_dist = nav.dist[gi];
        best_stand = gi;
        best_feature = {fr, fc};
      }
    }
  }
  if (best_stand < 0) return -1;
  if (best_dist == 0) {
    const Dir want =
        dir_between(me.row, me.col, best_feature.first, best_feature.second);
    if (me.facing == want) return static_cast<int>(Action::Interact);
    return static_cast<int>(want);  // bump-turn toward the feature
  }
  return nav.first_act[best_stand];
}

bool reachable(const Nav& nav,
               const std::vector<std::pair<int, int>>& features) {
  const Layout& L = *nav.L;
  for (const auto& [fr, fc] : features) {
    for (Dir d : {Dir::North, Dir::South, Dir::East, Dir::West}) {
      auto [dr, dc] = dir_delta(d);
      if (L.is_floor(fr + dr, fc + dc) &&
          nav.dist[nav.idx(fr + dr, fc + dc)] != kUnreachable)
        return true;
    }
  }
  return false;
}

bool is_handoff_counter(const Nav& nav, int r, int c) {
  const Layout& L = *nav.L;
  bool mine = false, theirs = false;
  for (Dir d : {Dir::North, Dir::South, Dir::East, Dir::West}) {
    auto [dr, dc] = dir_delta(d);
    if (!L.is_floor(r + dr, c + dc)) continue;
    const int i = nav.idx(r + dr, c + dc);
    mine |= nav.my_region[i] != 0;
    theirs |= nav.other_region[i] != 0;
  }
  return mine && theirs;
}

}  // namespace

namespace {
int scripted_decision(const GameState& s, Role role);
}

int scripted_partner_action(const GameState& s, Role role) {
  const int act = scripted_decision(s, role);
  // Contested-cell rule: the partner yields one step when its move enters a
  // cell the agent is adjacent to and already facing, so the two rule players
  // cannot livelock on a single stand cell.
  const int p = player_index(role);
  if (p == 1 && act >= 0 && act < 4) {
    const PlayerState& me = s.players[1];
    const PlayerState& other = s.players[0];
    auto [dr, dc] = dir_delta(static_cast<Dir>(act));
    const int tr = me.row + dr, tc = me.col + dc;
    if (s.layout->is_floor(tr, tc)) {  // turns in place never conflict
      auto [or_, oc] = dir_delta(other.facing);
      const bool other_adjacent =
          std::abs(other.row - tr) + std::abs(other.col - tc) == 1;
      if (other_adjacent && other.row + or_ == tr && other.col + oc == tc)
        return static_cast<int>(Action::Stay);
    }
  }
  return act;
}

namespace {

int scripted_decision(const GameState& s, Role role) {
  const Layout& L = *s.layout;
  const int p = player_index(role);
  const PlayerState& me = s.players[p];
  const Nav nav = build_nav(s, p);

  std::vector<std::pair<int, int>> pots_filling, pots_cooking, pots_ready;
  for (size_t i = 0; i < L.pot_cells.size(); ++i) {
    switch (s.pots[i].phase) {
      case PotPhase::Filling: pots_filling.push_back(L.pot_cells[i]); break;
      case PotPhase::Cooking: pots_cooking.push_back(L.pot_cells[i]); break;
      case PotPhase::Ready: pots_ready.push_back(L.pot_cells[i]); break;
    }
  }
  std::vector<std::pair<int, int>> serving_cells, onion_disp, dish_disp;
  for (int r = 0; r < L.rows; ++r) {
    for (int c = 0; c < L.cols; ++c) {
      if (L.at(r, c) == Cell::Serving) serving_cells.emplace_back(r, c);
      if (L.at(r, c) == Cell::OnionDispenser) onion_disp.emplace_back(r, c);
      if (L.at(r, c) == Cell::DishDispenser) dish_disp.emplace_back(r, c);
    }
  }

  std::vector<std::pair<int, int>> counter_onions, counter_dishes,
      counter_soups, handoff_free;
  int onions_on_counters = 0, dishes_on_handoff = 0;
  for (size_t i = 0; i < L.counter_cells.size(); ++i) {
    const auto [r, c] = L.counter_cells[i];
    const bool handoff = is_handoff_counter(nav, r, c);
    switch (s.counters[i]) {
      case Item::Onion:
        counter_onions.emplace_back(r, c);
        onions_on_counters++;
        break;
      case Item::Dish:
        counter_dishes.emplace_back(r, c);
        if (handoff) dishes_on_handoff++;
        break;
      case Item::Soup:
        counter_soups.emplace_back(r, c);
        break;
      case Item::None:
        if (handoff) handoff_free.emplace_back(r, c);
        break;
    }
  }

  int onions_in_hands = 0, dishes_in_hands = 0, soups_extant = 0;
  for (const auto& pl : s.players) {
    if (pl.held == Item::Onion) onions_in_hands++;
    if (pl.held == Item::Dish) dishes_in_hands++;
    if (pl.held == Item::Soup) soups_extant++;
  }
  soups_extant += static_cast<int>(counter_soups.size());
  int onion_demand = 0;
  for (const auto& pot : s.pots) {
    if (pot.phase == PotPhase::Filling) onion_demand += 3 - pot.onions;
  }

  const bool pot_reachable = reachable(nav, pots_filling) ||
                             reachable(nav, pots_cooking) ||
                             reachable(nav, pots_ready);

  // The supplier side never takes items back off handoff counters.
  auto sources = [&](const std::vector<std::pair<int, int>>& dispensers,
                     const std::vector<std::pair<int, int>>& counters,
                     bool exclude_handoff) {
    std::vector<std::pair<int, int>> out = dispensers;
    for (const auto& [r, c] : counters) {
      if (exclude_handoff && is_handoff_counter(nav, r, c)) continue;
      out.emplace_back(r, c);
    }
    return out;
  };

  const int stay = static_cast<int>(Action::Stay);
  int act = -1;

  switch (me.held) {
    case Item::Onion:
      if ((act = approach(nav, s, p, pots_filling)) >= 0) return act;
      if (!pot_reachable && (act = approach(nav, s, p, handoff_free)) >= 0)
        return act;
      // Clogged: a cooked pot wants a dish but my hands hold an onion.
      if (pot_reachable && pots_filling.empty() && !pots_ready.empty() &&
          (act = approach(nav, s, p, handoff_free)) >= 0)
        return act;
      return stay;
    case Item::Dish:
      if ((act = approach(nav, s, p, pots_ready)) >= 0) return act;
      if ((act = approach(nav, s, p, pots_cooking)) >= 0) return act;
      if (!pot_reachable && (act = approach(nav, s, p, handoff_free)) >= 0)
        return act;
      return stay;
    case Item::Soup:
      if ((act = approach(nav, s, p, serving_cells)) >= 0) return act;
      if ((act = approach(nav, s, p, handoff_free)) >= 0) return act;
      return stay;
    case Item::None:
      break;
  }

  const int pots_wanting_dish =
      static_cast<int>(pots_cooking.size() + pots_ready.size());
  if (pot_reachable) {
    const bool dish_needed = pots_wanting_dish > dishes_in_hands + soups_extant;
    if (!counter_soups.empty() && reachable(nav, serving_cells) &&
        (act = approach(nav, s, p, counter_soups)) >= 0)
      return act;
    if (dish_needed &&
        (reachable(nav, pots_ready) || reachable(nav, pots_cooking)) &&
        (act = approach(nav, s, p, sources(dish_disp, counter_dishes, false))) >=
            0)
      return act;
    if (reachable(nav, pots_filling) && onion_demand > onions_in_hands &&
        (act = approach(nav, s, p,
                        sources(onion_disp, counter_onions, false))) >= 0)
      return act;
    return stay;
  }

  // Supplier side: feed the other chamber through the handoff counters.
  const bool supplier_dish_needed =
      pots_wanting_dish > dishes_in_hands + soups_extant + dishes_on_handoff;
  if (supplier_dish_needed && !handoff_free.empty() &&
      (act = approach(nav, s, p, sources(dish_disp, counter_dishes, true))) >= 0)
    return act;
  if (onion_demand > onions_in_hands + onions_on_counters &&
      !handoff_free.empty() &&
      (act = approach(nav, s, p, sources(onion_disp, counter_onions, true))) >= 0)
    return act;
  return stay;
}

}  // namespace

// ---------------------------------------------------------------------------
// Baselines
// ---------------------------------------------------------------------------

int PoolActor::act(const GameState& state, Role role, bool greedy, Rng* rng) {
  if (state.t == 0 && rng != nullptr)
    current_ = rng->uniform_int(static_cast<int>(pool_.size()));
  encode_observation(state, role, obs_);
  const ActionDistribution dist = forward(pool_[current_], obs_);
  if (greedy) return greedy_action(dist);
  return sample_action(dist, *rng).first;
}

CoevoConfig method_coevo_config(Method method, const CoevoConfig& base) {
  CoevoConfig cfg = base;
  switch (method) {
    case Method::SP:
      cfg.n_p = 1;
      cfg.n_q = 1;
      cfg.pairing = PairingStrategy::Fixed;
      cfg.ppo.alpha = 0.0;
      cfg.use_archive = false;
      break;
    case Method::PP:
    case Method::VMazeP:
      cfg.pairing = PairingStrategy::Random;
      cfg.ppo.alpha = 0.0;
      cfg.use_archive = false;
      break;
    case Method::VMaze:
      cfg.pairing = PairingStrategy::Fixed;
      cfg.ppo.alpha = 0.0;
      cfg.use_archive = false;
      break;
    case Method::VMazeD:
      cfg.pairing = PairingStrategy::Fixed;
      cfg.use_archive = false;
      break;
    case Method::VMazePD:
      cfg.pairing = PairingStrategy::Random;
      cfg.use_archive = false;
      break;
    case Method::Maze:
      cfg.pairing = PairingStrategy::Random;
      cfg.use_archive = true;
      break;
    case Method::FCP:
    case Method::MepLite:
      break;  // staged internally
  }
  if (cfg.pairing == PairingStrategy::Fixed) cfg.n_q = cfg.n_p;
  return cfg;
}

namespace {

struct MidpointCapture : GenerationSink {
  int capture_at = 0;
  PolicyParams partner;
  bool captured = false;

  void on_generation(const TrainState& state,
                     const GenerationMetrics&) override {
    if (!captured && state.generation >= capture_at) {
      partner = state.Q.members[0];
      captured = true;
    }
  }
};

// Best-response training of a lone agent seat against a frozen partner pool;
// each episode draws a pool member uniformly.
std::vector<GenerationMetrics> train_best_response(
    PolicyParams& agent, std::span<const PolicyParams> pool,
    const Layout& layout, const EnvConfig& env_cfg, const CoevoConfig& cfg,
    std::uint64_t stream) {
  AdamState adam;
  std::vector<GenerationMetrics> curve;
  for (int gen = 0; gen < cfg.generations; ++gen) {
    Rng rng(derive_seed(cfg.seed, stream, gen));
    double train_sparse = 0.0, train_shaped = 0.0, coef_sum = 0.0;
    for (int j = 0; j < cfg.updates_per_generation; ++j) {
      PoolActor partner(pool);
      const double coef =
          shaping_coefficient(agent.train_steps, cfg.ppo.shaping_horizon);
      RolloutResult rollout = collect_rollout(
          layout, env_cfg, SeatRef{&agent, nullptr},
          SeatRef{nullptr, &partner}, cfg.ppo.iteration_timesteps, coef, rng);
      ppo_update(agent, adam, rollout.agent, cfg.ppo, rng);
      agent.train_steps += rollout.env_steps;
      train_sparse += rollout.mean_sparse_episode_reward;
      train_shaped += rollout.mean_shaped_episode_reward;
      coef_sum += coef;
    }
    GenerationMetrics m;
    m.generation = gen;
    m.train_sparse_mean = train_sparse / cfg.updates_per_generation;
    m.train_shaped_mean = train_shaped / cfg.updates_per_generation;
    m.shaped_coef = coef_sum / cfg.updates_per_generation;
    m.env_steps_per_member = agent.train_steps;
    double eval_sum = 0.0;
    for (const auto& partner : pool) {
      eval_sum += evaluate_pair(agent, partner, layout, env_cfg, 1,
                                EvalMode::Greedy, nullptr)
                      .mean;
    }
    m.eval_sparse_mean = eval_sum / static_cast<double>(pool.size());
    curve.push_back(m);
  }
  return curve;
}

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

// Population-entropy reward bonus: alpha * H(mean partner policy) per state.
void augment_population_entropy(RolloutBatch& batch,
                                std::span<const PolicyParams> population,
                                double alpha) {
  batch.diversity_bonus.assign(batch.actions.size(), 0.0);
  if (alpha == 0.0) return;
  std::unordered_map<std::vector<double>, double, VecHash> cache;
  for (int t = 0; t < batch.steps(); ++t) {
    const auto obs = batch.obs_at(t);
    std::vector<double> key(obs.begin(), obs.end());
    auto it = cache.find(key);
    double entropy;
    if (it != cache.end()) {
      entropy = it->second;
    } else {
      std::array<double, kNumActions> mean{};
      for (const auto& member : population) {
        const ActionDistribution d = forward(member, obs);
        for (int a = 0; a < kNumActions; ++a) mean[a] += d.probs[a];
      }
      entropy = 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        const double pr = mean[a] / static_cast<double>(population.size());
        if (pr > 0.0) entropy -= pr * std::log(pr);
      }
      cache.emplace(std::move(key), entropy);
    }
    batch.diversity_bonus[t] = alpha * entropy;
  }
}

BaselineResult run_fcp(const Layout& layout, const EnvConfig& env_cfg,
                       const CoevoConfig& base) {
  BaselineResult result;
  result.method = Method::FCP;

  // 5 independent self-play partner runs; keep first/middle/last checkpoints.
  for (int k = 0; k < 5; ++k) {
    CoevoConfig sp_cfg = method_coevo_config(Method::SP, base);
    sp_cfg.seed = derive_seed(base.seed, 700, k);
    TrainState st = init_train_state(layout, sp_cfg);
    result.partners.push_back(st.Q.members[0]);  // random-init checkpoint
    MidpointCapture mid;
    mid.capture_at = (sp_cfg.generations + 1) / 2;
    TrainResult r = train_loop(std::move(st), layout, env_cfg, sp_cfg, &mid);
    result.partners.push_back(mid.captured ? mid.partner : r.Q.members[0]);
    result.partners.push_back(r.Q.members[0]);
  }

  const int obs_dim = ObsSpec::for_layout(layout).size();
  PolicyParams agent = init_policy(ArchSpec{obs_dim, base.hidden}, Role::Agent,
                                   "fcp-br", derive_seed(base.seed, 750));
  result.curve =
      train_best_response(agent, result.partners, layout, env_cfg, base, 760);
  result.agents.push_back(std::move(agent));
  return result;
}

BaselineResult run_mep_lite(const Layout& layout, const EnvConfig& env_cfg,
                            const CoevoConfig& base) {
  BaselineResult result;
  result.method = Method::MepLite;
  const int obs_dim = ObsSpec::for_layout(layout).size();
  const ArchSpec arch{obs_dim, base.hidden};

  // Stage 1: partner population with the population-entropy reward, each
  // partner paired with its own helper agent.
  const int n = base.n_q;
  std::vector<PolicyParams> helpers, partners;
  std::vector<AdamState> helper_adam(n), partner_adam(n);
  for (int i = 0; i < n; ++i) {
    helpers.push_back(init_policy(arch, Role::Agent,
                                  "mep-h" + std::to_string(i),
                                  derive_seed(base.seed, 770, i)));
    partners.push_back(init_policy(arch, Role::Partner,
                                   "mep-q" + std::to_string(i),
                                   derive_seed(base.seed, 771, i)));
  }
  for (int gen = 0; gen < base.generations; ++gen) {
    double train_sparse = 0.0;
    for (int j = 0; j < base.updates_per_generation; ++j) {
      for (int i = 0; i < n; ++i) {
        Rng rng(derive_seed(base.seed, 772, gen * 1000 + j * 10 + i));
        const double coef = shaping_coefficient(partners[i].train_steps,
                                                base.ppo.shaping_horizon);
        RolloutResult rollout = collect_rollout(
            layout, env_cfg, SeatRef{&helpers[i], nullptr},
            SeatRef{&partners[i], nullptr}, base.ppo.iteration_timesteps, coef,
            rng);
        augment_population_entropy(rollout.partner, partners, base.ppo.alpha);
        ppo_update(helpers[i], helper_adam[i], rollout.agent, base.ppo, rng);
        ppo_update(partners[i], partner_adam[i], rollout.partner, base.ppo,
                   rng);
        helpers[i].train_steps += rollout.env_steps;
        partners[i].train_steps += rollout.env_steps;
        train_sparse += rollout.mean_sparse_episode_reward;
      }
    }
    GenerationMetrics m;
    m.generation = gen;
    m.train_sparse_mean = train_sparse / (base.updates_per_generation * n);
    m.env_steps_per_member = partners[0].train_steps;
    result.curve.push_back(m);
  }

  // Stage 2: best-response agent against the partner population.
  PolicyParams agent = init_policy(arch, Role::Agent, "mep-br",
                                   derive_seed(base.seed, 775));
  auto br_curve =
      train_best_response(agent, partners, layout, env_cfg, base, 776);
  for (auto& m : br_curve) {
    m.generation += base.generations;
    result.curve.push_back(m);
  }
  result.agents.push_back(std::move(agent));
  result.partners = std::move(partners);
  return result;
}

}  // namespace

BaselineResult run_baseline(Method method, const Layout& layout,
                            const EnvConfig& env_cfg, const CoevoConfig& base,
                            GenerationSink* sink) {
  if (method == Method::FCP) return run_fcp(layout, env_cfg, base);
  if (method == Method::MepLite) return run_mep_lite(layout, env_cfg, base);

  const CoevoConfig cfg = method_coevo_config(method, base);
  TrainResult r = train_maze(layout, env_cfg, cfg, sink);
  BaselineResult result;
  result.method = method;
  result.agents = std::move(r.P.members);
  result.partners = std::move(r.Q.members);
  result.archive = std::move(r.archive);
  result.curve = std::move(r.metrics);
  return result;
}

// ---------------------------------------------------------------------------
// Suites and cross evaluation
// ---------------------------------------------------------------------------

std::unique_ptr<Actor> SuitePartner::make_actor() const {
  if (scripted) return std::make_unique<ScriptedActor>();
  if (policies.size() == 1) return std::make_unique<PolicyActor>(&policies[0]);
  return std::make_unique<EnsembleActor>(
      std::span<const PolicyParams>(policies));
}

std::vector<SuitePartner> build_partner_suite(
    const Layout& layout, const std::vector<int>& hidden, std::uint64_t seed,
    const std::vector<PolicyParams>* sp_partner,
    const std::vector<PolicyParams>* swapped_agents) {
  const int obs_dim = ObsSpec::for_layout(layout).size();
  std::vector<SuitePartner> suite;

  SuitePartner random;
  random.name = "random";
  random.policies.push_back(init_policy(ArchSpec{obs_dim, hidden},
                                        Role::Partner, "suite-random",
                                        derive_seed(seed, 900)));
  suite.push_back(std::move(random));

  if (sp_partner != nullptr && !sp_partner->empty()) {
    SuitePartner sp;
    sp.name = "self-play";
    sp.policies = *sp_partner;
    suite.push_back(std::move(sp));
  }
  if (swapped_agents != nullptr && !swapped_agents->empty()) {
    SuitePartner swap;
    swap.name = "maze-swap";
    swap.policies = *swapped_agents;
    suite.push_back(std::move(swap));
  }

  SuitePartner scripted;
  scripted.name = "scripted";  // human-proxy substitute
  scripted.scripted = true;
  suite.push_back(std::move(scripted));
  return suite;
}

std::vector<double> fractional_ranks(std::span<const double> means) {
  const int n = static_cast<int>(means.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return means[a] > means[b]; });
  std::vector<double> ranks(n, 0.0);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && means[order[j + 1]] == means[order[i]]) ++j;
    const double shared = (i + j) / 2.0 + 1.0;
    for (int k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

EvalMatrix cross_evaluate(std::span<const LayoutEval> inputs, int episodes,
                          EvalMode mode, std::uint64_t eval_seed) {
  if (inputs.empty()) throw std::invalid_argument("cross_evaluate: no layouts");
  EvalMatrix out;
  for (const auto& m : inputs[0].methods) out.methods.push_back(m.method);
  for (const auto& sp : inputs[0].suite) out.partners.push_back(sp.name);

  std::vector<double> rank_sums(out.methods.size(), 0.0);
  long rank_cells = 0;

  for (size_t li = 0; li < inputs.size(); ++li) {
    const LayoutEval& in = inputs[li];
    out.layouts.push_back(in.layout->name);
    if (in.methods.size() != out.methods.size() ||
        in.suite.size() != out.partners.size())
      throw std::invalid_argument("cross_evaluate: inconsistent grid");

    std::vector<std::vector<EvalCell>> layout_cells;
    for (size_t pi = 0; pi < in.suite.size(); ++pi) {
      std::vector<EvalCell> row(in.methods.size());
      for (size_t mi = 0; mi < in.methods.size(); ++mi) {
        const MethodAgents& ma = in.methods[mi];
        EvalCell& cell = row[mi];
        std::vector<double> pooled;
        for (size_t si = 0; si < ma.per_seed.size(); ++si) {
          EnsembleActor agent(std::span<const PolicyParams>(ma.per_seed[si]));
          auto partner = in.suite[pi].make_actor();
          Rng rng(derive_seed(eval_seed, li * 1000 + pi, mi, si));
          std::vector<double> totals(episodes);
          for (int e = 0; e < episodes; ++e) {
            totals[e] = play_episode(agent, *partner, *in.layout, *in.env_cfg,
                                     mode, &rng);
          }
          double seed_mean = 0.0;
          for (double t : totals) seed_mean += t;
          seed_mean /= episodes;
          double seed_var = 0.0;
          for (double t : totals)
            seed_var += (t - seed_mean) * (t - seed_mean);
          cell.per_seed_means.push_back(seed_mean);
          out.rows.push_back({in.layout->name, in.suite[pi].name, ma.method,
                              ma.seeds[si], seed_mean,
                              std::sqrt(seed_var / episodes)});
          pooled.insert(pooled.end(), totals.begin(), totals.end());
        }
        double mean = 0.0;
        for (double t : pooled) mean += t;
        mean /= static_cast<double>(pooled.size());
        double var = 0.0;
        for (double t : pooled) var += (t - mean) * (t - mean);
        cell.mean = mean;
        cell.stdev = std::sqrt(var / static_cast<double>(pooled.size()));
      }

      std::vector<double> means;
      for (const auto& c : row) means.push_back(c.mean);
      const auto ranks = fractional_ranks(means);
      for (size_t mi = 0; mi < ranks.size(); ++mi) rank_sums[mi] += ranks[mi];
      rank_cells++;
      layout_cells.push_back(std::move(row));
    }
    out.cells.push_back(std::move(layout_cells));
  }

  out.average_rank.resize(out.methods.size());
  for (size_t mi = 0; mi < out.methods.size(); ++mi)
    out.average_rank[mi] = rank_sums[mi] / static_cast<double>(rank_cells);
  return out;
}

// ---------------------------------------------------------------------------
// PPO sanity task
// ---------------------------------------------------------------------------

double shaped_episode_return(Actor& agent, Actor& partner,
                             const Layout& layout, const EnvConfig& env_cfg) {
  GameState s = reset(layout);
  double total = 0.0;
  while (!s.done()) {
    const int a0 = agent.act(s, Role::Agent, true, nullptr);
    const int a1 = partner.act(s, Role::Partner, true, nullptr);
    StepOutcome out = step(
        s, JointAction{static_cast<Action>(a0), static_cast<Action>(a1)},
        env_cfg);
    for (const auto& [player, event] : out.shaped_events)
      total += env_cfg.shaped_value(event);
    s = std::move(out.next);
  }
  return total;
}

FetchSanityResult run_fetch_sanity(const Layout& layout,
                                   const EnvConfig& env_cfg,
                                   const PpoConfig& ppo, int updates,
                                   const std::vector<int>& hidden,
                                   std::uint64_t seed) {
  FetchSanityResult result;
  ScriptedActor scripted;
  StayActor stay;
  result.scripted_return =
      shaped_episode_return(scripted, stay, layout, env_cfg);

  const int obs_dim = ObsSpec::for_layout(layout).size();
  PolicyParams agent = init_policy(ArchSpec{obs_dim, hidden}, Role::Agent,
                                   "fetch", derive_seed(seed, 1));
  AdamState adam;
  Rng rng(derive_seed(seed, 2));
  for (int u = 0; u < updates; ++u) {
    const double coef =
        shaping_coefficient(agent.train_steps, ppo.shaping_horizon);
    RolloutResult rollout = collect_rollout(
        layout, env_cfg, SeatRef{&agent, nullptr}, SeatRef{nullptr, &stay},
        ppo.iteration_timesteps, coef, rng);
    ppo_update(agent, adam, rollout.agent, ppo, rng);
    agent.train_steps += rollout.env_steps;
    PolicyActor pa(&agent);
    result.per_update_returns.push_back(
        shaped_episode_return(pa, stay, layout, env_cfg));
  }

  // Final metric: mean shaped return of the trained stochastic policy.
  PolicyActor pa(&agent);
  Rng eval_rng(derive_seed(seed, 3));
  const int eval_episodes = 20;
  double total = 0.0;
  for (int e = 0; e < eval_episodes; ++e) {
    GameState s = reset(layout);
    while (!s.done()) {
      const int a0 = pa.act(s, Role::Agent, false, &eval_rng);
      StepOutcome out =
          step(s, JointAction{static_cast<Action>(a0), Action::Stay}, env_cfg);
      for (const auto& [player, event] : out.shaped_events)
        total += env_cfg.shaped_value(event);
      s = std::move(out.next);
    }
  }
  result.trained_return = total / eval_episodes;
  return result;
}

}  // namespace maze
