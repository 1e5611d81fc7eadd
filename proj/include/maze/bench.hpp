#pragma once

#include <memory>
#include <string>
#include <vector>

#include "maze/coevo.hpp"
#include "maze/deploy.hpp"

namespace maze {

// Baselines, scripted partners, test suites and the cross-evaluation harness.

enum class Method {
  SP,        // one agent-partner pair trained only together
  PP,        // mixed populations, uniform re-pairing, no diversity/archive
  FCP,       // 5 self-play partner runs x {first,middle,last} checkpoints + BR
  MepLite,   // partner population with population-entropy bonus + BR agent
  VMaze,     // fixed pairing, no diversity, no archive
  VMazeP,    // + random pairing
  VMazeD,    // + diversity term
  VMazePD,   // + pairing and diversity
  Maze,      // full method: pairing, diversity, archive selection
};

std::string method_name(Method m);
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

// Deterministic rule policy: fill pots with onions, fetch dishes for
// cooking/ready pots, collect ready soup, deliver; navigates by BFS and uses
// pass-through counters to hand items over when pots or serving cells are
// unreachable from its side. Pure function of the state.
int scripted_partner_action(const GameState& state, Role role);

class ScriptedActor : public Actor {
 public:
  int act(const GameState& state, Role role, bool, Rng*) override {
    return scripted_partner_action(state, role);
  }
};

// Frozen partner pool; re-draws a member at each episode start.
class PoolActor : public Actor {
 public:
  explicit PoolActor(std::span<const PolicyParams> pool) : pool_(pool) {}
  int act(const GameState& state, Role role, bool greedy, Rng* rng) override;

 private:
  std::span<const PolicyParams> pool_;
  int current_ = 0;
  std::vector<double> obs_;
};

struct BaselineResult {
  Method method = Method::SP;
  std::vector<PolicyParams> agents;    // final agent-seat policies
  std::vector<PolicyParams> partners;  // final partner-seat policies / pool
  Archive archive;                     // empty for methods without one
  std::vector<GenerationMetrics> curve;
};

// Trains one method on one layout. `base` carries populations sizes, T, T'
// and PPO settings; the method toggles pairing/alpha/archive itself.
BaselineResult run_baseline(Method method, const Layout& layout,
                            const EnvConfig& env_cfg, const CoevoConfig& base,
                            GenerationSink* sink = nullptr);

// Configuration for one method as run_baseline will apply it.
CoevoConfig method_coevo_config(Method method, const CoevoConfig& base);

// --- partner suites and cross evaluation ---

struct SuitePartner {
  std::string name;
  std::vector<PolicyParams> policies;  // owned; empty for the scripted member
  bool scripted = false;

  std::unique_ptr<Actor> make_actor() const;
};

// Assembles the default suite: a randomly initialized partner and the
// scripted heuristic (human-proxy substitute), plus optional trained
// partners: a self-play partner and a role-swapped ensemble.
std::vector<SuitePartner> build_partner_suite(
    const Layout& layout, const std::vector<int>& hidden, std::uint64_t seed,
    const std::vector<PolicyParams>* sp_partner,
    const std::vector<PolicyParams>* swapped_agents);

struct EvalCell {
  double mean = 0.0;
  double stdev = 0.0;
  std::vector<double> per_seed_means;
};

struct EvalMatrix {
  std::vector<std::string> layouts;
  std::vector<std::string> partners;  // same suite names across layouts
  std::vector<std::string> methods;
  // cells[layout][partner][method]; mean/std pooled over seeds x episodes
  std::vector<std::vector<std::vector<EvalCell>>> cells;
  std::vector<double> average_rank;  // per method, fractional ranking

  // One row per layout x partner x method x seed.
  struct Row {
    std::string layout, partner, method;
    std::uint64_t seed;
    double mean, stdev;
  };
  std::vector<Row> rows;
};

// Trained agents for one method on one layout, one entry per seed.
struct MethodAgents {
  std::string method;
  std::vector<std::uint64_t> seeds;
  std::vector<std::vector<PolicyParams>> per_seed;  // deployed as an ensemble
};

struct LayoutEval {
  const Layout* layout = nullptr;
  const EnvConfig* env_cfg = nullptr;
  std::vector<MethodAgents> methods;
  std::vector<SuitePartner> suite;
};

EvalMatrix cross_evaluate(std::span<const LayoutEval> inputs, int episodes,
                          EvalMode mode, std::uint64_t eval_seed);

// Fractional ranks (1 = best) of a row of means; ties share the average rank.
std::vector<double> fractional_ranks(std::span<const double> means);

// --- PPO sanity task ---

struct FetchSanityResult {
  double scripted_return = 0.0;  // greedy shaped return of the rule policy
  double trained_return = 0.0;   // mean sampled shaped return after training
  std::vector<double> per_update_returns;  // greedy, one per update
};

// Single-seat shaped-reward task: player 2 parks, player 1 learns to ferry
// onions into pots. Returns greedy shaped episode totals.
FetchSanityResult run_fetch_sanity(const Layout& layout,
                                   const EnvConfig& env_cfg,
                                   const PpoConfig& ppo, int updates,
                                   const std::vector<int>& hidden,
                                   std::uint64_t seed);

// Greedy episode, returning the summed shaped-event values (unannealed).
double shaped_episode_return(Actor& agent, Actor& partner, const Layout& layout,
                             const EnvConfig& env_cfg);

}  // namespace maze
