#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "maze/bench.hpp"
#include "maze/config.hpp"
#include "maze/report.hpp"

namespace maze {

// One-command pipelines shared by the CLI and the acceptance suite.

// Desk-scale PPO profile for the trend pipelines: the stock constants are
// tuned for multi-million-step runs and move too slowly at reduced budgets.
void apply_desk_profile(RunConfig& cfg);

Layout layout_for(const RunConfig& cfg, const std::string& layouts_dir = "");

// Trains cfg.method on cfg.layout for every seed. Writes one run directory
// per seed under <out>/<method>_<layout>_s<seed>/ with a config snapshot,
// provenance string, metrics.csv, per-generation checkpoints (optional) and
// the final policies. Returns the per-seed results.
struct TrainedRun {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  BaselineResult result;
};
std::vector<TrainedRun> run_training(const RunConfig& cfg,
                                     const std::filesystem::path& out,
                                     bool per_generation_checkpoints,
                                     const std::string& layouts_dir = "");

// Loads the final agent populations of previously trained runs.
MethodAgents load_method_agents(const std::string& method,
                                const std::vector<std::uint64_t>& seeds,
                                const std::filesystem::path& out,
                                const std::string& layout_name);

// SP-vs-vanilla-coevolution comparison on one layout: trains both methods on
// every seed, emits curves and a summary, and counts the seeds where the
// vanilla coevolution's final mean training reward is at least SP's.
struct Rq1Outcome {
  std::vector<double> vmaze_final;  // per seed
  std::vector<double> sp_final;
  int wins = 0;  // seeds with vmaze_final >= sp_final
  std::vector<CurveSeries> curves;
};
Rq1Outcome run_rq1(const RunConfig& base, const std::filesystem::path& out,
                   const std::string& layouts_dir = "");

// Component ladder: vanilla, +P, +D, +PD and the full method, one seed.
struct LadderOutcome {
  std::vector<std::string> methods;
  std::vector<std::vector<GenerationMetrics>> curves;  // per method
  std::vector<double> final_reward;                    // per method
  double random_baseline = 0.0;  // sampled random-pair mean sparse reward
  bool all_finite = true;
};
LadderOutcome run_ladder(const RunConfig& base, const std::filesystem::path& out,
                         const std::string& layouts_dir = "");

// Mean sparse episode reward of freshly initialized (random) pairs.
double random_pair_baseline(const Layout& layout, const EnvConfig& env_cfg,
                            const std::vector<int>& hidden, int episodes,
                            std::uint64_t seed);

void write_provenance(const std::filesystem::path& dir, const RunConfig& cfg);

}  // namespace maze
