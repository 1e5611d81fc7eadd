#include "maze/harness.hpp"

#include <cmath>
#include <fstream>

#include "maze/checkpoint.hpp"
#include "maze/layouts.hpp"

namespace maze {

namespace fs = std::filesystem;

void apply_desk_profile(RunConfig& cfg) {
  cfg.coevo.ppo.clip = 0.25;
  cfg.coevo.ppo.learning_rate = 2e-3;
  cfg.coevo.ppo.minibatch_size = 1000;
  cfg.coevo.ppo.num_minibatches = 10;
  cfg.coevo.ppo.max_grad_norm = 0.5;
  cfg.coevo.hidden = {32, 32};
  cfg.coevo.eval_episodes = 3;
}

Layout layout_for(const RunConfig& cfg, const std::string& layouts_dir) {
  return load_builtin_layout(cfg.layout, layouts_dir, cfg.cook_time,
                             cfg.horizon);
}

void write_provenance(const fs::path& dir, const RunConfig& cfg) {
  const std::string snapshot = config_to_text(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : snapshot) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ofstream out(dir / "provenance.txt");
  out << "maze 1.0.0\nconfig-fnv64: " << std::hex << h << std::dec << "\n";
}

namespace {

void write_final_artifacts(const fs::path& dir, const BaselineResult& r) {
  const fs::path final_dir = dir / "final";
  fs::create_directories(final_dir);
  for (size_t i = 0; i < r.agents.size(); ++i) {
    save_policy(r.agents[i],
                (final_dir / ("agent_" + std::to_string(i) + ".ckpt")).string());
  }
  for (size_t i = 0; i < r.partners.size(); ++i) {
    save_policy(
        r.partners[i],
        (final_dir / ("partner_" + std::to_string(i) + ".ckpt")).string());
  }
  std::ofstream manifest(final_dir / "archive.manifest");
  manifest << "# id inserted_at behavior...\n";
  for (size_t i = 0; i < r.archive.entries.size(); ++i) {
    const auto& e = r.archive.entries[i];
    save_policy(e.partner,
                (final_dir / ("archive_" + std::to_string(i) + ".ckpt")).string());
    manifest << i << ' ' << e.inserted_at;
    char num[64];
    for (double b : e.behavior) {
      std::snprintf(num, sizeof(num), " %.10g", b);
      manifest << num;
    }
    manifest << ' ' << e.partner.lineage << '\n';
  }
}

void write_curve_csv(const fs::path& csv,
                     const std::vector<GenerationMetrics>& curve) {
  for (const auto& m : curve) append_metrics_row(csv, m);
}

}  // namespace

std::vector<TrainedRun> run_training(const RunConfig& cfg, const fs::path& out,
                                     bool per_generation_checkpoints,
                                     const std::string& layouts_dir) {
  cfg.validate();
  const Layout layout = layout_for(cfg, layouts_dir);
  const Method method = parse_method(cfg.method);

  std::vector<TrainedRun> runs;
  for (std::uint64_t seed : cfg.seeds) {
    TrainedRun run;
    run.seed = seed;
    run.dir = out / (cfg.method + "_" + cfg.layout + "_s" + std::to_string(seed));
    fs::create_directories(run.dir);

    RunConfig snapshot = cfg;
    snapshot.seeds = {seed};
    std::ofstream(run.dir / "config.json") << config_to_text(snapshot);
    write_provenance(run.dir, snapshot);

    const CoevoConfig coevo = cfg.scaled_coevo(seed);
    const bool coevo_backed = method != Method::FCP && method != Method::MepLite;
    if (coevo_backed) {
      DirectorySink sink(run.dir, per_generation_checkpoints);
      run.result = run_baseline(method, layout, cfg.env, coevo, &sink);
    } else {
      run.result = run_baseline(method, layout, cfg.env, coevo, nullptr);
      write_curve_csv(run.dir / "metrics.csv", run.result.curve);
    }
    write_final_artifacts(run.dir, run.result);
    runs.push_back(std::move(run));
  }
  return runs;
}

MethodAgents load_method_agents(const std::string& method,
                                const std::vector<std::uint64_t>& seeds,
                                const fs::path& out,
                                const std::string& layout_name) {
  MethodAgents ma;
  ma.method = method;
  for (std::uint64_t seed : seeds) {
    const fs::path final_dir =
        out / (method + "_" + layout_name + "_s" + std::to_string(seed)) /
        "final";
    std::vector<PolicyParams> agents;
    for (int i = 0;; ++i) {
      const fs::path p = final_dir / ("agent_" + std::to_string(i) + ".ckpt");
      if (!fs::exists(p)) break;
      agents.push_back(load_policy(p.string()));
    }
    if (agents.empty())
      throw CheckpointError("no trained agents under " + final_dir.string());
    ma.seeds.push_back(seed);
    ma.per_seed.push_back(std::move(agents));
  }
  return ma;
}

double random_pair_baseline(const Layout& layout, const EnvConfig& env_cfg,
                            const std::vector<int>& hidden, int episodes,
                            std::uint64_t seed) {
  const int obs_dim = ObsSpec::for_layout(layout).size();
  const ArchSpec arch{obs_dim, hidden};
  const PolicyParams a =
      init_policy(arch, Role::Agent, "rnd-a", derive_seed(seed, 1));
  const PolicyParams b =
      init_policy(arch, Role::Partner, "rnd-b", derive_seed(seed, 2));
  Rng rng(derive_seed(seed, 3));
  return evaluate_pair(a, b, layout, env_cfg, episodes, EvalMode::Sample, &rng)
      .mean;
}

Rq1Outcome run_rq1(const RunConfig& base, const fs::path& out,
                   const std::string& layouts_dir) {
  Rq1Outcome outcome;
  fs::create_directories(out);

  for (const char* method : {"sp", "vmaze"}) {
    RunConfig cfg = base;
    cfg.method = method;
    const auto runs = run_training(cfg, out, false, layouts_dir);
    for (const auto& run : runs) {
      const double final_reward = run.result.curve.empty()
                                      ? 0.0
                                      : run.result.curve.back().train_sparse_mean;
      (std::string(method) == "sp" ? outcome.sp_final : outcome.vmaze_final)
          .push_back(final_reward);
      outcome.curves.push_back(curve_from_metrics(
          std::string(method) + "_s" + std::to_string(run.seed),
          run.result.curve));
    }
  }

  for (size_t i = 0; i < outcome.vmaze_final.size(); ++i) {
    if (outcome.vmaze_final[i] >= outcome.sp_final[i]) outcome.wins++;
  }

  emit_curves_csv(outcome.curves, out / "rq1_curves.csv");
  emit_curves_svg(outcome.curves, "training reward: vanilla coevolution vs sp",
                  out / "rq1_curves.svg");
  std::ofstream summary(out / "rq1_summary.csv");
  summary << "seed,vmaze_final,sp_final,vmaze_ge_sp\n";
  for (size_t i = 0; i < outcome.vmaze_final.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof(line), "%llu,%.10g,%.10g,%d\n",
                  static_cast<unsigned long long>(base.seeds[i]),
                  outcome.vmaze_final[i], outcome.sp_final[i],
                  outcome.vmaze_final[i] >= outcome.sp_final[i] ? 1 : 0);
    summary << line;
  }
  return outcome;
}

LadderOutcome run_ladder(const RunConfig& base, const fs::path& out,
                         const std::string& layouts_dir) {
  LadderOutcome outcome;
  fs::create_directories(out);
  const Layout layout = layout_for(base, layouts_dir);
  outcome.random_baseline = random_pair_baseline(
      layout, base.env, base.coevo.hidden, 20, base.seeds.front());

  std::vector<CurveSeries> curves;
  for (const char* method :
       {"vmaze", "vmaze+p", "vmaze+d", "vmaze+pd", "maze"}) {
    RunConfig cfg = base;
    cfg.method = method;
    cfg.seeds = {base.seeds.front()};
    const auto runs = run_training(cfg, out, false, layouts_dir);
    const auto& curve = runs[0].result.curve;
    outcome.methods.push_back(method);
    outcome.curves.push_back(curve);
    outcome.final_reward.push_back(curve.empty()
                                       ? 0.0
                                       : curve.back().train_sparse_mean);
    for (const auto& m : curve) {
      if (!std::isfinite(m.train_sparse_mean) ||
          !std::isfinite(m.eval_sparse_mean) || !std::isfinite(m.agent_jsd))
        outcome.all_finite = false;
    }
    curves.push_back(curve_from_metrics(method, curve));
  }

  emit_curves_csv(curves, out / "ladder_curves.csv");
  emit_curves_svg(curves, "component ladder training reward",
                  out / "ladder_curves.svg");
  std::ofstream summary(out / "ladder_summary.csv");
  summary << "method,final_reward,random_baseline\n";
  for (size_t i = 0; i < outcome.methods.size(); ++i) {
    char line[128];
    std::snprintf(line, sizeof(line), "%s,%.10g,%.10g\n",
                  outcome.methods[i].c_str(), outcome.final_reward[i],
                  outcome.random_baseline);
    summary << line;
  }
  return outcome;
}

}  // namespace maze
