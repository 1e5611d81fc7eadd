// Command-line front end: train, eval, report, ablate, rq1.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "maze/checkpoint.hpp"
#include "maze/harness.hpp"
#include "maze/layouts.hpp"

namespace fs = std::filesystem;
using namespace maze;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTraining = 3;

struct CommonFlags {
  std::string config_path;
  std::string layout;
  std::string method;
  std::vector<std::uint64_t> seeds;
  double scale = -1.0;
  std::string out;
  std::string layouts_dir;
  bool single_thread = false;  // execution is sequential either way

  RunConfig resolve(bool desk_profile) const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (desk_profile && config_path.empty()) apply_desk_profile(cfg);
    if (!layout.empty()) cfg.layout = layout;
    if (!method.empty()) cfg.method = method;
    if (!seeds.empty()) cfg.seeds = seeds;
    if (scale > 0.0) cfg.scale = scale;
    if (!out.empty()) cfg.out = out;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON run configuration");
  cmd->add_option("--layout", flags.layout, "layout preset or .layout path");
  cmd->add_option("--method", flags.method, "training method");
  cmd->add_option("--seed,--seeds", flags.seeds, "seed list")->delimiter(',');
  cmd->add_option("--scale", flags.scale, "desk-scale factor in (0,1]");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--layouts-dir", flags.layouts_dir, "layout files directory");
  cmd->add_flag("--single-thread", flags.single_thread,
                "force single-threaded execution (always on)");
}

int cmd_train(const CommonFlags& flags) {
  const RunConfig cfg = flags.resolve(false);
  const auto runs = run_training(cfg, cfg.out, true, flags.layouts_dir);
  for (const auto& run : runs) {
    const double final_reward =
        run.result.curve.empty() ? 0.0
                                 : run.result.curve.back().train_sparse_mean;
    std::printf("%s seed %llu: final mean reward %.2f -> %s\n",
                cfg.method.c_str(), static_cast<unsigned long long>(run.seed),
                final_reward, run.dir.string().c_str());
  }
  return kExitOk;
}

int cmd_eval(const CommonFlags& flags, const std::vector<std::string>& methods,
             int episodes, const std::string& mode_name,
             const std::string& deploy, const std::string& runs_dir,
             const std::string& sp_dir, const std::string& swap_dir,
             std::uint64_t eval_seed) {
  const RunConfig cfg = flags.resolve(false);
  const Layout layout = layout_for(cfg, flags.layouts_dir);
  const EvalMode mode =
      mode_name == "sample" ? EvalMode::Sample : EvalMode::Greedy;

  LayoutEval input;
  input.layout = &layout;
  input.env_cfg = &cfg.env;
  const fs::path base =
      runs_dir.empty() ? fs::path(cfg.out) : fs::path(runs_dir);
  for (const auto& method : methods) {
    MethodAgents ma = load_method_agents(method, cfg.seeds, base, cfg.layout);
    if (deploy == "bro") {
      // Replace each population by its best response against the run's
      // archived partners.
      for (size_t si = 0; si < ma.per_seed.size(); ++si) {
        const fs::path final_dir =
            base / (method + "_" + cfg.layout + "_s" +
                    std::to_string(ma.seeds[si])) /
            "final";
        Archive archive;
        archive.capacity = static_cast<int>(ma.per_seed[si].size()) + 1;
        for (int i = 0;; ++i) {
          const fs::path p =
              final_dir / ("archive_" + std::to_string(i) + ".ckpt");
          if (!fs::exists(p)) break;
          ArchiveEntry e;
          e.partner = load_policy(p.string());
          e.inserted_at = i;
          archive.entries.push_back(std::move(e));
          archive.capacity = std::max(archive.capacity, i + 1);
        }
        if (archive.entries.empty())
          throw CheckpointError("bro deployment needs archived partners in " +
                                final_dir.string());
        const int best = select_best_response_offline(
            ma.per_seed[si], archive, layout, cfg.env, cfg.coevo.eval_episodes);
        ma.per_seed[si] = {ma.per_seed[si][best]};
      }
    }
    input.methods.push_back(std::move(ma));
  }

  // Optional trained suite members from previous runs.
  std::vector<PolicyParams> sp_partner, swapped_agents;
  if (!sp_dir.empty()) {
    for (int i = 0;; ++i) {
      const fs::path p =
          fs::path(sp_dir) / ("partner_" + std::to_string(i) + ".ckpt");
      if (!fs::exists(p)) break;
      sp_partner.push_back(load_policy(p.string()));
    }
  }
  if (!swap_dir.empty()) {
    for (int i = 0;; ++i) {
      const fs::path p =
          fs::path(swap_dir) / ("agent_" + std::to_string(i) + ".ckpt");
      if (!fs::exists(p)) break;
      swapped_agents.push_back(load_policy(p.string()));
    }
  }
  input.suite = build_partner_suite(
      layout, cfg.coevo.hidden, eval_seed,
      sp_partner.empty() ? nullptr : &sp_partner,
      swapped_agents.empty() ? nullptr : &swapped_agents);

  const EvalMatrix matrix = cross_evaluate(
      std::span<const LayoutEval>(&input, 1), episodes, mode, eval_seed);

  fs::create_directories(cfg.out);
  emit_results_csv(matrix, fs::path(cfg.out) / "results.csv");
  const std::string table = render_table(matrix);
  std::ofstream(fs::path(cfg.out) / "table.txt") << table;
  std::cout << table;
  return kExitOk;
}

// Re-renders a results CSV (one row per layout x partner x method x seed).
int cmd_report(const std::string& results_path, const std::string& format,
               const std::string& out_dir) {
  std::ifstream in(results_path);
  if (!in) throw ConfigError("cannot open results: " + results_path);
  std::string header;
  std::getline(in, header);
  if (header != "layout,partner,method,seed,mean,std")
    throw ConfigError("unrecognized results header: " + header);

  EvalMatrix matrix;
  std::map<std::string, size_t> li, pi, mi;
  std::string line;
  std::vector<EvalMatrix::Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    EvalMatrix::Row row;
    std::string seed, mean, stdev;
    std::getline(ss, row.layout, ',');
    std::getline(ss, row.partner, ',');
    std::getline(ss, row.method, ',');
    std::getline(ss, seed, ',');
    std::getline(ss, mean, ',');
    std::getline(ss, stdev, ',');
    row.seed = std::stoull(seed);
    row.mean = std::stod(mean);
    row.stdev = std::stod(stdev);
    if (!li.count(row.layout)) {
      li[row.layout] = matrix.layouts.size();
      matrix.layouts.push_back(row.layout);
    }
    if (!pi.count(row.partner)) {
      pi[row.partner] = matrix.partners.size();
      matrix.partners.push_back(row.partner);
    }
    if (!mi.count(row.method)) {
      mi[row.method] = matrix.methods.size();
      matrix.methods.push_back(row.method);
    }
    rows.push_back(std::move(row));
  }
  matrix.rows = rows;
  matrix.cells.assign(matrix.layouts.size(),
                      std::vector<std::vector<EvalCell>>(
                          matrix.partners.size(),
                          std::vector<EvalCell>(matrix.methods.size())));
  for (const auto& row : rows) {
    matrix.cells[li[row.layout]][pi[row.partner]][mi[row.method]]
        .per_seed_means.push_back(row.mean);
  }
  std::vector<double> rank_sums(matrix.methods.size(), 0.0);
  long cells = 0;
  for (auto& layout_cells : matrix.cells) {
    for (auto& row_cells : layout_cells) {
      std::vector<double> means;
      for (auto& cell : row_cells) {
        double m = 0.0;
        for (double v : cell.per_seed_means) m += v;
        cell.mean =
            cell.per_seed_means.empty() ? 0.0 : m / cell.per_seed_means.size();
        double var = 0.0;
        for (double v : cell.per_seed_means)
          var += (v - cell.mean) * (v - cell.mean);
        cell.stdev = cell.per_seed_means.empty()
                         ? 0.0
                         : std::sqrt(var / cell.per_seed_means.size());
        means.push_back(cell.mean);
      }
      const auto ranks = fractional_ranks(means);
      for (size_t k = 0; k < ranks.size(); ++k) rank_sums[k] += ranks[k];
      cells++;
    }
  }
  matrix.average_rank.resize(matrix.methods.size());
  for (size_t k = 0; k < matrix.methods.size(); ++k)
    matrix.average_rank[k] = cells > 0 ? rank_sums[k] / cells : 0.0;

  fs::create_directories(out_dir);
  if (format == "csv") {
    emit_results_csv(matrix, fs::path(out_dir) / "results.csv");
  } else if (format == "table") {
    const std::string table = render_table(matrix);
    std::ofstream(fs::path(out_dir) / "table.txt") << table;
    std::cout << table;
  } else if (format == "svg-curves") {
    std::vector<CurveSeries> series;
    for (size_t k = 0; k < matrix.methods.size(); ++k) {
      CurveSeries s;
      s.name = matrix.methods[k];
      double x = 0;
      for (const auto& layout_cells : matrix.cells)
        for (const auto& row_cells : layout_cells) {
          s.x.push_back(x++);
          s.y.push_back(row_cells[k].mean);
        }
      series.push_back(std::move(s));
    }
    emit_curves_svg(series, "evaluation means by cell",
                    fs::path(out_dir) / "curves.svg");
  } else {
    throw ConfigError("unknown report format: " + format);
  }
  return kExitOk;
}

int cmd_rq1(CommonFlags flags) {
  if (flags.layout.empty()) flags.layout = "fc_mini";
  if (flags.scale <= 0) flags.scale = 0.02;
  if (flags.seeds.empty()) flags.seeds = {1000, 2000, 3000};
  if (flags.out.empty()) flags.out = "runs/rq1";
  RunConfig cfg = flags.resolve(true);
  if (flags.config_path.empty()) {
    cfg.coevo.n_p = 3;
    cfg.coevo.n_q = 3;
    cfg.coevo.generations = 10;
    cfg.coevo.archive_capacity = 6;
  }
  const Rq1Outcome outcome = run_rq1(cfg, cfg.out, flags.layouts_dir);
  for (size_t i = 0; i < outcome.vmaze_final.size(); ++i) {
    std::printf("seed %llu: vmaze %.2f vs sp %.2f -> %s\n",
                static_cast<unsigned long long>(cfg.seeds[i]),
                outcome.vmaze_final[i], outcome.sp_final[i],
                outcome.vmaze_final[i] >= outcome.sp_final[i] ? "vmaze" : "sp");
  }
  std::printf("vmaze >= sp in %d of %zu seeds\n", outcome.wins,
              cfg.seeds.size());
  return kExitOk;
}

int cmd_ablate(CommonFlags flags) {
  if (flags.layout.empty()) flags.layout = "cr_mini";
  if (flags.scale <= 0) flags.scale = 0.01;
  if (flags.seeds.empty()) flags.seeds = {1000};
  if (flags.out.empty()) flags.out = "runs/ablate";
  RunConfig cfg = flags.resolve(true);
  if (flags.config_path.empty()) {
    cfg.coevo.n_p = 3;
    cfg.coevo.n_q = 3;
    cfg.coevo.generations = 5;
    cfg.coevo.archive_capacity = 6;
  }
  const LadderOutcome outcome = run_ladder(cfg, cfg.out, flags.layouts_dir);
  std::printf("random-pair baseline: %.2f\n", outcome.random_baseline);
  for (size_t i = 0; i < outcome.methods.size(); ++i) {
    std::printf("%-9s final %.2f\n", outcome.methods[i].c_str(),
                outcome.final_reward[i]);
  }
  if (!outcome.all_finite) {
    std::fprintf(stderr, "non-finite metrics encountered\n");
    return kExitTraining;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coevolutionary zero-shot coordination trainer"};
  app.require_subcommand(1);

  CommonFlags train_flags, eval_flags, rq1_flags, ablate_flags;

  CLI::App* train = app.add_subcommand("train", "train one method");
  add_common(train, train_flags);

  CLI::App* eval = app.add_subcommand("eval", "cross-evaluate trained runs");
  add_common(eval, eval_flags);
  std::vector<std::string> eval_methods = {"maze"};
  int eval_episodes = 20;
  std::string eval_mode = "greedy";
  std::string eval_deploy = "ensemble";
  std::string runs_dir, sp_dir, swap_dir;
  std::uint64_t eval_seed = 12345;
  eval->add_option("--methods", eval_methods, "methods to evaluate")
      ->delimiter(',');
  eval->add_option("--episodes", eval_episodes, "episodes per cell");
  eval->add_option("--mode", eval_mode, "greedy|sample");
  eval->add_option("--deploy", eval_deploy, "ensemble|bro");
  eval->add_option("--runs", runs_dir, "directory holding trained runs");
  eval->add_option("--suite-sp", sp_dir, "final/ dir of an sp run (partner)");
  eval->add_option("--suite-swap", swap_dir,
                   "final/ dir of a role-swapped run (ensemble partner)");
  eval->add_option("--eval-seed", eval_seed, "evaluation rng seed");

  CLI::App* report = app.add_subcommand("report", "re-render results");
  std::string results_path, report_format = "table",
                            report_out = "runs/report";
  report->add_option("--results", results_path, "results.csv path")
      ->required();
  report->add_option("--format", report_format, "csv|table|svg-curves");
  report->add_option("--out", report_out, "output directory");

  CLI::App* rq1 = app.add_subcommand(
      "rq1", "two-population coevolution vs self-play trend check");
  add_common(rq1, rq1_flags);

  CLI::App* ablate = app.add_subcommand("ablate", "component ladder runs");
  add_common(ablate, ablate_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_flags);
    if (eval->parsed())
      return cmd_eval(eval_flags, eval_methods, eval_episodes, eval_mode,
                      eval_deploy, runs_dir, sp_dir, swap_dir, eval_seed);
    if (report->parsed())
      return cmd_report(results_path, report_format, report_out);
    if (rq1->parsed()) return cmd_rq1(rq1_flags);
    if (ablate->parsed()) return cmd_ablate(ablate_flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const LayoutError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const CheckpointError& e) {
    std::fprintf(stderr, "checkpoint error: %s\n", e.what());
    return kExitTraining;
  } catch (const TrainingError& e) {
    std::fprintf(stderr, "training error: %s\n", e.what());
    return kExitTraining;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitTraining;
  }
  return kExitOk;
}
