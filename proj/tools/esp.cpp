// Command-line front end: runs experiments and writes CSV / text / JSON results.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "esp/analysis.hpp"
#include "esp/baselines.hpp"
#include "esp/catalog.hpp"
#include "esp/config.hpp"
#include "esp/evolution.hpp"
#include "esp/io.hpp"
#include "esp/parallel.hpp"
#include "esp/stats.hpp"
#include "esp/wilcoxon.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace esp;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> jobs;
  std::optional<std::string> task;
};

ExperimentConfig resolve(const Globals& g) {
  ExperimentConfig cfg;
  if (g.task) cfg.task.kind = parse_task(*g.task);
  if (!g.config_path.empty()) apply_config_text(cfg, csv::read_file(g.config_path));
  if (g.task) cfg.task.kind = parse_task(*g.task);
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.out_dir = *g.out;
  if (g.jobs) cfg.jobs = *g.jobs;
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::string path_in(const ExperimentConfig& cfg, const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); }

void write_summary(const ExperimentConfig& cfg, const std::string& command, json body) {
  json doc;
  doc["command"] = command;
  doc["task"] = std::string(to_string(cfg.task.kind));
  doc["seed"] = cfg.seed;
  doc["config"] = emit_config(cfg);
  doc["results"] = std::move(body);
  csv::write_file(path_in(cfg, command + "_summary.json"), doc.dump(2) + "\n");
  std::cout << doc["results"].dump(2) << "\n";
}

json summary_json(const Summary& s) {
  return {{"n", s.n}, {"mean", s.mean}, {"std", s.std}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

PlasticityRule chosen_rule(const ExperimentConfig& cfg) {
  return cfg.rule ? *cfg.rule : catalog_rule(cfg.task.kind, cfg.rule_id);
}

void cmd_evolve(const ExperimentConfig& cfg) {
  const GAConfig ga = cfg.ga_config();
  std::vector<HarvestedRule> harvest;
  json runs = json::array();
  for (int r = 0; r < cfg.ga_runs; ++r) {
    const auto res = run_ga(ga, derive_seed(cfg.seed, seed_tag::kRun, static_cast<std::uint64_t>(r)));
    csv::write_file(path_in(cfg, "history_run" + std::to_string(r) + ".csv"), csv::emit(history_table(res.history)));
    for (const auto& ind : res.harvest) harvest.push_back({ind.rule, *ind.fitness, r});
    runs.push_back({{"run", r}, {"generations", res.generations}, {"best", res.history.back().best},
                    {"best_rule", format_rule(res.harvest.front().rule)}, {"hit_generation_cap", res.hit_generation_cap}});
    std::cerr << "run " << r << ": " << res.generations << " generations, best " << res.history.back().best << "\n";
  }
  csv::write_file(path_in(cfg, "harvest.txt"), emit_harvest(harvest));
  const auto rows = aggregate_distinct_rules(harvest);
  csv::write_file(path_in(cfg, "distinct_rules.csv"), csv::emit(distinct_rules_table(rows)));
  write_summary(cfg, "evolve", {{"runs", runs}, {"distinct_rules", rows.size()}, {"top_pattern", pattern_string(rows.front().pattern)}});
}

void cmd_run_rule(const ExperimentConfig& cfg, const std::string& log_path, bool snapshots) {
  const PlasticityRule rule = chosen_rule(cfg);
  const auto n = static_cast<std::size_t>(cfg.trials);
  std::vector<double> fit;
  json body{{"rule", format_rule(rule)}};
  if (cfg.task.kind == TaskKind::Foraging) {
    const auto per_trial = parallel_map(n, cfg.jobs, [&](std::size_t k) {
      return run_foraging_trial(rule, trial_net_seed(cfg.seed, k), trial_world_seed(cfg.seed, k), cfg.task.foraging).seasons;
    });
    csv::write_file(path_in(cfg, "season_stats.csv"), csv::emit(season_stats_table(per_trial, cfg.task.foraging.schedule)));
    double wall = 0.0;
    for (const auto& t : per_trial) {
      fit.push_back(foraging_fitness(std::span<const SeasonStats>(t)));
      for (const auto& s : t) wall += static_cast<double>(s.wall_hits);
    }
    body["wall_hits_per_trial"] = wall / static_cast<double>(n);
  } else {
    const auto per_trial = parallel_map(n, cfg.jobs, [&](std::size_t k) {
      return run_pp_trial(rule, trial_net_seed(cfg.seed, k), trial_world_seed(cfg.seed, k), cfg.task.prey_predator).seasons;
    });
    csv::write_file(path_in(cfg, "encounter_stats.csv"),
                    csv::emit(encounter_stats_table(per_trial, cfg.task.prey_predator.schedule, cfg.task.prey_predator.alpha)));
    for (const auto& t : per_trial) {
      EncounterStats tot;
      for (const auto& s : t) tot += s;
      fit.push_back(pp_score(tot, cfg.task.prey_predator.alpha));
    }
  }
  if (!log_path.empty()) {
    TrialLog log;
    if (cfg.task.kind == TaskKind::Foraging)
      run_foraging_trial(rule, trial_net_seed(cfg.seed, 0), trial_world_seed(cfg.seed, 0), cfg.task.foraging, &log);
    else
      run_pp_trial(rule, trial_net_seed(cfg.seed, 0), trial_world_seed(cfg.seed, 0), cfg.task.prey_predator, &log);
    csv::write_file(log_path, emit_trial_log(log));
  }
  if (snapshots) {
    if (cfg.task.kind != TaskKind::Foraging) throw ConfigError("--snapshots requires the foraging task");
    for (const auto& s : export_weight_snapshots(rule, trial_net_seed(cfg.seed, 0), trial_world_seed(cfg.seed, 0), cfg.task.foraging)) {
      csv::write_file(path_in(cfg, "weights_" + s.label + "_hidden.csv"), csv::emit(matrix_table(s.net.w_hidden)));
      csv::write_file(path_in(cfg, "weights_" + s.label + "_out.csv"), csv::emit(matrix_table(s.net.w_out)));
    }
  }
  body["fitness"] = summary_json(summarize(fit));
  write_summary(cfg, "run-rule", body);
}

void cmd_hillclimb(const ExperimentConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.hc_runs);
  const auto runs = parallel_map(n, cfg.jobs, [&](std::size_t r) {
    return run_hill_climbing(cfg.task, cfg.hc, derive_seed(cfg.seed, seed_tag::kRun, r));
  });
  for (std::size_t r = 0; r < n; ++r)
    csv::write_file(path_in(cfg, "hc_trace_run" + std::to_string(r) + ".csv"), csv::emit(hc_trace_table(runs[r].trace)));

  // Rows: seasons; columns: boundary re-evaluation, iteration 10, last iteration.
  csv::Table table;
  table.header = {"season_index", "season", "start_mean", "start_std", "iter10_mean", "iter10_std", "end_mean", "end_std"};
  json seasons = json::array();
  const auto& sched = cfg.task.schedule();
  const int per = cfg.hc.iterations_per_season;
  for (int s = 0; s < sched.num_seasons(); ++s) {
    std::vector<double> start, it10, end;
    for (const auto& r : runs) {
      start.push_back(r.season_start[static_cast<std::size_t>(s)].fitness);
      it10.push_back(r.trace[static_cast<std::size_t>(s * per + std::min(per, 10) - 1)].incumbent.fitness);
      end.push_back(r.trace[static_cast<std::size_t>((s + 1) * per - 1)].incumbent.fitness);
    }
    const auto a = summarize(start), b = summarize(it10), c = summarize(end);
    table.rows.push_back({std::to_string(s), std::string(to_string(sched.sequence[static_cast<std::size_t>(s)])),
                          csv::format_double(a.mean), csv::format_double(a.std), csv::format_double(b.mean),
                          csv::format_double(b.std), csv::format_double(c.mean), csv::format_double(c.std)});
    seasons.push_back({{"season", std::string(to_string(sched.sequence[static_cast<std::size_t>(s)]))},
                       {"start", summary_json(a)}, {"iter10", summary_json(b)}, {"end", summary_json(c)}});
  }
  csv::write_file(path_in(cfg, "hc_summary.csv"), csv::emit(table));
  write_summary(cfg, "hillclimb", {{"runs", n}, {"seasons", seasons}});
}

void cmd_perfect_agent(const ExperimentConfig& cfg) {
  if (cfg.task.kind != TaskKind::Foraging) throw ConfigError("perfect-agent requires the foraging task");
  const auto per_trial = parallel_map(static_cast<std::size_t>(cfg.trials), cfg.jobs, [&](std::size_t k) {
    return run_perfect_agent(cfg.task.foraging, derive_seed(cfg.seed, seed_tag::kTrial, k));
  });
  csv::write_file(path_in(cfg, "season_stats.csv"), csv::emit(season_stats_table(per_trial, cfg.task.foraging.schedule)));
  std::vector<double> fit;
  double wall = 0.0;
  for (const auto& t : per_trial) {
    fit.push_back(foraging_fitness(std::span<const SeasonStats>(t)));
    for (const auto& s : t) wall += static_cast<double>(s.wall_hits);
  }
  write_summary(cfg, "perfect-agent",
                {{"fitness", summary_json(summarize(fit))}, {"wall_hits_per_run", wall / static_cast<double>(fit.size())}});
}

void cmd_validate(const ExperimentConfig& cfg) {
  if (cfg.task.kind != TaskKind::Foraging) throw ConfigError("validate requires the foraging task");
  const PlasticityRule rule = chosen_rule(cfg);
  const auto traces = parallel_map(static_cast<std::size_t>(cfg.trials), cfg.jobs, [&](std::size_t k) {
    return run_validation_protocol(rule, trial_net_seed(cfg.seed, k), trial_world_seed(cfg.seed, k), cfg.task.foraging,
                                   cfg.validation_interval, cfg.validation_test_steps);
  });
  csv::Table t;
  t.header = {"trial", "step", "season_index", "season", "fitness", "correct", "incorrect", "wall_hits"};
  const auto& sched = cfg.task.foraging.schedule;
  std::vector<std::vector<double>> best(static_cast<std::size_t>(sched.num_seasons()));
  for (std::size_t k = 0; k < traces.size(); ++k) {
    for (const auto& p : traces[k].points)
      t.rows.push_back({std::to_string(k), std::to_string(p.step), std::to_string(p.season_index),
                        std::string(to_string(p.season)), csv::format_double(p.fitness()), std::to_string(p.stats.correct),
                        std::to_string(p.stats.incorrect), std::to_string(p.stats.wall_hits)});
    const auto b = traces[k].best_per_season();
    for (std::size_t s = 0; s < b.size(); ++s) best[s].push_back(b[s].fitness());
  }
  csv::write_file(path_in(cfg, "validation.csv"), csv::emit(t));
  json seasons = json::array();
  for (std::size_t s = 0; s < best.size(); ++s)
    seasons.push_back({{"season", std::string(to_string(sched.sequence[s]))}, {"best_validated", summary_json(summarize(best[s]))}});
  write_summary(cfg, "validate", {{"rule", format_rule(rule)}, {"seasons", seasons}});
}

void cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.task.kind != TaskKind::Foraging) throw ConfigError("sweep-hidden requires the foraging task");
  const PlasticityRule rule = chosen_rule(cfg);
  const auto rows = hidden_sweep(rule, cfg.sweep_sizes, cfg.trials, cfg.task.foraging, cfg.seed, cfg.jobs);
  csv::Table t;
  t.header = {"hidden", "mean", "std"};
  json body = json::array();
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.hidden), csv::format_double(r.mean), csv::format_double(r.std)});
    body.push_back({{"hidden", r.hidden}, {"mean", r.mean}, {"std", r.std}});
  }
  csv::write_file(path_in(cfg, "hidden_sweep.csv"), csv::emit(t));
  write_summary(cfg, "sweep-hidden", {{"rule", format_rule(rule)}, {"sizes", body}});
}

void cmd_analyze(const ExperimentConfig& cfg, const std::vector<std::string>& files) {
  std::vector<HarvestedRule> all;
  for (const auto& f : files) {
    const auto part = read_harvest_file(f);
    all.insert(all.end(), part.begin(), part.end());
  }
  const auto rows = aggregate_distinct_rules(all);
  csv::write_file(path_in(cfg, "distinct_rules.csv"), csv::emit(distinct_rules_table(rows)));
  json body = json::array();
  for (const auto& r : rows)
    body.push_back({{"id", r.id}, {"pattern", pattern_string(r.pattern)}, {"rules", r.count}, {"median", r.median}});
  write_summary(cfg, "analyze", {{"rules", all.size()}, {"distinct", body}});
}

std::vector<double> sample_from(const std::string& spec) {
  // Either "file.csv:column" or a comma-separated list of numbers.
  const auto colon = spec.rfind(':');
  if (colon != std::string::npos && fs::exists(spec.substr(0, colon))) {
    const auto t = csv::parse(csv::read_file(spec.substr(0, colon)));
    const auto c = t.column(spec.substr(colon + 1));
    std::vector<double> out;
    for (const auto& r : t.rows) out.push_back(csv::parse_double(r[c]));
    return out;
  }
  std::vector<double> out;
  for (auto s : csv::split(spec, ',')) out.push_back(csv::parse_double(csv::trim(s)));
  return out;
}

void cmd_wilcoxon(const ExperimentConfig& cfg, const std::string& a, const std::string& b) {
  const auto xa = sample_from(a), xb = sample_from(b);
  const auto r = wilcoxon_rank_sum(xa, xb);
  write_summary(cfg, "wilcoxon", {{"n", xa.size()}, {"m", xb.size()}, {"rank_sum", r.statistic}, {"z", r.z},
                                  {"p_value", r.p_value}, {"exact", r.exact}, {"reject_at_0.05", r.p_value < 0.05}});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Evolved synaptic plasticity workbench"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "master seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--jobs", g.jobs, "worker threads (0 = all cores)");
  app.add_option("--task", g.task, "foraging | prey-predator");

  auto* evolve = app.add_subcommand("evolve", "run GA runs and harvest their best rules");
  std::string log_path;
  bool snapshots = false;
  auto* run_rule = app.add_subcommand("run-rule", "evaluate one rule over many trials");
  run_rule->add_option("--log", log_path, "write the TrialLog of trial 0 to this CSV");
  run_rule->add_flag("--snapshots", snapshots, "write weight matrices at init and after each season (trial 0)");
  auto* hill = app.add_subcommand("hillclimb", "hill climbing over network weights");
  auto* pa = app.add_subcommand("perfect-agent", "hand-coded foraging policy");
  auto* validate = app.add_subcommand("validate", "frozen-copy validation during learning");
  auto* sweep = app.add_subcommand("sweep-hidden", "fitness versus hidden-layer size");
  std::vector<std::string> harvest_files;
  auto* analyze = app.add_subcommand("analyze", "group harvested rules into distinct patterns");
  analyze->add_option("harvest", harvest_files, "harvest files")->required()->check(CLI::ExistingFile);
  std::string sa, sb;
  auto* wil = app.add_subcommand("wilcoxon", "two-sided rank-sum test");
  wil->add_option("a", sa, "sample: 'x,y,...' or 'file.csv:column'")->required();
  wil->add_option("b", sb, "sample: 'x,y,...' or 'file.csv:column'")->required();
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);
  try {
    const ExperimentConfig cfg = resolve(g);
    if (*evolve) cmd_evolve(cfg);
    else if (*run_rule) cmd_run_rule(cfg, log_path, snapshots);
    else if (*hill) cmd_hillclimb(cfg);
    else if (*pa) cmd_perfect_agent(cfg);
    else if (*validate) cmd_validate(cfg);
    else if (*sweep) cmd_sweep(cfg);
    else if (*analyze) cmd_analyze(cfg, harvest_files);
    else if (*wil) cmd_wilcoxon(cfg, sa, sb);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
