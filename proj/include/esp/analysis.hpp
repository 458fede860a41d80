#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "esp/foraging.hpp"
#include "esp/parallel.hpp"
#include "esp/rule_text.hpp"
#include "esp/stats.hpp"

namespace esp {

// ---------------------------------------------------------------- distinct rules

/// Rules sharing a discrete pattern, whatever their learning rates.
struct DistinctRuleRow {
  int id = 0;  // 1-based rank by median fitness
  PlasticityRule pattern;  // eta holds the group's mean learning rate
  std::size_t count = 0;
  double median = 0.0;
  double std = 0.0;
  double max = 0.0;
  double min = 0.0;
  double eta_mean = 0.0;
  double eta_std = 0.0;
};

inline std::vector<DistinctRuleRow> aggregate_distinct_rules(std::span<const HarvestedRule> rules) {
  if (rules.empty()) throw ContractViolation("aggregate_distinct_rules: no rules");
  std::map<std::size_t, std::vector<const HarvestedRule*>> groups;
  for (const auto& h : rules) groups[h.rule.pattern_code()].push_back(&h);

  std::vector<DistinctRuleRow> rows;
  for (const auto& [code, members] : groups) {
    std::vector<double> fit, eta;
    for (const auto* h : members) {
      fit.push_back(h->fitness);
      eta.push_back(h->rule.eta);
    }
    const auto f = summarize(fit);
    DistinctRuleRow row;
    row.count = members.size();
    row.median = f.median;
    row.std = f.std;
    row.max = f.max;
    row.min = f.min;
    row.eta_mean = mean(eta);
    row.eta_std = stddev(eta);
    row.pattern = PlasticityRule::from_pattern_code(code, std::clamp(row.eta_mean, 0.0, 1.0 - 1e-12));
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.median > b.median; });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].id = static_cast<int>(i + 1);
  return rows;
}

inline csv::Table distinct_rules_table(const std::vector<DistinctRuleRow>& rows) {
  csv::Table t;
  t.header = {"id", "rules", "median", "std", "max", "min", "eta_mean", "eta_std",
              "m-1_00", "m-1_01", "m-1_10", "m-1_11", "m+1_00", "m+1_01", "m+1_10", "m+1_11"};
  for (const auto& r : rows) {
    std::vector<std::string> cells{std::to_string(r.id), std::to_string(r.count), csv::format_double(r.median),
                                   csv::format_double(r.std), csv::format_double(r.max), csv::format_double(r.min),
                                   csv::format_double(r.eta_mean), csv::format_double(r.eta_std)};
    for (auto o : r.pattern.outcomes) cells.push_back(std::to_string(static_cast<int>(o)));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

// ---------------------------------------------------------------- validation

struct ValidationPoint {
  long step = 0;  // learning steps completed when the clone was taken
  int season_index = 0;
  Season season = Season::Summer;
  SeasonStats stats;
  double fitness() const noexcept { return static_cast<double>(stats.fitness()); }
};

struct ValidationTrace {
  std::vector<ValidationPoint> points;
  ForagingTrialResult learning;
  /// Highest-fitness validation point of each season (first one on ties).
  std::vector<ValidationPoint> best_per_season() const {
    std::vector<ValidationPoint> best;
    for (const auto& p : points) {
      if (best.size() <= static_cast<std::size_t>(p.season_index)) best.resize(static_cast<std::size_t>(p.season_index) + 1);
      auto& b = best[static_cast<std::size_t>(p.season_index)];
      if (b.step == 0 || p.fitness() > b.fitness()) b = p;
    }
    return best;
  }
};

/// Runs a learning trial and, every `interval` steps, tests a frozen copy of
/// the network for `test_steps` steps (0 = one season) in the current season
/// on a fresh world with no exploration noise. The learning trial itself is
/// unaffected.
inline ValidationTrace run_validation_protocol(const PlasticityRule& rule, std::uint64_t net_seed, std::uint64_t world_seed,
                                               const ForagingConfig& cfg, long interval = 20, long test_steps = 0,
                                               TrialLog* log = nullptr) {
  if (interval < 1) throw ConfigError("validation interval must be >= 1");
  const long steps = test_steps > 0 ? test_steps : cfg.schedule.season_length;
  ValidationTrace trace;
  struct Observer {
    ValidationTrace& trace;
    const ForagingConfig& cfg;
    long interval, steps;
    std::uint64_t seed;
    void on_step(long step, int season_idx, const Network& net) {
      if ((step + 1) % interval != 0) return;
      const Season season = cfg.schedule.sequence[static_cast<std::size_t>(season_idx)];
      const auto s = evaluate_frozen_foraging(net, season, steps,
                                              derive_seed(seed, seed_tag::kValidation, static_cast<std::uint64_t>(step)),
                                              cfg, 0.0);
      trace.points.push_back({step + 1, season_idx, season, s});
    }
    void on_season_end(int, const Network&) {}
  };
  trace.learning = run_foraging_trial(rule, net_seed, world_seed, cfg, log, Observer{trace, cfg, interval, steps, world_seed});
  return trace;
}

// ---------------------------------------------------------------- hidden sweep

struct SweepRow {
  std::size_t hidden = 0;
  double mean = 0.0;
  double std = 0.0;
  std::vector<double> trial_fitness;
};

/// Per-trial fitness of `rule` for each hidden-layer size. Trial k uses the
/// same seeds at every size.
inline std::vector<SweepRow> hidden_sweep(const PlasticityRule& rule, const std::vector<std::size_t>& sizes, int trials,
                                          const ForagingConfig& base, std::uint64_t seed, unsigned jobs = 1) {
  if (trials < 1) throw ConfigError("hidden sweep needs >= 1 trial");
  std::vector<SweepRow> rows;
  for (std::size_t h : sizes) {
    ForagingConfig cfg = base;
    cfg.n_hidden = h;
    cfg.validate();
    SweepRow row;
    row.hidden = h;
    row.trial_fitness = parallel_map(static_cast<std::size_t>(trials), jobs, [&](std::size_t k) {
      const auto res = run_foraging_trial(rule, derive_seed(seed, seed_tag::kTrial, k, seed_tag::kNetwork),
                                          derive_seed(seed, seed_tag::kTrial, k, seed_tag::kWorld), cfg);
      return foraging_fitness(std::span<const SeasonStats>(res.seasons));
    });
    row.mean = mean(row.trial_fitness);
    row.std = stddev(row.trial_fitness);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------- weight snapshots

struct WeightSnapshot {
  std::string label;  // "init", "season1", ...
  Network net;
};

inline std::vector<WeightSnapshot> export_weight_snapshots(const PlasticityRule& rule, std::uint64_t net_seed,
                                                           std::uint64_t world_seed, const ForagingConfig& cfg) {
  std::vector<WeightSnapshot> snaps;
  struct Observer {
    std::vector<WeightSnapshot>& snaps;
    void on_step(long, int, const Network&) {}
    void on_season_end(int idx, const Network& net) { snaps.push_back({"season" + std::to_string(idx + 1), net}); }
  };
  const auto res = run_foraging_trial(rule, net_seed, world_seed, cfg, nullptr, Observer{snaps});
  snaps.insert(snaps.begin(), WeightSnapshot{"init", res.initial_net});
  return snaps;
}

inline csv::Table matrix_table(const Matrix& m) {
  csv::Table t;
  for (std::size_t c = 0; c < m.cols; ++c) t.header.push_back(c + 1 == m.cols ? "bias" : "in" + std::to_string(c));
  for (std::size_t r = 0; r < m.rows; ++r) {
    std::vector<std::string> cells;
    for (std::size_t c = 0; c < m.cols; ++c) cells.push_back(csv::format_double(m(r, c)));
    t.rows.push_back(std::move(cells));
  }
  return t;
}

inline Matrix matrix_from_table(const csv::Table& t) {
  Matrix m;
  m.rows = t.rows.size();
  m.cols = t.header.size();
  for (const auto& row : t.rows)
    for (const auto& cell : row) m.data.push_back(csv::parse_double(cell));
  return m;
}

}  // namespace esp
