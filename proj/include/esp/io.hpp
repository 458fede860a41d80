#pragma once

#include <string>
#include <vector>

#include "esp/baselines.hpp"
#include "esp/csv.hpp"
#include "esp/evolution.hpp"
#include "esp/rule_text.hpp"

namespace esp {

inline csv::Table history_table(const std::vector<GenerationRecord>& history) {
  csv::Table t;
  t.header = {"generation", "best", "mean", "std", "best_genotype"};
  for (const auto& g : history)
    t.rows.push_back({std::to_string(g.generation), csv::format_double(g.best), csv::format_double(g.mean),
                      csv::format_double(g.std), genotype_token(g.best_rule)});
  return t;
}

inline std::vector<GenerationRecord> parse_history(const csv::Table& t) {
  const auto gi = t.column("generation"), bi = t.column("best"), mi = t.column("mean"), si = t.column("std"),
             ri = t.column("best_genotype");
  std::vector<GenerationRecord> out;
  for (const auto& r : t.rows)
    out.push_back({csv::parse_int<int>(r[gi]), csv::parse_double(r[bi]), csv::parse_double(r[mi]),
                   csv::parse_double(r[si]), parse_genotype_token(r[ri])});
  return out;
}

inline csv::Table hc_trace_table(const std::vector<HCTracePoint>& trace) {
  csv::Table t;
  t.header = {"iteration", "season_index", "season", "fitness", "correct", "incorrect", "collected", "caught", "wall_hits"};
  for (const auto& p : trace)
    t.rows.push_back({std::to_string(p.iteration), std::to_string(p.season_index), std::string(to_string(p.season)),
                      csv::format_double(p.incumbent.fitness), std::to_string(p.incumbent.correct),
                      std::to_string(p.incumbent.incorrect), std::to_string(p.incumbent.collected),
                      std::to_string(p.incumbent.caught), std::to_string(p.incumbent.wall_hits)});
  return t;
}

/// One row per (trial, season) of foraging season statistics.
inline csv::Table season_stats_table(const std::vector<std::vector<SeasonStats>>& per_trial, const SeasonSchedule& schedule) {
  csv::Table t;
  t.header = {"trial", "season_index", "season", "fitness", "correct", "incorrect", "green", "blue", "wall_hits"};
  for (std::size_t k = 0; k < per_trial.size(); ++k)
    for (std::size_t s = 0; s < per_trial[k].size(); ++s) {
      const auto& st = per_trial[k][s];
      t.rows.push_back({std::to_string(k), std::to_string(s), std::string(to_string(schedule.sequence.at(s))),
                        std::to_string(st.fitness()), std::to_string(st.correct), std::to_string(st.incorrect),
                        std::to_string(st.green_collected), std::to_string(st.blue_collected),
                        std::to_string(st.wall_hits)});
    }
  return t;
}

inline std::vector<std::vector<SeasonStats>> parse_season_stats(const csv::Table& t) {
  const auto ti = t.column("trial"), si = t.column("season_index"), ci = t.column("correct"),
             ii = t.column("incorrect"), gi = t.column("green"), bi = t.column("blue"), wi = t.column("wall_hits");
  std::vector<std::vector<SeasonStats>> out;
  for (const auto& r : t.rows) {
    const auto k = csv::parse_int<std::size_t>(r[ti]);
    const auto s = csv::parse_int<std::size_t>(r[si]);
    if (out.size() <= k) out.resize(k + 1);
    if (out[k].size() <= s) out[k].resize(s + 1);
    out[k][s] = {csv::parse_int<long>(r[ci]), csv::parse_int<long>(r[ii]), csv::parse_int<long>(r[wi]),
                 csv::parse_int<long>(r[gi]), csv::parse_int<long>(r[bi])};
  }
  return out;
}

/// One row per (trial, season) of prey-predator encounter statistics.
inline csv::Table encounter_stats_table(const std::vector<std::vector<EncounterStats>>& per_trial,
                                        const SeasonSchedule& schedule, double alpha) {
  csv::Table t;
  t.header = {"trial", "season_index", "season", "score", "collected", "caught", "wall_hits"};
  for (std::size_t k = 0; k < per_trial.size(); ++k)
    for (std::size_t s = 0; s < per_trial[k].size(); ++s) {
      const auto& st = per_trial[k][s];
      t.rows.push_back({std::to_string(k), std::to_string(s), std::string(to_string(schedule.sequence.at(s))),
                        csv::format_double(pp_score(st, alpha)), std::to_string(st.collected),
                        std::to_string(st.caught), std::to_string(st.wall_hits)});
    }
  return t;
}

}  // namespace esp
