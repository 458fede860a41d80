#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "esp/foraging.hpp"
#include "esp/prey_predator.hpp"

namespace esp {

enum class TaskKind : std::uint8_t { Foraging, PreyPredator };

inline std::string_view to_string(TaskKind k) noexcept {
  return k == TaskKind::Foraging ? "foraging" : "prey-predator";
}

inline TaskKind parse_task(std::string_view s) {
  if (s == "foraging") return TaskKind::Foraging;
  if (s == "prey-predator" || s == "prey_predator") return TaskKind::PreyPredator;
  throw ConfigError("unknown task '" + std::string(s) + "'");
}

/// Which environment an evaluation runs in, with that environment's settings.
struct TaskSpec {
  TaskKind kind = TaskKind::Foraging;
  ForagingConfig foraging{};
  PreyPredatorConfig prey_predator{};

  const SeasonSchedule& schedule() const noexcept {
    return kind == TaskKind::Foraging ? foraging.schedule : prey_predator.schedule;
  }

  void validate() const {
    if (kind == TaskKind::Foraging) foraging.validate();
    else prey_predator.validate();
  }
};

/// Seeds of trial `k` within an evaluation seeded by `eval_seed`.
inline std::uint64_t trial_net_seed(std::uint64_t eval_seed, std::uint64_t k) {
  return derive_seed(eval_seed, seed_tag::kTrial, k, seed_tag::kNetwork);
}
inline std::uint64_t trial_world_seed(std::uint64_t eval_seed, std::uint64_t k) {
  return derive_seed(eval_seed, seed_tag::kTrial, k, seed_tag::kWorld);
}

/// Fitness of a plasticity rule: `trials` independent lifetime-learning
/// trials, each with a fresh network and world, scored by the task's fitness.
inline double evaluate_rule(const PlasticityRule& rule, const TaskSpec& task, std::uint64_t eval_seed, int trials) {
  if (trials < 1) throw ConfigError("trials per evaluation must be >= 1");
  if (task.kind == TaskKind::Foraging) {
    std::vector<SeasonStats> all;
    for (int k = 0; k < trials; ++k) {
      const auto res = run_foraging_trial(rule, trial_net_seed(eval_seed, k), trial_world_seed(eval_seed, k),
                                          task.foraging);
      all.insert(all.end(), res.seasons.begin(), res.seasons.end());
    }
    return foraging_fitness(std::span<const SeasonStats>(all));
  }
  std::vector<EncounterStats> per_trial;
  for (int k = 0; k < trials; ++k)
    per_trial.push_back(
        run_pp_trial(rule, trial_net_seed(eval_seed, k), trial_world_seed(eval_seed, k), task.prey_predator).total());
  return pp_fitness(std::span<const EncounterStats>(per_trial), task.prey_predator.alpha);
}

}  // namespace esp
