#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "esp/foraging.hpp"
#include "esp/network.hpp"
#include "esp/prey_predator.hpp"
#include "esp/rng.hpp"
#include "esp/task.hpp"

namespace esp {

// ---------------------------------------------------------------- hill climbing

struct HCConfig {
  double perturb_sigma = 0.1;
  int iterations_per_season = 1000;
  // Action steps per fitness evaluation; 0 means one full season of the task.
  long steps_per_eval = 0;
  double explore_prob = 0.0;
  // false: every evaluation within a season reuses that season's world.
  bool fresh_world_per_eval = true;

  void validate() const {
    if (!(perturb_sigma >= 0.0)) throw ConfigError("perturb_sigma must be >= 0");
    if (iterations_per_season < 1) throw ConfigError("iterations_per_season must be >= 1");
    if (steps_per_eval < 0) throw ConfigError("steps_per_eval must be >= 0");
    if (!(explore_prob >= 0.0 && explore_prob <= 1.0)) throw ConfigError("explore_prob must be in [0,1]");
  }
};

/// Outcome of one frozen-weight evaluation.
struct HCStats {
  double fitness = 0.0;
  long correct = 0;
  long incorrect = 0;
  long collected = 0;
  long caught = 0;
  long wall_hits = 0;
};

struct HCTracePoint {
  int iteration = 0;  // 1-based, global across seasons
  int season_index = 0;
  Season season = Season::Summer;
  HCStats incumbent;
};

struct HCResult {
  Network best_net;
  std::vector<HCTracePoint> trace;      // seasons x iterations_per_season
  std::vector<HCStats> season_start;    // incumbent re-evaluated as each season begins
};

struct HCState {
  Network best_net;
  HCStats best;
  int iteration = 0;
  int season_index = 0;
};

inline HCStats evaluate_frozen(const Network& net, const TaskSpec& task, Season season, long steps,
                               std::uint64_t world_seed, double explore_prob) {
  HCStats out;
  if (task.kind == TaskKind::Foraging) {
    const auto s = evaluate_frozen_foraging(net, season, steps, world_seed, task.foraging, explore_prob);
    out.correct = s.correct;
    out.incorrect = s.incorrect;
    out.collected = s.green_collected + s.blue_collected;
    out.wall_hits = s.wall_hits;
    out.fitness = static_cast<double>(s.correct - s.incorrect);
  } else {
    const auto s = evaluate_frozen_pp(net, season, steps, world_seed, task.prey_predator, explore_prob);
    out.collected = s.collected;
    out.caught = s.caught;
    out.wall_hits = s.wall_hits;
    out.fitness = pp_score(s, task.prey_predator.alpha);
  }
  return out;
}

inline Network perturb(const Network& net, double sigma, Rng& rng) {
  Network c = net;
  for (auto* m : {&c.w_hidden, &c.w_out})
    for (auto& w : m->data) w += gaussian(rng, 0.0, sigma);
  return c;
}

/// Greedy weight-space search. Each iteration perturbs every weight of the
/// incumbent and keeps the candidate only if it scores strictly better under
/// the season active at that iteration.
inline HCResult run_hill_climbing(const TaskSpec& task, const HCConfig& cfg, std::uint64_t seed) {
  task.validate();
  cfg.validate();
  const auto& schedule = task.schedule();
  const long steps = cfg.steps_per_eval > 0 ? cfg.steps_per_eval : schedule.season_length;
  const bool foraging = task.kind == TaskKind::Foraging;
  const std::size_t n_in = foraging ? ForagingConfig::kInputs : PreyPredatorConfig::kInputs;
  const std::size_t n_hidden = foraging ? task.foraging.n_hidden : task.prey_predator.n_hidden;

  Rng perturb_rng(derive_seed(seed, seed_tag::kPerturb));
  std::uint64_t evals = 0;
  auto eval = [&](const Network& net, Season season, int season_index) {
    const std::uint64_t key = cfg.fresh_world_per_eval ? evals++ : static_cast<std::uint64_t>(season_index);
    return evaluate_frozen(net, task, season, steps, derive_seed(seed, seed_tag::kEvaluation, key), cfg.explore_prob);
  };

  HCState st;
  st.best_net = init_network(n_in, n_hidden, 3, derive_seed(seed, seed_tag::kNetwork));
  HCResult res;
  res.trace.reserve(static_cast<std::size_t>(schedule.num_seasons() * cfg.iterations_per_season));
  for (st.season_index = 0; st.season_index < schedule.num_seasons(); ++st.season_index) {
    const Season season = schedule.sequence[static_cast<std::size_t>(st.season_index)];
    st.best = eval(st.best_net, season, st.season_index);
    res.season_start.push_back(st.best);
    for (int it = 0; it < cfg.iterations_per_season; ++it) {
      Network cand = perturb(st.best_net, cfg.perturb_sigma, perturb_rng);
      const HCStats s = eval(cand, season, st.season_index);
      if (s.fitness > st.best.fitness) {
        st.best_net = std::move(cand);
        st.best = s;
      }
      res.trace.push_back({++st.iteration, st.season_index, season, st.best});
    }
  }
  res.best_net = std::move(st.best_net);
  return res;
}

// ---------------------------------------------------------------- perfect agent

namespace detail {
inline Action first_safe(const SensorState& s, CellKind avoid, std::initializer_list<Action> prefs) {
  for (Action a : prefs)
    if (s.toward(a) != CellKind::Wall && s.toward(a) != avoid) return a;
  for (Action a : prefs)
    if (s.toward(a) != CellKind::Wall) return a;
  return *prefs.begin();
}
}  // namespace detail

/// Hand-coded foraging policy: take the season's correct item when visible
/// (front, then left, then right), steer away from walls, sidestep the wrong
/// item, otherwise go straight. Never chooses to move into a wall when an
/// alternative exists.
inline Action perfect_agent_action(const SensorState& s, Season season) {
  const CellKind good = season == Season::Summer ? CellKind::Green : CellKind::Blue;
  const CellKind bad = season == Season::Summer ? CellKind::Blue : CellKind::Green;
  using enum Action;
  if (s.front() == good) return Straight;
  if (s.left() == good) return Left;
  if (s.right() == good) return Right;
  if (s.front() == CellKind::Wall) return detail::first_safe(s, bad, {Left, Right});
  if (s.left() == CellKind::Wall) return detail::first_safe(s, bad, {Right, Straight});
  if (s.right() == CellKind::Wall) return detail::first_safe(s, bad, {Left, Straight});
  return detail::first_safe(s, bad, {Straight, Left, Right});
}

/// One run of the perfect agent over the full schedule; per-season stats.
inline std::vector<SeasonStats> run_perfect_agent(const ForagingConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng world_rng(derive_seed(seed, seed_tag::kWorld));
  Rng explore_rng(derive_seed(seed, seed_tag::kExplore));
  ForagingWorld world(cfg, world_rng);
  std::vector<SeasonStats> out(static_cast<std::size_t>(cfg.schedule.num_seasons()));
  for (long step = 0; step < cfg.schedule.total_steps(); ++step) {
    const int idx = cfg.schedule.season_index(step);
    const Season season = cfg.schedule.sequence[static_cast<std::size_t>(idx)];
    Action a = perfect_agent_action(world.sense(), season);
    if (bernoulli(explore_rng, cfg.explore_prob)) a = static_cast<Action>(uniform_int(explore_rng, 0, 2));
    record_events(out[static_cast<std::size_t>(idx)], world.act(a, world_rng), season);
  }
  return out;
}

}  // namespace esp
