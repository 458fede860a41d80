#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "esp/grid.hpp"
#include "esp/network.hpp"
#include "esp/plasticity.hpp"
#include "esp/rng.hpp"
#include "esp/trial_log.hpp"

namespace esp {

struct ForagingConfig {
  int width = 100;
  int height = 100;
  int n_green = 50;
  int n_blue = 50;
  std::size_t n_hidden = 20;
  double explore_prob = 0.02;
  SeasonSchedule schedule{};

  static constexpr std::size_t kInputs = 6;
  static constexpr std::size_t kOutputs = 3;

  void validate() const {
    if (width < 1 || height < 1) throw ConfigError("foraging grid must be at least 1x1");
    if (n_green < 0 || n_blue < 0) throw ConfigError("item counts must be non-negative");
    if (static_cast<long>(n_green) + n_blue + 1 > static_cast<long>(width) * height)
      throw ConfigError("foraging grid too small for the requested items");
    if (n_hidden < 1) throw ConfigError("hidden layer must have >= 1 neuron");
    if (!(explore_prob >= 0.0 && explore_prob <= 1.0)) throw ConfigError("explore_prob must be in [0,1]");
    schedule.validate();
  }
};

/// Cell contents to the agent's left, front and right.
struct SensorState {
  std::array<CellKind, 3> cells{CellKind::Empty, CellKind::Empty, CellKind::Empty};  // left, front, right

  CellKind left() const noexcept { return cells[0]; }
  CellKind front() const noexcept { return cells[1]; }
  CellKind right() const noexcept { return cells[2]; }

  std::array<std::uint8_t, 6> bits() const noexcept {
    std::array<std::uint8_t, 6> out{};
    for (std::size_t i = 0; i < 3; ++i) {
      const auto code = cell_code(cells[i]);
      out[2 * i] = code[0];
      out[2 * i + 1] = code[1];
    }
    return out;
  }

  bool nothing() const noexcept {
    return cells[0] == CellKind::Empty && cells[1] == CellKind::Empty && cells[2] == CellKind::Empty;
  }

  /// Cell the agent would enter (or bump into) with action `a`.
  CellKind toward(Action a) const noexcept { return cells[static_cast<std::size_t>(a)]; }

  bool operator==(const SensorState&) const = default;
};

struct SeasonStats {
  long correct = 0;
  long incorrect = 0;
  long wall_hits = 0;
  long green_collected = 0;
  long blue_collected = 0;

  long fitness() const noexcept { return correct - incorrect; }
  bool operator==(const SeasonStats&) const = default;
};

inline void record_events(SeasonStats& s, std::uint8_t events, Season season) {
  if (events & kEventWallHit) ++s.wall_hits;
  if (events & kEventCollectedGreen) {
    ++s.green_collected;
    ++(season == Season::Summer ? s.correct : s.incorrect);
  }
  if (events & kEventCollectedBlue) {
    ++s.blue_collected;
    ++(season == Season::Winter ? s.correct : s.incorrect);
  }
}

/// Walled grid with a fixed number of green and blue items and one agent.
/// Collected items respawn immediately at a random free cell, so item counts
/// are conserved.
class ForagingWorld {
 public:
  ForagingWorld(const ForagingConfig& cfg, Rng& rng) : grid_(cfg.width, cfg.height) {
    cfg.validate();
    agent_.pos = grid_.random_interior(rng);
    agent_.heading = static_cast<Heading>(uniform_int(rng, 0, 3));
    for (int i = 0; i < cfg.n_green; ++i) place_item(CellKind::Green, rng);
    for (int i = 0; i < cfg.n_blue; ++i) place_item(CellKind::Blue, rng);
    n_green_ = cfg.n_green;
    n_blue_ = cfg.n_blue;
  }

  /// Explicit layout, mainly for tests. Items must lie on distinct interior
  /// cells other than the agent's.
  ForagingWorld(int width, int height, Pose agent, const std::vector<std::pair<Cell, CellKind>>& items)
      : grid_(width, height), agent_(agent) {
    if (!grid_.interior(agent.pos)) throw ContractViolation("agent must start inside the grid");
    for (const auto& [c, k] : items) {
      if (k != CellKind::Green && k != CellKind::Blue) throw ContractViolation("items must be green or blue");
      if (!grid_.interior(c) || c == agent.pos || grid_.at(c) != CellKind::Empty)
        throw ContractViolation("invalid item cell");
      grid_.set(c, k);
      ++(k == CellKind::Green ? n_green_ : n_blue_);
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  const Pose& agent() const noexcept { return agent_; }
  int green_count() const noexcept { return n_green_; }
  int blue_count() const noexcept { return n_blue_; }

  SensorState sense() const {
    const Heading h = agent_.heading;
    SensorState s;
    s.cells[0] = grid_.at(agent_.pos + step_of(turn_left(h)));
    s.cells[1] = grid_.at(agent_.pos + step_of(h));
    s.cells[2] = grid_.at(agent_.pos + step_of(turn_right(h)));
    return s;
  }

  /// Applies the action; `rng` drives item respawn.
  std::uint8_t act(Action a, Rng& rng) {
    if (move_agent(grid_, agent_, a)) return kEventWallHit;
    const CellKind k = grid_.at(agent_.pos);
    if (k != CellKind::Green && k != CellKind::Blue) return kEventNone;
    grid_.set(agent_.pos, CellKind::Empty);
    place_item(k, rng);
    return k == CellKind::Green ? kEventCollectedGreen : kEventCollectedBlue;
  }

 private:
  void place_item(CellKind k, Rng& rng) {
    for (;;) {
      const Cell c = grid_.random_interior(rng);
      if (c == agent_.pos || grid_.at(c) != CellKind::Empty) continue;
      grid_.set(c, k);
      return;
    }
  }

  Grid grid_;
  Pose agent_;
  int n_green_ = 0;
  int n_blue_ = 0;
};

inline SensorState sense(const ForagingWorld& world) { return world.sense(); }

// Reinforcement associations, grouped by priority: item associations first,
// then wall, then exploration; ascending ID within each group. The first
// association whose sensor condition and behavior match decides the signal.
namespace detail {
enum class Where : std::uint8_t { Nothing, Left, Front, Right };

struct Association {
  int id;
  Where where;
  CellKind kind;
  std::uint8_t action_mask;  // bit per Action
  std::int8_t summer;
  std::int8_t winter;
};

inline constexpr std::uint8_t kL = 1 << 0;
inline constexpr std::uint8_t kS = 1 << 1;
inline constexpr std::uint8_t kR = 1 << 2;

inline constexpr std::array<Association, 20> kForagingAssociations{{
    {9, Where::Front, CellKind::Green, kS, 1, -1},
    {10, Where::Front, CellKind::Green, kL | kR, -1, 0},
    {11, Where::Left, CellKind::Green, kL, 1, -1},
    {12, Where::Left, CellKind::Green, kS | kR, -1, 0},
    {13, Where::Right, CellKind::Green, kR, 1, -1},
    {14, Where::Right, CellKind::Green, kS | kL, -1, 0},
    {15, Where::Front, CellKind::Blue, kS, -1, 1},
    {16, Where::Front, CellKind::Blue, kL | kR, 0, -1},
    {17, Where::Left, CellKind::Blue, kL, -1, 1},
    {18, Where::Left, CellKind::Blue, kS | kR, 0, -1},
    {19, Where::Right, CellKind::Blue, kR, -1, 1},
    {20, Where::Right, CellKind::Blue, kS | kL, 0, -1},
    {3, Where::Front, CellKind::Wall, kL | kR, 1, 1},
    {4, Where::Front, CellKind::Wall, kS, -1, -1},
    {5, Where::Left, CellKind::Wall, kR, 1, 1},
    {6, Where::Left, CellKind::Wall, kL | kS, -1, -1},
    {7, Where::Right, CellKind::Wall, kL, 1, 1},
    {8, Where::Right, CellKind::Wall, kR | kS, -1, -1},
    {1, Where::Nothing, CellKind::Empty, kS, 1, 1},
    {2, Where::Nothing, CellKind::Empty, kL | kR, -1, -1},
}};

inline bool condition_holds(const Association& a, const SensorState& s) {
  switch (a.where) {
    case Where::Nothing: return s.nothing();
    case Where::Left: return s.left() == a.kind;
    case Where::Front: return s.front() == a.kind;
    default: return s.right() == a.kind;
  }
}
}  // namespace detail

/// Table ID of the association that fires for (sensor, action), or 0 if none.
inline int foraging_association_id(const SensorState& sensor, Action action) {
  const auto bit = static_cast<std::uint8_t>(1u << static_cast<unsigned>(action));
  for (const auto& a : detail::kForagingAssociations)
    if ((a.action_mask & bit) && detail::condition_holds(a, sensor)) return a.id;
  return 0;
}

inline Modulation reinforce_foraging(const SensorState& sensor, Action action, Season season) {
  const auto bit = static_cast<std::uint8_t>(1u << static_cast<unsigned>(action));
  for (const auto& a : detail::kForagingAssociations)
    if ((a.action_mask & bit) && detail::condition_holds(a, sensor))
      return static_cast<Modulation>(season == Season::Summer ? a.summer : a.winter);
  return Modulation::Neutral;
}

struct ForagingTrialResult {
  std::vector<SeasonStats> seasons;
  Network initial_net;
  Network final_net;
  std::size_t degenerate_normalizations = 0;
};

/// Hooks into a learning trial. `on_step` fires after every step (after any
/// plasticity update) with the 0-based step index; `on_season_end` fires
/// after the last step of each season.
struct NullTrialObserver {
  void on_step(long, int, const Network&) {}
  void on_season_end(int, const Network&) {}
};

/// One lifetime-learning foraging trial: a fresh random network adapts through
/// `rule` across all seasons of `cfg.schedule`.
template <class Observer = NullTrialObserver>
ForagingTrialResult run_foraging_trial(const PlasticityRule& rule, std::uint64_t net_seed, std::uint64_t world_seed,
                                       const ForagingConfig& cfg, TrialLog* log = nullptr,
                                       Observer&& observer = Observer{}) {
  cfg.validate();
  Rng net_rng(net_seed);
  Rng world_rng(world_seed);
  Rng explore_rng(derive_seed(world_seed, seed_tag::kExplore));

  ForagingTrialResult result;
  Network net = init_network(ForagingConfig::kInputs, cfg.n_hidden, ForagingConfig::kOutputs, net_rng);
  result.initial_net = net;
  ForagingWorld world(cfg, world_rng);
  result.seasons.assign(static_cast<std::size_t>(cfg.schedule.num_seasons()), SeasonStats{});

  const long total = cfg.schedule.total_steps();
  if (log) log->reserve(log->size() + static_cast<std::size_t>(total));
  ActivationRecord acts;
  for (long step = 0; step < total; ++step) {
    const int season_idx = cfg.schedule.season_index(step);
    const Season season = cfg.schedule.sequence[static_cast<std::size_t>(season_idx)];

    const SensorState sensor = world.sense();
    const auto input = sensor.bits();
    forward_into(net, input, acts);
    auto action = static_cast<Action>(acts.action);
    bool explored = false;
    if (bernoulli(explore_rng, cfg.explore_prob)) {
      explored = true;
      action = static_cast<Action>(uniform_int(explore_rng, 0, 2));
    }
    const std::uint8_t events = world.act(action, world_rng);
    const Modulation m = reinforce_foraging(sensor, action, season);
    if (!explored) result.degenerate_normalizations += apply_update_in_place(net, acts, m, rule);

    record_events(result.seasons[static_cast<std::size_t>(season_idx)], events, season);
    if (log) log->push_back({step, season, bit_string(input), action, explored, to_int(m), events});
    observer.on_step(step, season_idx, net);
    if ((step + 1) % cfg.schedule.season_length == 0) observer.on_season_end(season_idx, net);
  }
  result.final_net = std::move(net);
  return result;
}

/// Runs a network with frozen weights for `steps` steps of one season on a
/// fresh world.
inline SeasonStats evaluate_frozen_foraging(const Network& net, Season season, long steps, std::uint64_t world_seed,
                                            const ForagingConfig& cfg, double explore_prob) {
  Rng world_rng(world_seed);
  Rng explore_rng(derive_seed(world_seed, seed_tag::kExplore));
  ForagingWorld world(cfg, world_rng);
  SeasonStats stats;
  ActivationRecord acts;
  for (long step = 0; step < steps; ++step) {
    const auto input = world.sense().bits();
    forward_into(net, input, acts);
    auto action = static_cast<Action>(acts.action);
    if (bernoulli(explore_rng, explore_prob)) action = static_cast<Action>(uniform_int(explore_rng, 0, 2));
    record_events(stats, world.act(action, world_rng), season);
  }
  return stats;
}

/// Mean of (correct - incorrect) over every season record of every trial.
inline double foraging_fitness(std::span<const SeasonStats> stats) {
  if (stats.empty()) throw ContractViolation("foraging_fitness: no season records");
  double sum = 0.0;
  for (const auto& s : stats) sum += static_cast<double>(s.correct - s.incorrect);
  return sum / static_cast<double>(stats.size());
}

inline double foraging_fitness(const std::vector<std::vector<SeasonStats>>& per_trial) {
  std::vector<SeasonStats> flat;
  for (const auto& t : per_trial) flat.insert(flat.end(), t.begin(), t.end());
  return foraging_fitness(std::span<const SeasonStats>(flat));
}

}  // namespace esp
