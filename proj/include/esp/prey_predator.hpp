#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "esp/grid.hpp"
#include "esp/network.hpp"
#include "esp/plasticity.hpp"
#include "esp/rng.hpp"
#include "esp/trial_log.hpp"

namespace esp {

struct PreyPredatorConfig {
  int width = 100;
  int height = 100;
  int n_green = 10;
  int n_blue = 10;
  std::size_t n_hidden = 50;
  double explore_prob = 0.02;
  double proximity_threshold = 5.0;  // Euclidean, in cells
  double bias_prob = 0.9;
  double alpha = 3.0;
  SeasonSchedule schedule{4000, {Season::Summer, Season::Winter}};

  static constexpr int kVisionWidth = 9;
  static constexpr int kVisionDepth = 5;
  static constexpr std::size_t kVisionCells = kVisionWidth * kVisionDepth - 1;  // 44
  static constexpr std::size_t kInputs = 2 * kVisionCells;                       // 88
  static constexpr std::size_t kOutputs = 3;

  void validate() const {
    if (width < 1 || height < 1) throw ConfigError("prey-predator grid must be at least 1x1");
    if (n_green < 0 || n_blue < 0) throw ConfigError("mobile counts must be non-negative");
    if (static_cast<long>(n_green) + n_blue + 2 > static_cast<long>(width) * height)
      throw ConfigError("prey-predator grid too small for the requested mobiles");
    if (n_hidden < 1) throw ConfigError("hidden layer must have >= 1 neuron");
    if (!(explore_prob >= 0.0 && explore_prob <= 1.0)) throw ConfigError("explore_prob must be in [0,1]");
    if (!(bias_prob >= 0.0 && bias_prob <= 1.0)) throw ConfigError("bias_prob must be in [0,1]");
    if (!(proximity_threshold >= 0.0)) throw ConfigError("proximity_threshold must be >= 0");
    schedule.validate();
  }
};

/// Green mobiles are preys in summer and predators in winter; blue the reverse.
constexpr bool is_prey(CellKind color, Season season) noexcept {
  return (color == CellKind::Green) == (season == Season::Summer);
}

struct Mobile {
  Cell pos;
  CellKind color = CellKind::Green;
  bool operator==(const Mobile&) const = default;
};

/// Nearest non-empty visible cell.
struct ClosestObject {
  bool found = false;
  Cell pos;
  CellKind kind = CellKind::Empty;
  double dist2 = 0.0;
};

/// Codes of the 44 cells of the 9-wide x 5-deep rectangle ahead of the agent.
/// Order: rows from far (4 ahead) to near (the agent's own row), each row from
/// left to right, the agent's own cell skipped.
struct VisionField {
  std::array<CellKind, PreyPredatorConfig::kVisionCells> cells{};
  std::array<Cell, PreyPredatorConfig::kVisionCells> positions{};

  std::array<std::uint8_t, PreyPredatorConfig::kInputs> bits() const noexcept {
    std::array<std::uint8_t, PreyPredatorConfig::kInputs> out{};
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto code = cell_code(cells[i]);
      out[2 * i] = code[0];
      out[2 * i + 1] = code[1];
    }
    return out;
  }

  /// Smallest Euclidean distance from `agent`; ties prefer mobiles over walls,
  /// then earlier slots.
  ClosestObject closest(Cell agent) const noexcept {
    ClosestObject best;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (cells[i] == CellKind::Empty) continue;
      const double d2 = squared_distance(agent, positions[i]);
      const bool better = !best.found || d2 < best.dist2 ||
                          (d2 == best.dist2 && best.kind == CellKind::Wall && cells[i] != CellKind::Wall);
      if (better) best = {true, positions[i], cells[i], d2};
    }
    return best;
  }
};

/// Absolute cells of the vision rectangle for a pose, in VisionField order.
inline std::array<Cell, PreyPredatorConfig::kVisionCells> vision_cells(const Pose& pose) {
  std::array<Cell, PreyPredatorConfig::kVisionCells> out{};
  const Cell fwd = step_of(pose.heading);
  const Cell right = step_of(turn_right(pose.heading));
  std::size_t k = 0;
  for (int depth = PreyPredatorConfig::kVisionDepth - 1; depth >= 0; --depth)
    for (int lateral = -(PreyPredatorConfig::kVisionWidth / 2); lateral <= PreyPredatorConfig::kVisionWidth / 2;
         ++lateral) {
      if (depth == 0 && lateral == 0) continue;
      out[k++] = pose.pos + depth * fwd + lateral * right;
    }
  return out;
}

struct EncounterStats {
  long collected = 0;
  long caught = 0;
  long wall_hits = 0;

  EncounterStats& operator+=(const EncounterStats& o) noexcept {
    collected += o.collected;
    caught += o.caught;
    wall_hits += o.wall_hits;
    return *this;
  }
  bool operator==(const EncounterStats&) const = default;
};

inline void record_events(EncounterStats& s, std::uint8_t events) {
  if (events & kEventWallHit) ++s.wall_hits;
  if (events & (kEventCollectedGreen | kEventCollectedBlue)) ++s.collected;
  if (events & kEventCaught) ++s.caught;
}

/// Walled grid with the learning agent and hand-coded mobile preys/predators.
class PreyPredatorWorld {
 public:
  PreyPredatorWorld(const PreyPredatorConfig& cfg, Rng& rng)
      : grid_(cfg.width, cfg.height),
        occupant_(static_cast<std::size_t>(cfg.width) * cfg.height, -1),
        threshold2_(cfg.proximity_threshold * cfg.proximity_threshold),
        bias_prob_(cfg.bias_prob) {
    cfg.validate();
    agent_.pos = grid_.random_interior(rng);
    agent_.heading = static_cast<Heading>(uniform_int(rng, 0, 3));
    for (int i = 0; i < cfg.n_green + cfg.n_blue; ++i) {
      const CellKind color = i < cfg.n_green ? CellKind::Green : CellKind::Blue;
      mobiles_.push_back({random_free_cell(rng), color});
      occupant_[index(mobiles_.back().pos)] = static_cast<int>(mobiles_.size() - 1);
    }
    season_ = cfg.schedule.sequence.front();
  }

  /// Explicit layout for tests.
  PreyPredatorWorld(int width, int height, Pose agent, std::vector<Mobile> mobiles, double proximity_threshold,
                    double bias_prob, Season season = Season::Summer)
      : grid_(width, height),
        agent_(agent),
        mobiles_(std::move(mobiles)),
        occupant_(static_cast<std::size_t>(width) * height, -1),
        threshold2_(proximity_threshold * proximity_threshold),
        bias_prob_(bias_prob),
        season_(season) {
    if (!grid_.interior(agent.pos)) throw ContractViolation("agent must start inside the grid");
    for (std::size_t i = 0; i < mobiles_.size(); ++i) {
      const Cell c = mobiles_[i].pos;
      if (!grid_.interior(c) || occupant_[index(c)] >= 0) throw ContractViolation("invalid mobile cell");
      occupant_[index(c)] = static_cast<int>(i);
    }
  }

  const Grid& grid() const noexcept { return grid_; }
  const Pose& agent() const noexcept { return agent_; }
  const std::vector<Mobile>& mobiles() const noexcept { return mobiles_; }
  Season season() const noexcept { return season_; }
  void set_season(Season s) noexcept { season_ = s; }

  int count(CellKind color) const noexcept {
    int n = 0;
    for (const auto& m : mobiles_) n += m.color == color;
    return n;
  }

  /// Content of an absolute cell as seen by the agent.
  CellKind kind_at(Cell c) const noexcept {
    if (!grid_.interior(c)) return CellKind::Wall;
    const int occ = occupant_[index(c)];
    return occ >= 0 ? mobiles_[static_cast<std::size_t>(occ)].color : CellKind::Empty;
  }

  VisionField sense_vision() const {
    VisionField v;
    v.positions = vision_cells(agent_);
    for (std::size_t i = 0; i < v.cells.size(); ++i) v.cells[i] = kind_at(v.positions[i]);
    return v;
  }

  /// Agent kinematics; returns kEventWallHit or kEventNone. Entering a
  /// mobile's cell arms an encounter for resolve_encounters.
  std::uint8_t move_agent(Action a) {
    if (esp::move_agent(grid_, agent_, a)) return kEventWallHit;
    if (occupant_[index(agent_.pos)] >= 0) contact_ = true;
    return kEventNone;
  }

  /// Moves every mobile once, in index order. Mobiles within the proximity
  /// threshold of the agent take the distance-extremizing free neighbor with
  /// probability bias_prob (preys flee, predators chase); otherwise a uniform
  /// free neighbor. Preys never enter the agent's cell.
  void step_mobiles(Rng& rng) {
    std::array<Cell, 8> free{};
    for (std::size_t i = 0; i < mobiles_.size(); ++i) {
      Mobile& mob = mobiles_[i];
      const bool prey = is_prey(mob.color, season_);
      const std::size_t n_free = free_neighbors(mob.pos, prey, free);
      if (n_free == 0) continue;
      std::size_t pick = 0;
      if (squared_distance(mob.pos, agent_.pos) <= threshold2_ && bernoulli(rng, bias_prob_)) {
        double best = squared_distance(free[0], agent_.pos);
        for (std::size_t k = 1; k < n_free; ++k) {
          const double d = squared_distance(free[k], agent_.pos);
          if (prey ? d > best : d < best) {
            best = d;
            pick = k;
          }
        }
      } else {
        pick = uniform_int<std::size_t>(rng, 0, n_free - 1);
      }
      occupant_[index(mob.pos)] = -1;
      mob.pos = free[pick];
      occupant_[index(mob.pos)] = static_cast<int>(i);
      if (mob.pos == agent_.pos) contact_ = true;
    }
  }

  /// Settles a fresh agent/mobile co-location: a prey is caught by the agent
  /// (relocated, Collected); a predator catches the agent (nobody moves, Caught).
  std::uint8_t resolve_encounters(Rng& rng) {
    if (!contact_) return kEventNone;
    contact_ = false;
    const int occ = occupant_[index(agent_.pos)];
    if (occ < 0) return kEventNone;
    Mobile& mob = mobiles_[static_cast<std::size_t>(occ)];
    if (!is_prey(mob.color, season_)) return kEventCaught;
    occupant_[index(mob.pos)] = -1;
    mob.pos = random_free_cell(rng);
    occupant_[index(mob.pos)] = occ;
    return mob.color == CellKind::Green ? kEventCollectedGreen : kEventCollectedBlue;
  }

  static constexpr std::array<Cell, 8> kMoore{{{0, -1}, {1, -1}, {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}}};

  std::size_t free_neighbors(Cell from, bool prey, std::array<Cell, 8>& out) const {
    std::size_t n = 0;
    for (const Cell d : kMoore) {
      const Cell c = from + d;
      if (!grid_.interior(c) || occupant_[index(c)] >= 0) continue;
      if (prey && c == agent_.pos) continue;
      out[n++] = c;
    }
    return n;
  }

 private:
  std::size_t index(Cell c) const noexcept { return static_cast<std::size_t>(c.y) * grid_.width() + c.x; }

  Cell random_free_cell(Rng& rng) const {
    for (;;) {
      const Cell c = grid_.random_interior(rng);
      if (c != agent_.pos && occupant_[index(c)] < 0) return c;
    }
  }

  Grid grid_;
  Pose agent_;
  std::vector<Mobile> mobiles_;
  std::vector<int> occupant_;
  double threshold2_ = 25.0;
  double bias_prob_ = 0.9;
  Season season_ = Season::Summer;
  bool contact_ = false;
};

inline VisionField sense_vision(const PreyPredatorWorld& world) { return world.sense_vision(); }

/// Closest-object reinforcement. `closest` is taken from the vision before
/// the move; the behavior is Avoid or Move-towards depending on whether the
/// agent's distance to that object grew or shrank.
inline Modulation reinforce_prey_predator(const ClosestObject& closest, Cell before, Cell after, Action action,
                                          Season season) {
  if (!closest.found) return action == Action::Straight ? Modulation::Reward : Modulation::Punish;
  const double d0 = squared_distance(before, closest.pos);
  const double d1 = squared_distance(after, closest.pos);
  if (d0 == d1) return Modulation::Neutral;
  const bool avoid = d1 > d0;
  switch (closest.kind) {
    case CellKind::Wall: return avoid ? Modulation::Reward : Modulation::Punish;
    case CellKind::Green:
    case CellKind::Blue: {
      // Avoiding a predator or chasing a prey is rewarded.
      const bool prey = is_prey(closest.kind, season);
      return (avoid != prey) ? Modulation::Reward : Modulation::Punish;
    }
    default: return Modulation::Neutral;
  }
}

struct PreyPredatorTrialResult {
  std::vector<EncounterStats> seasons;
  Network final_net;

  EncounterStats total() const {
    EncounterStats t;
    for (const auto& s : seasons) t += s;
    return t;
  }
};

inline std::uint8_t pp_step_agent(PreyPredatorWorld& world, const Network& net, ActivationRecord& acts,
                                  Rng& explore_rng, Rng& world_rng, double explore_prob, Action& action,
                                  bool& explored, ClosestObject& closest, Cell& before, std::string* sensor_out) {
  const VisionField vision = world.sense_vision();
  closest = vision.closest(world.agent().pos);
  const auto input = vision.bits();
  forward_into(net, input, acts);
  action = static_cast<Action>(acts.action);
  explored = false;
  if (bernoulli(explore_rng, explore_prob)) {
    explored = true;
    action = static_cast<Action>(uniform_int(explore_rng, 0, 2));
  }
  if (sensor_out) *sensor_out = bit_string(input);
  before = world.agent().pos;
  std::uint8_t events = world.move_agent(action);
  events |= world.resolve_encounters(world_rng);
  return events;
}

/// One lifetime-learning prey-predator trial. Per step: sense, forward
/// (with exploration), agent move, reinforcement, plasticity, mobile moves.
inline PreyPredatorTrialResult run_pp_trial(const PlasticityRule& rule, std::uint64_t net_seed,
                                            std::uint64_t world_seed, const PreyPredatorConfig& cfg,
                                            TrialLog* log = nullptr) {
  cfg.validate();
  Rng net_rng(net_seed);
  Rng world_rng(world_seed);
  Rng explore_rng(derive_seed(world_seed, seed_tag::kExplore));
  Rng mobile_rng(derive_seed(world_seed, seed_tag::kMobiles));

  PreyPredatorTrialResult result;
  Network net = init_network(PreyPredatorConfig::kInputs, cfg.n_hidden, PreyPredatorConfig::kOutputs, net_rng);
  PreyPredatorWorld world(cfg, world_rng);
  result.seasons.assign(static_cast<std::size_t>(cfg.schedule.num_seasons()), EncounterStats{});

  ActivationRecord acts;
  std::string sensor;
  const long total = cfg.schedule.total_steps();
  for (long step = 0; step < total; ++step) {
    const int season_idx = cfg.schedule.season_index(step);
    const Season season = cfg.schedule.sequence[static_cast<std::size_t>(season_idx)];
    world.set_season(season);

    Action action{};
    bool explored = false;
    ClosestObject closest;
    Cell before;
    std::uint8_t events = pp_step_agent(world, net, acts, explore_rng, world_rng, cfg.explore_prob, action, explored,
                                        closest, before, log ? &sensor : nullptr);
    const Modulation m = reinforce_prey_predator(closest, before, world.agent().pos, action, season);
    if (!explored) apply_update_in_place(net, acts, m, rule);
    world.step_mobiles(mobile_rng);
    events |= world.resolve_encounters(world_rng);

    record_events(result.seasons[static_cast<std::size_t>(season_idx)], events);
    if (log) log->push_back({step, season, sensor, action, explored, to_int(m), events});
  }
  result.final_net = std::move(net);
  return result;
}

/// Frozen-weight episode of one season on a fresh world.
inline EncounterStats evaluate_frozen_pp(const Network& net, Season season, long steps, std::uint64_t world_seed,
                                         const PreyPredatorConfig& cfg, double explore_prob) {
  Rng world_rng(world_seed);
  Rng explore_rng(derive_seed(world_seed, seed_tag::kExplore));
  Rng mobile_rng(derive_seed(world_seed, seed_tag::kMobiles));
  PreyPredatorWorld world(cfg, world_rng);
  world.set_season(season);
  EncounterStats stats;
  ActivationRecord acts;
  for (long step = 0; step < steps; ++step) {
    Action action{};
    bool explored = false;
    ClosestObject closest;
    Cell before;
    std::uint8_t events = pp_step_agent(world, net, acts, explore_rng, world_rng, explore_prob, action, explored,
                                        closest, before, nullptr);
    world.step_mobiles(mobile_rng);
    events |= world.resolve_encounters(world_rng);
    record_events(stats, events);
  }
  return stats;
}

inline double pp_score(const EncounterStats& s, double alpha) noexcept {
  return alpha * static_cast<double>(s.collected) - static_cast<double>(s.caught);
}

/// Mean over trials of (alpha * collected - caught); one record per trial.
inline double pp_fitness(std::span<const EncounterStats> per_trial, double alpha) {
  if (per_trial.empty()) throw ContractViolation("pp_fitness: no trial records");
  double sum = 0.0;
  for (const auto& s : per_trial) sum += pp_score(s, alpha);
  return sum / static_cast<double>(per_trial.size());
}

}  // namespace esp
