#include <gtest/gtest.h>

#include <map>
#include <set>

#include "esp/catalog.hpp"
#include "esp/foraging.hpp"

using namespace esp;

namespace {
using Items = std::vector<std::pair<Cell, CellKind>>;

// Expected code of a cell from first principles: outside [0,w)x[0,h) is wall.
std::array<std::uint8_t, 2> oracle_code(int w, int h, Cell c, const Items& items) {
  if (c.x < 0 || c.y < 0 || c.x >= w || c.y >= h) return {1, 1};
  for (const auto& [p, k] : items)
    if (p == c) return k == CellKind::Green ? std::array<std::uint8_t, 2>{1, 0} : std::array<std::uint8_t, 2>{0, 1};
  return {0, 0};
}

SensorState sensor(CellKind l, CellKind f, CellKind r) { return SensorState{{l, f, r}}; }
}  // namespace

TEST(ForagingGrid, HeadingsAndSteps) {
  EXPECT_EQ(turn_left(Heading::North), Heading::West);
  EXPECT_EQ(turn_right(Heading::West), Heading::North);
  EXPECT_EQ(step_of(Heading::North), (Cell{0, -1}));
  EXPECT_EQ(step_of(Heading::East), (Cell{1, 0}));
}

TEST(ForagingGrid, CellCodes) {
  EXPECT_EQ(cell_code(CellKind::Empty), (std::array<std::uint8_t, 2>{0, 0}));
  EXPECT_EQ(cell_code(CellKind::Wall), (std::array<std::uint8_t, 2>{1, 1}));
  EXPECT_EQ(cell_code(CellKind::Green), (std::array<std::uint8_t, 2>{1, 0}));
  EXPECT_EQ(cell_code(CellKind::Blue), (std::array<std::uint8_t, 2>{0, 1}));
}

TEST(ForagingGrid, EventsRoundTrip) {
  for (std::uint8_t ev = 0; ev < 16; ++ev) EXPECT_EQ(parse_events(format_events(ev)), ev);
  EXPECT_EQ(format_events(kEventNone), "None");
}

TEST(ForagingSense, AllEmpty) {
  ForagingWorld w(10, 10, Pose{{5, 5}, Heading::North}, {});
  EXPECT_EQ(w.sense().bits(), (std::array<std::uint8_t, 6>{0, 0, 0, 0, 0, 0}));
}

TEST(ForagingSense, WallAhead) {
  ForagingWorld w(10, 10, Pose{{5, 0}, Heading::North}, {});
  EXPECT_EQ(w.sense().bits(), (std::array<std::uint8_t, 6>{0, 0, 1, 1, 0, 0}));
}

TEST(ForagingSense, EveryPoseMatchesGridOracle) {
  const int W = 4, H = 3;
  const Items items{{{1, 1}, CellKind::Green}, {{2, 0}, CellKind::Blue}};
  for (int x = 0; x < W; ++x)
    for (int y = 0; y < H; ++y) {
      if (Cell{x, y} == Cell{1, 1} || Cell{x, y} == Cell{2, 0}) continue;
      for (int h = 0; h < 4; ++h) {
        const Pose p{{x, y}, static_cast<Heading>(h)};
        ForagingWorld w(W, H, p, items);
        const auto bits = w.sense().bits();
        const Cell cells[3] = {p.pos + step_of(turn_left(p.heading)), p.pos + step_of(p.heading),
                               p.pos + step_of(turn_right(p.heading))};
        for (int k = 0; k < 3; ++k) {
          const auto c = oracle_code(W, H, cells[k], items);
          ASSERT_EQ(bits[2 * k], c[0]);
          ASSERT_EQ(bits[2 * k + 1], c[1]);
        }
      }
    }
}

TEST(ForagingSense, CornerFacingWall) {
  ForagingWorld w(10, 10, Pose{{0, 0}, Heading::North}, {});
  const auto s = w.sense();
  EXPECT_EQ(s.front(), CellKind::Wall);
  EXPECT_EQ(s.left(), CellKind::Wall);
  EXPECT_EQ(s.right(), CellKind::Empty);
}

TEST(ForagingAct, StraightNorthDecreasesY) {
  ForagingWorld w(10, 10, Pose{{5, 5}, Heading::North}, {});
  Rng rng(1);
  EXPECT_EQ(w.act(Action::Straight, rng), kEventNone);
  EXPECT_EQ(w.agent().pos, (Cell{5, 4}));
  EXPECT_EQ(w.agent().heading, Heading::North);
}

TEST(ForagingAct, WallHitKeepsPositionAndTurn) {
  ForagingWorld w(10, 10, Pose{{5, 0}, Heading::East}, {});
  Rng rng(1);
  EXPECT_EQ(w.act(Action::Left, rng), kEventWallHit);  // turns north, bumps
  EXPECT_EQ(w.agent().pos, (Cell{5, 0}));
  EXPECT_EQ(w.agent().heading, Heading::North);
}

TEST(ForagingAct, CollectRespawns) {
  ForagingWorld w(10, 10, Pose{{5, 5}, Heading::North}, {{{5, 4}, CellKind::Green}, {{0, 0}, CellKind::Blue}});
  Rng rng(3);
  EXPECT_EQ(w.act(Action::Straight, rng), kEventCollectedGreen);
  EXPECT_EQ(w.green_count(), 1);
  int greens = 0;
  for (int x = 0; x < 10; ++x)
    for (int y = 0; y < 10; ++y) greens += w.grid().at({x, y}) == CellKind::Green;
  EXPECT_EQ(greens, 1);
  EXPECT_NE(w.grid().at(w.agent().pos), CellKind::Green);
}

TEST(ForagingWorld, RandomWorldInvariantsHoldUnderRandomWalk) {
  ForagingConfig cfg;
  cfg.width = cfg.height = 12;
  cfg.n_green = cfg.n_blue = 10;
  Rng rng(5);
  ForagingWorld w(cfg, rng);
  for (int step = 0; step < 5000; ++step) {
    const Cell before = w.agent().pos;
    const auto ev = w.act(static_cast<Action>(uniform_int(rng, 0, 2)), rng);
    if (ev & kEventWallHit) ASSERT_EQ(w.agent().pos, before);
    ASSERT_TRUE(w.grid().interior(w.agent().pos));
    int g = 0, b = 0;
    for (int x = 0; x < 12; ++x)
      for (int y = 0; y < 12; ++y) {
        g += w.grid().at({x, y}) == CellKind::Green;
        b += w.grid().at({x, y}) == CellKind::Blue;
      }
    ASSERT_EQ(g, 10);
    ASSERT_EQ(b, 10);
    ASSERT_EQ(w.grid().at(w.agent().pos), CellKind::Empty);
  }
}

TEST(ForagingReinforce, Examples) {
  using enum CellKind;
  EXPECT_EQ(reinforce_foraging(sensor(Empty, Empty, Empty), Action::Straight, Season::Summer), Modulation::Reward);
  EXPECT_EQ(reinforce_foraging(sensor(Empty, Empty, Empty), Action::Left, Season::Winter), Modulation::Punish);
  EXPECT_EQ(reinforce_foraging(sensor(Empty, Green, Empty), Action::Straight, Season::Winter), Modulation::Punish);
  EXPECT_EQ(reinforce_foraging(sensor(Empty, Green, Empty), Action::Straight, Season::Summer), Modulation::Reward);
  // Wall ahead and green on the left, turning right: item row ID:12 wins over wall row ID:3.
  EXPECT_EQ(foraging_association_id(sensor(Green, Wall, Empty), Action::Right), 12);
  EXPECT_EQ(reinforce_foraging(sensor(Green, Wall, Empty), Action::Right, Season::Summer), Modulation::Punish);
  // Matched row with a 0 value still decides (ID:10 in winter).
  EXPECT_EQ(foraging_association_id(sensor(Blue, Green, Empty), Action::Left), 10);
  EXPECT_EQ(reinforce_foraging(sensor(Blue, Green, Empty), Action::Left, Season::Winter), Modulation::Neutral);
}

TEST(ForagingReinforce, WallRows) {
  using enum CellKind;
  EXPECT_EQ(foraging_association_id(sensor(Empty, Wall, Empty), Action::Left), 3);
  EXPECT_EQ(reinforce_foraging(sensor(Empty, Wall, Empty), Action::Straight, Season::Winter), Modulation::Punish);
  EXPECT_EQ(foraging_association_id(sensor(Wall, Empty, Empty), Action::Right), 5);
  EXPECT_EQ(foraging_association_id(sensor(Wall, Empty, Empty), Action::Straight), 6);
  EXPECT_EQ(foraging_association_id(sensor(Empty, Empty, Wall), Action::Left), 7);
  EXPECT_EQ(foraging_association_id(sensor(Empty, Empty, Wall), Action::Straight), 8);
}

TEST(ForagingReinforce, ExhaustiveSeasonSymmetryForItems) {
  // Item rows swap sign between seasons when the colors are swapped.
  const CellKind kinds[4] = {CellKind::Empty, CellKind::Wall, CellKind::Green, CellKind::Blue};
  auto swap = [](CellKind k) { return k == CellKind::Green ? CellKind::Blue : (k == CellKind::Blue ? CellKind::Green : k); };
  for (auto l : kinds)
    for (auto f : kinds)
      for (auto r : kinds)
        for (int a = 0; a < 3; ++a) {
          const auto s = sensor(l, f, r);
          const auto t = sensor(swap(l), swap(f), swap(r));
          const int id = foraging_association_id(s, static_cast<Action>(a));
          if (id < 9) {
            EXPECT_EQ(reinforce_foraging(s, static_cast<Action>(a), Season::Summer),
                      reinforce_foraging(s, static_cast<Action>(a), Season::Winter));
          } else if (id >= 9 && foraging_association_id(t, static_cast<Action>(a)) == (id <= 14 ? id + 6 : id - 6)) {
            EXPECT_EQ(reinforce_foraging(s, static_cast<Action>(a), Season::Summer),
                      reinforce_foraging(t, static_cast<Action>(a), Season::Winter));
          }
        }
}

TEST(ForagingFitness, Arithmetic) {
  std::vector<SeasonStats> s(4);
  for (auto& x : s) x.correct = 7;
  EXPECT_DOUBLE_EQ(foraging_fitness(std::span<const SeasonStats>(s)), 7.0);
  for (auto& x : s) {
    x.correct = 10;
    x.incorrect = 3;
  }
  EXPECT_DOUBLE_EQ(foraging_fitness(std::span<const SeasonStats>(s)), 7.0);
  EXPECT_THROW(foraging_fitness(std::span<const SeasonStats>{}), ContractViolation);
}

TEST(ForagingTrial, DeterministicLog) {
  ForagingConfig cfg;
  cfg.schedule.season_length = 1000;
  const auto rule = catalog_rule(TaskKind::Foraging, 1);
  TrialLog a, b;
  const auto ra = run_foraging_trial(rule, 1, 2, cfg, &a);
  const auto rb = run_foraging_trial(rule, 1, 2, cfg, &b);
  EXPECT_EQ(emit_trial_log(a), emit_trial_log(b));
  EXPECT_EQ(ra.seasons, rb.seasons);
  EXPECT_EQ(a.size(), 4000u);
  EXPECT_EQ(parse_trial_log(emit_trial_log(a)), a);
}

TEST(ForagingTrial, ZeroRuleIsFixedPolicyAcrossSchedules) {
  // No exploration + zero outcomes: weights only get normalized, so behavior
  // (and thus the trajectory) does not depend on the season sequence.
  ForagingConfig a;
  a.explore_prob = 0.0;
  a.schedule.season_length = 500;
  ForagingConfig b = a;
  b.schedule.sequence = {Season::Winter, Season::Winter, Season::Summer, Season::Summer};
  const PlasticityRule zero{0.3, {}};
  TrialLog la, lb;
  run_foraging_trial(zero, 5, 6, a, &la);
  run_foraging_trial(zero, 5, 6, b, &lb);
  ASSERT_EQ(la.size(), lb.size());
  for (std::size_t i = 0; i < la.size(); ++i) {
    ASSERT_EQ(la[i].action, lb[i].action);
    ASSERT_EQ(la[i].sensor, lb[i].sensor);
  }
}

TEST(ForagingTrial, ZeroRuleEventuallyPeriodicOnSmallGrid) {
  // Without items the state is (pose, net) with a fixed net after the first
  // normalization: the pose sequence must cycle within 4*w*h steps.
  ForagingConfig cfg;
  cfg.width = cfg.height = 5;
  cfg.n_green = cfg.n_blue = 0;
  cfg.explore_prob = 0.0;
  cfg.schedule.season_length = 400;
  cfg.schedule.sequence = {Season::Summer};
  TrialLog log;
  const PlasticityRule zero{0.1, {}};
  run_foraging_trial(zero, 8, 9, cfg, &log);
  std::vector<std::string> seq;
  for (const auto& e : log) seq.push_back(e.sensor + std::string(to_string(e.action)));
  bool periodic = false;
  for (std::size_t p = 1; p <= 100 && !periodic; ++p) {
    periodic = true;
    for (std::size_t i = 200; i + p < seq.size(); ++i)
      if (seq[i] != seq[i + p]) {
        periodic = false;
        break;
      }
  }
  EXPECT_TRUE(periodic);
}

TEST(ForagingTrial, ExploredStepsSkipPlasticity) {
  ForagingConfig cfg;
  cfg.schedule.season_length = 300;
  cfg.explore_prob = 1.0;  // every action random: no updates at all
  const auto before = plasticity_update_calls();
  const auto res = run_foraging_trial(catalog_rule(TaskKind::Foraging, 1), 3, 4, cfg);
  EXPECT_EQ(plasticity_update_calls(), before);
  EXPECT_EQ(res.final_net, res.initial_net);
}

TEST(ForagingConfig, Validation) {
  ForagingConfig cfg;
  cfg.width = 2;
  cfg.height = 2;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = ForagingConfig{};
  cfg.explore_prob = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}
