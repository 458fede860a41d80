#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "esp/errors.hpp"
#include "esp/rng.hpp"

namespace esp {

enum class Heading : std::uint8_t { North = 0, East = 1, South = 2, West = 3 };
enum class Action : std::uint8_t { Left = 0, Straight = 1, Right = 2 };
enum class Season : std::uint8_t { Summer = 0, Winter = 1 };
enum class CellKind : std::uint8_t { Empty = 0, Wall = 1, Green = 2, Blue = 3 };

inline constexpr std::size_t kNumActions = 3;

constexpr Heading turn_left(Heading h) noexcept { return static_cast<Heading>((static_cast<int>(h) + 3) % 4); }
constexpr Heading turn_right(Heading h) noexcept { return static_cast<Heading>((static_cast<int>(h) + 1) % 4); }

constexpr Heading heading_after(Heading h, Action a) noexcept {
  switch (a) {
    case Action::Left: return turn_left(h);
    case Action::Right: return turn_right(h);
    default: return h;
  }
}

struct Cell {
  int x = 0;
  int y = 0;
  bool operator==(const Cell&) const = default;
};

/// Unit step along a heading; y grows southward.
constexpr Cell step_of(Heading h) noexcept {
  switch (h) {
    case Heading::North: return {0, -1};
    case Heading::East: return {1, 0};
    case Heading::South: return {0, 1};
    default: return {-1, 0};
  }
}

constexpr Cell operator+(Cell a, Cell b) noexcept { return {a.x + b.x, a.y + b.y}; }
constexpr Cell operator*(int k, Cell a) noexcept { return {k * a.x, k * a.y}; }

inline double squared_distance(Cell a, Cell b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

/// Two-bit sensor code: empty 00, wall 11, green 10, blue 01.
constexpr std::array<std::uint8_t, 2> cell_code(CellKind k) noexcept {
  switch (k) {
    case CellKind::Wall: return {1, 1};
    case CellKind::Green: return {1, 0};
    case CellKind::Blue: return {0, 1};
    default: return {0, 0};
  }
}

constexpr CellKind kind_from_code(std::uint8_t b0, std::uint8_t b1) noexcept {
  if (b0 && b1) return CellKind::Wall;
  if (b0) return CellKind::Green;
  if (b1) return CellKind::Blue;
  return CellKind::Empty;
}

/// Bounded interior of width x height cells, enclosed by a one-cell wall
/// ring. Anything outside the interior reads as wall.
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height) : width_(width), height_(height) {
    if (width < 1 || height < 1) throw ConfigError("grid dimensions must be >= 1");
    cells_.assign(static_cast<std::size_t>(width) * height, CellKind::Empty);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t interior_cells() const noexcept { return cells_.size(); }

  bool interior(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }

  CellKind at(Cell c) const noexcept { return interior(c) ? cells_[index(c)] : CellKind::Wall; }

  void set(Cell c, CellKind k) {
    if (!interior(c)) throw ContractViolation("Grid::set outside the interior");
    cells_[index(c)] = k;
  }

  Cell random_interior(Rng& rng) const {
    return {uniform_int(rng, 0, width_ - 1), uniform_int(rng, 0, height_ - 1)};
  }

 private:
  std::size_t index(Cell c) const noexcept { return static_cast<std::size_t>(c.y) * width_ + c.x; }

  int width_ = 0;
  int height_ = 0;
  std::vector<CellKind> cells_;
};

struct Pose {
  Cell pos;
  Heading heading = Heading::North;
  bool operator==(const Pose&) const = default;
};

/// Left/Right rotate first, then every action attempts one step forward.
/// A step into a wall keeps the position but keeps the new heading.
/// Returns true on a wall hit.
inline bool move_agent(const Grid& grid, Pose& pose, Action a) {
  pose.heading = heading_after(pose.heading, a);
  const Cell target = pose.pos + step_of(pose.heading);
  if (!grid.interior(target)) return true;
  pose.pos = target;
  return false;
}

/// Fixed-length seasons cycling through a given sequence.
struct SeasonSchedule {
  int season_length = 5000;
  std::vector<Season> sequence{Season::Summer, Season::Winter, Season::Summer, Season::Winter};

  int num_seasons() const noexcept { return static_cast<int>(sequence.size()); }
  long total_steps() const noexcept { return static_cast<long>(season_length) * num_seasons(); }
  int season_index(long step) const noexcept { return static_cast<int>(step / season_length); }
  Season season_at(long step) const { return sequence.at(static_cast<std::size_t>(season_index(step))); }

  void validate() const {
    if (season_length < 1) throw ConfigError("season length must be >= 1");
    if (sequence.empty()) throw ConfigError("season sequence must not be empty");
  }
};

inline std::string_view to_string(Season s) noexcept { return s == Season::Summer ? "Summer" : "Winter"; }

inline std::string_view to_string(Action a) noexcept {
  switch (a) {
    case Action::Left: return "Left";
    case Action::Right: return "Right";
    default: return "Straight";
  }
}

inline Season parse_season(std::string_view s) {
  if (s == "summer" || s == "Summer" || s == "S") return Season::Summer;
  if (s == "winter" || s == "Winter" || s == "W") return Season::Winter;
  throw ParseError("unknown season '" + std::string(s) + "'");
}

inline Action parse_action(std::string_view s) {
  if (s == "Left") return Action::Left;
  if (s == "Straight") return Action::Straight;
  if (s == "Right") return Action::Right;
  throw ParseError("unknown action '" + std::string(s) + "'");
}

/// Per-step outcome flags; several may occur in one prey-predator step.
enum EventFlag : std::uint8_t {
  kEventNone = 0,
  kEventWallHit = 1,
  kEventCollectedGreen = 2,
  kEventCollectedBlue = 4,
  kEventCaught = 8,
};

inline std::string format_events(std::uint8_t ev) {
  if (ev == kEventNone) return "None";
  std::string out;
  auto add = [&](std::uint8_t flag, const char* name) {
    if (!(ev & flag)) return;
    if (!out.empty()) out += '|';
    out += name;
  };
  add(kEventWallHit, "WallHit");
  add(kEventCollectedGreen, "Collected(Green)");
  add(kEventCollectedBlue, "Collected(Blue)");
  add(kEventCaught, "Caught");
  return out;
}

inline std::uint8_t parse_events(std::string_view s) {
  if (s == "None") return kEventNone;
  std::uint8_t ev = 0;
  while (!s.empty()) {
    const auto bar = s.find('|');
    const std::string_view tok = s.substr(0, bar);
    if (tok == "WallHit") ev |= kEventWallHit;
    else if (tok == "Collected(Green)") ev |= kEventCollectedGreen;
    else if (tok == "Collected(Blue)") ev |= kEventCollectedBlue;
    else if (tok == "Caught") ev |= kEventCaught;
    else throw ParseError("unknown event '" + std::string(tok) + "'");
    if (bar == std::string_view::npos) break;
    s.remove_prefix(bar + 1);
  }
  return ev;
}

}  // namespace esp
