#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esp/csv.hpp"
#include "esp/grid.hpp"

namespace esp {

/// One agent step as recorded in a TrialLog.
struct LogEntry {
  long step = 0;
  Season season = Season::Summer;
  std::string sensor;  // input bits as '0'/'1' characters
  Action action = Action::Straight;
  bool explored = false;
  int m = 0;
  std::uint8_t events = kEventNone;

  bool operator==(const LogEntry&) const = default;
};

using TrialLog = std::vector<LogEntry>;

template <class Bits>
std::string bit_string(const Bits& bits) {
  std::string s;
  s.reserve(bits.size());
  for (auto b : bits) s += b ? '1' : '0';
  return s;
}

// Schema: step,season,sensor,action,explored,m,event
inline csv::Table trial_log_table(const TrialLog& log) {
  csv::Table t;
  t.header = {"step", "season", "sensor", "action", "explored", "m", "event"};
  t.rows.reserve(log.size());
  for (const auto& e : log)
    t.rows.push_back({std::to_string(e.step), std::string(to_string(e.season)), e.sensor,
                      std::string(to_string(e.action)), e.explored ? "1" : "0", std::to_string(e.m),
                      format_events(e.events)});
  return t;
}

inline std::string emit_trial_log(const TrialLog& log) { return csv::emit(trial_log_table(log)); }

inline TrialLog parse_trial_log(std::string_view text) {
  const csv::Table t = csv::parse(text);
  const auto c_step = t.column("step"), c_season = t.column("season"), c_sensor = t.column("sensor"),
             c_action = t.column("action"), c_expl = t.column("explored"), c_m = t.column("m"),
             c_event = t.column("event");
  TrialLog log;
  log.reserve(t.rows.size());
  for (const auto& r : t.rows) {
    LogEntry e;
    e.step = csv::parse_int<long>(r[c_step]);
    e.season = parse_season(r[c_season]);
    e.sensor = r[c_sensor];
    e.action = parse_action(r[c_action]);
    e.explored = r[c_expl] == "1";
    e.m = csv::parse_int<int>(r[c_m]);
    e.events = parse_events(r[c_event]);
    log.push_back(std::move(e));
  }
  return log;
}

}  // namespace esp
