#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "esp/baselines.hpp"
#include "esp/csv.hpp"
#include "esp/evolution.hpp"
#include "esp/rule_text.hpp"
#include "esp/task.hpp"

namespace esp {

/// Everything an experiment depends on. World keys (width, n_hidden,
/// season_length, ...) address the environment selected by `task`.
struct ExperimentConfig {
  TaskSpec task{};
  std::uint64_t seed = 1;
  std::string out_dir = "results";
  unsigned jobs = 1;

  GAConfig ga{};
  int ga_runs = 30;
  HCConfig hc{};
  int hc_runs = 100;

  int trials = 100;
  std::optional<PlasticityRule> rule;  // overrides rule_id when set
  int rule_id = 1;
  long validation_interval = 20;
  long validation_test_steps = 0;  // 0 = one season
  std::vector<std::size_t> sweep_sizes{5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  int random_rules = 20;

  GAConfig ga_config() const {
    GAConfig g = ga;
    g.task = task;
    g.jobs = jobs;
    return g;
  }

  void validate() const {
    task.validate();
    ga_config().validate();
    hc.validate();
    if (ga_runs < 1 || hc_runs < 1 || trials < 1 || random_rules < 1)
      throw ConfigError("run and trial counts must be >= 1");
    if (validation_interval < 1 || validation_test_steps < 0) throw ConfigError("invalid validation settings");
    if (sweep_sizes.empty()) throw ConfigError("sweep.sizes must not be empty");
  }
};

namespace detail {

inline std::vector<Season> parse_season_list(std::string_view v) {
  std::vector<Season> out;
  for (auto s : csv::split(v, ',')) out.push_back(parse_season(csv::trim(s)));
  return out;
}

inline std::string season_list(const std::vector<Season>& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) out += (i ? "," : "") + std::string(to_string(seq[i]));
  return out;
}

struct ConfigKey {
  const char* name;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class T>
T number(std::string_view key, std::string_view v) {
  try {
    if constexpr (std::is_floating_point_v<T>) return csv::parse_double(v);
    else return csv::parse_int<T>(v);
  } catch (const ParseError&) {
    throw ConfigError("bad value for '" + std::string(key) + "': '" + std::string(v) + "'");
  }
}

inline std::string show(double v) { return csv::format_double(v); }
template <class T>
std::string show(T v) requires std::is_integral_v<T> { return std::to_string(v); }

// World settings live in whichever task config is active.
#define ESP_WORLD_KEY(key, member)                                                                         \
  ConfigKey{key,                                                                                           \
            [](ExperimentConfig& c, std::string_view v) {                                                  \
              if (c.task.kind == TaskKind::Foraging) c.task.foraging.member = number<decltype(c.task.foraging.member)>(key, v); \
              else c.task.prey_predator.member = number<decltype(c.task.prey_predator.member)>(key, v);    \
            },                                                                                             \
            [](const ExperimentConfig& c) {                                                                \
              return c.task.kind == TaskKind::Foraging ? show(c.task.foraging.member)                      \
                                                       : show(c.task.prey_predator.member);                \
            }}
#define ESP_KEY(key, expr)                                                                                 \
  ConfigKey{key, [](ExperimentConfig& c, std::string_view v) { expr = number<decltype(expr)>(key, v); },   \
            [](const ExperimentConfig& c) { return show(expr); }}

inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys{
      {"task", [](ExperimentConfig& c, std::string_view v) { c.task.kind = parse_task(v); },
       [](const ExperimentConfig& c) { return std::string(to_string(c.task.kind)); }},
      ESP_KEY("seed", c.seed),
      {"out", [](ExperimentConfig& c, std::string_view v) { c.out_dir = std::string(v); },
       [](const ExperimentConfig& c) { return c.out_dir; }},
      ESP_KEY("jobs", c.jobs),
      ESP_WORLD_KEY("width", width),
      ESP_WORLD_KEY("height", height),
      ESP_WORLD_KEY("n_green", n_green),
      ESP_WORLD_KEY("n_blue", n_blue),
      ESP_WORLD_KEY("n_hidden", n_hidden),
      ESP_WORLD_KEY("explore_prob", explore_prob),
      ESP_WORLD_KEY("season_length", schedule.season_length),
      {"seasons",
       [](ExperimentConfig& c, std::string_view v) {
         (c.task.kind == TaskKind::Foraging ? c.task.foraging.schedule : c.task.prey_predator.schedule).sequence =
             parse_season_list(v);
       },
       [](const ExperimentConfig& c) { return season_list(c.task.schedule().sequence); }},
      ESP_KEY("alpha", c.task.prey_predator.alpha),
      ESP_KEY("proximity_threshold", c.task.prey_predator.proximity_threshold),
      ESP_KEY("bias_prob", c.task.prey_predator.bias_prob),
      ESP_KEY("ga.pop_size", c.ga.pop_size),
      ESP_KEY("ga.elite_count", c.ga.elite_count),
      ESP_KEY("ga.crossover_prob", c.ga.crossover_prob),
      ESP_KEY("ga.eta_mut_sigma", c.ga.eta_mut_sigma),
      ESP_KEY("ga.eta_mut_prob", c.ga.eta_mut_prob),
      ESP_KEY("ga.discrete_resample_prob", c.ga.discrete_resample_prob),
      ESP_KEY("ga.stagnation_limit", c.ga.stagnation_limit),
      ESP_KEY("ga.trials_per_eval", c.ga.trials_per_eval),
      ESP_KEY("ga.max_generations", c.ga.max_generations),
      ESP_KEY("ga.harvest_size", c.ga.harvest_size),
      ESP_KEY("ga.runs", c.ga_runs),
      ESP_KEY("hc.perturb_sigma", c.hc.perturb_sigma),
      ESP_KEY("hc.iterations_per_season", c.hc.iterations_per_season),
      ESP_KEY("hc.steps_per_eval", c.hc.steps_per_eval),
      ESP_KEY("hc.explore_prob", c.hc.explore_prob),
      ESP_KEY("hc.runs", c.hc_runs),
      ESP_KEY("trials", c.trials),
      {"rule", [](ExperimentConfig& c, std::string_view v) { c.rule = parse_rule(v); },
       [](const ExperimentConfig& c) { return c.rule ? format_rule(*c.rule) : std::string(); }},
      ESP_KEY("rule_id", c.rule_id),
      ESP_KEY("validation.interval", c.validation_interval),
      ESP_KEY("validation.test_steps", c.validation_test_steps),
      {"sweep.sizes",
       [](ExperimentConfig& c, std::string_view v) {
         c.sweep_sizes.clear();
         for (auto s : csv::split(v, ',')) c.sweep_sizes.push_back(number<std::size_t>("sweep.sizes", csv::trim(s)));
       },
       [](const ExperimentConfig& c) {
         std::string out;
         for (std::size_t i = 0; i < c.sweep_sizes.size(); ++i) out += (i ? "," : "") + std::to_string(c.sweep_sizes[i]);
         return out;
       }},
      ESP_KEY("random_rules", c.random_rules),
  };
  return keys;
}
#undef ESP_KEY
#undef ESP_WORLD_KEY

inline const ConfigKey* find_key(std::string_view name) {
  for (const auto& k : config_keys())
    if (name == k.name) return &k;
  return nullptr;
}

}  // namespace detail

/// Task defaults: the prey-predator world differs from the foraging one in
/// most settings, so selecting a task resets the world to that task's values.
inline ExperimentConfig default_config(TaskKind kind) {
  ExperimentConfig c;
  c.task.kind = kind;
  return c;
}

/// Applies `key = value` pairs. `task` is applied first regardless of its
/// position; unknown and repeated keys are errors. Blank lines and lines
/// starting with '#' are ignored.
inline void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::map<std::string, int> seen;
  int lineno = 0;
  for (auto raw : csv::split(text, '\n')) {
    ++lineno;
    const auto line = csv::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key(csv::trim(line.substr(0, eq)));
    std::string value(csv::trim(line.substr(eq + 1)));
    if (!detail::find_key(key)) throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (seen[key]++) throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    pairs.emplace_back(std::move(key), std::move(value));
  }
  auto set = [&](const std::string& k, const std::string& v) {
    try {
      detail::find_key(k)->set(cfg, v);
    } catch (const ParseError& e) {
      throw ConfigError("bad value for '" + k + "': " + e.what());
    }
  };
  for (const auto& [k, v] : pairs)
    if (k == "task") set(k, v);
  for (const auto& [k, v] : pairs)
    if (k != "task") set(k, v);
}

inline ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  apply_config_text(cfg, text);
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) { return parse_config(csv::read_file(path)); }

/// Every key with its current value, in documentation order.
inline std::string emit_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : detail::config_keys()) {
    const auto v = k.get(cfg);
    if (std::string_view(k.name) == "rule" && v.empty()) continue;
    out += std::string(k.name) + " = " + v + "\n";
  }
  return out;
}

}  // namespace esp
