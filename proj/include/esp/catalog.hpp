#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esp/plasticity.hpp"
#include "esp/task.hpp"

namespace esp {

struct NamedRule {
  TaskKind task;
  int id;
  PlasticityRule rule;
};

/// Published rules used as fixtures; outcomes in m=-1 then m=+1 order.
inline const std::vector<NamedRule>& rule_catalog() {
  static const std::vector<NamedRule> rules{
      {TaskKind::Foraging, 1, {0.0375, {0, 0, 1, -1, 0, 0, 0, 0}}},
      {TaskKind::Foraging, 2, {0.0167, {-1, 1, 1, -1, 0, 0, 0, 0}}},
      {TaskKind::Foraging, 3, {0.0192, {1, 0, 1, -1, 0, 0, 0, 0}}},
      {TaskKind::Foraging, 16, {0.04, {0, 0, 0, -1, 0, 0, 0, 0}}},
      {TaskKind::Foraging, 17, {0.01, {0, 0, 1, -1, 0, -1, 0, 1}}},
      {TaskKind::Foraging, 18, {0.01, {0, 0, 0, -1, 0, 0, 0, 1}}},
      {TaskKind::PreyPredator, 1, {0.42, {0, -1, 1, 0, 1, -1, 0, 0}}},
      {TaskKind::PreyPredator, 2, {0.55, {0, -1, 1, 0, -1, 0, -1, -1}}},
  };
  return rules;
}

inline std::optional<PlasticityRule> find_rule(TaskKind task, int id) {
  for (const auto& r : rule_catalog())
    if (r.task == task && r.id == id) return r.rule;
  return std::nullopt;
}

inline PlasticityRule catalog_rule(TaskKind task, int id) {
  if (auto r = find_rule(task, id)) return *r;
  throw ConfigError("no catalog rule " + std::string(to_string(task)) + " ID:" + std::to_string(id));
}

}  // namespace esp
