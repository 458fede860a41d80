#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "esp/csv.hpp"
#include "esp/errors.hpp"
#include "esp/plasticity.hpp"

namespace esp {

namespace detail {
inline void append_outcomes(std::string& out, const PlasticityRule& r, std::size_t first) {
  for (std::size_t k = first; k < first + 4; ++k) {
    if (k != first) out += ',';
    out += std::to_string(static_cast<int>(r.outcomes[k]));
  }
}

inline void parse_outcomes(std::string_view body, PlasticityRule& r, std::size_t first) {
  const auto parts = csv::split(body, ',');
  if (parts.size() != 4) throw ParseError("rule: expected 4 outcomes, got '" + std::string(body) + "'");
  for (std::size_t k = 0; k < 4; ++k) {
    const auto p = parts[k];
    int v = 0;
    if (p == "-1") v = -1;
    else if (p == "0") v = 0;
    else if (p == "1") v = 1;
    else throw ParseError("rule: outcome must be -1, 0 or 1, got '" + std::string(p) + "'");
    r.outcomes[first + k] = static_cast<std::int8_t>(v);
  }
}
}  // namespace detail

/// `eta=<decimal>;m-1=o00,o01,o10,o11;m+1=o00,o01,o10,o11`
inline std::string format_rule(const PlasticityRule& r) {
  std::string out = "eta=" + csv::format_double(r.eta) + ";m-1=";
  detail::append_outcomes(out, r, 0);
  out += ";m+1=";
  detail::append_outcomes(out, r, 4);
  return out;
}

inline PlasticityRule parse_rule(std::string_view text) {
  const auto fields = csv::split(csv::trim(text), ';');
  if (fields.size() != 3) throw ParseError("rule: expected 3 ';'-separated fields in '" + std::string(text) + "'");
  auto value_of = [&](std::string_view field, std::string_view key) {
    if (field.substr(0, key.size()) != key) throw ParseError("rule: expected '" + std::string(key) + "'");
    return field.substr(key.size());
  };
  PlasticityRule r;
  r.eta = csv::parse_double(value_of(fields[0], "eta="));
  detail::parse_outcomes(value_of(fields[1], "m-1="), r, 0);
  detail::parse_outcomes(value_of(fields[2], "m+1="), r, 4);
  if (!r.valid()) throw ParseError("rule: eta must be in [0,1)");
  return r;
}

/// Discrete part only, as printed in rule tables: `0,0,1,-1|0,0,0,0`.
inline std::string pattern_string(const PlasticityRule& r) {
  std::string out;
  detail::append_outcomes(out, r, 0);
  out += '|';
  detail::append_outcomes(out, r, 4);
  return out;
}

/// Comma-free genotype token for CSV cells: `<eta>:<8 symbols>` with symbols
/// '-', '0', '+' in outcome order, e.g. `0.0375:00+-0000`.
inline std::string genotype_token(const PlasticityRule& r) {
  std::string out = csv::format_double(r.eta) + ":";
  for (auto o : r.outcomes) out += o < 0 ? '-' : (o > 0 ? '+' : '0');
  return out;
}

inline PlasticityRule parse_genotype_token(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos || s.size() - colon - 1 != kRuleOutcomes)
    throw ParseError("genotype token must look like <eta>:<8 symbols>");
  PlasticityRule r;
  r.eta = csv::parse_double(s.substr(0, colon));
  for (std::size_t k = 0; k < kRuleOutcomes; ++k) {
    const char c = s[colon + 1 + k];
    if (c == '-') r.outcomes[k] = -1;
    else if (c == '0') r.outcomes[k] = 0;
    else if (c == '+') r.outcomes[k] = 1;
    else throw ParseError("genotype symbol must be '-', '0' or '+'");
  }
  if (!r.valid()) throw ParseError("genotype eta must be in [0,1)");
  return r;
}

struct HarvestedRule {
  PlasticityRule rule;
  double fitness = 0.0;
  int run = 0;
  bool operator==(const HarvestedRule&) const = default;
};

/// One rule per line: `<rule text>\tfitness=<decimal>\trun=<int>`.
inline std::string emit_harvest(const std::vector<HarvestedRule>& rules) {
  std::string out;
  for (const auto& h : rules)
    out += format_rule(h.rule) + "\tfitness=" + csv::format_double(h.fitness) + "\trun=" + std::to_string(h.run) + "\n";
  return out;
}

inline std::vector<HarvestedRule> parse_harvest(std::string_view text) {
  std::vector<HarvestedRule> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = csv::trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    if (line.empty() || line.front() == '#') continue;
    const auto cols = csv::split(line, '\t');
    HarvestedRule h;
    h.rule = parse_rule(cols[0]);
    for (std::size_t i = 1; i < cols.size(); ++i) {
      const auto c = csv::trim(cols[i]);
      if (c.starts_with("fitness=")) h.fitness = csv::parse_double(c.substr(8));
      else if (c.starts_with("run=")) h.run = csv::parse_int<int>(c.substr(4));
      else throw ParseError("harvest: unknown column '" + std::string(c) + "'");
    }
    out.push_back(h);
  }
  return out;
}

inline std::vector<HarvestedRule> read_harvest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_harvest(ss.str());
}

}  // namespace esp
