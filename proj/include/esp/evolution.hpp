#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "esp/parallel.hpp"
#include "esp/plasticity.hpp"
#include "esp/rng.hpp"
#include "esp/stats.hpp"
#include "esp/task.hpp"

namespace esp {

struct Individual {
  PlasticityRule rule;
  std::optional<double> fitness;
  std::uint64_t eval_seed = 0;  // trials derive from this, see trial_net_seed()

  bool evaluated() const noexcept { return fitness.has_value(); }
  bool operator==(const Individual&) const = default;
};

using Population = std::vector<Individual>;

struct GAConfig {
  std::size_t pop_size = 30;
  std::size_t elite_count = 10;
  double crossover_prob = 0.5;
  double eta_mut_sigma = 0.1;
  double eta_mut_prob = 1.0;
  double discrete_resample_prob = 0.15;
  int stagnation_limit = 30;
  int trials_per_eval = 5;
  int max_generations = 10000;  // safety cap; the stagnation rule normally stops first
  std::size_t harvest_size = 10;
  unsigned jobs = 1;
  TaskSpec task{};

  void validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (pop_size < 2) throw ConfigError("pop_size must be >= 2");
    if (elite_count >= pop_size) throw ConfigError("elite_count must be < pop_size");
    if (!prob(crossover_prob) || !prob(eta_mut_prob) || !prob(discrete_resample_prob))
      throw ConfigError("GA probabilities must be in [0,1]");
    if (!(eta_mut_sigma >= 0.0)) throw ConfigError("eta_mut_sigma must be >= 0");
    if (stagnation_limit < 1) throw ConfigError("stagnation_limit must be >= 1");
    if (trials_per_eval < 1) throw ConfigError("trials_per_eval must be >= 1");
    if (max_generations < 0) throw ConfigError("max_generations must be >= 0");
    if (harvest_size < 1 || harvest_size > pop_size) throw ConfigError("harvest_size must be in [1, pop_size]");
    task.validate();
  }
};

inline constexpr double kEtaUpper = 1.0 - 1e-12;
inline constexpr double kRouletteEpsilon = 1e-9;

inline PlasticityRule random_rule(Rng& rng) {
  PlasticityRule r;
  r.eta = uniform01(rng);
  for (auto& o : r.outcomes) o = static_cast<std::int8_t>(uniform_int(rng, -1, 1));
  return r;
}

inline Population init_population(const GAConfig& cfg, Rng& rng) {
  cfg.validate();
  Population pop(cfg.pop_size);
  for (auto& ind : pop) ind.rule = random_rule(rng);
  return pop;
}

inline double evaluate(const Individual& ind, const GAConfig& cfg) {
  return evaluate_rule(ind.rule, cfg.task, ind.eval_seed, cfg.trials_per_eval);
}

/// Roulette probabilities after shifting every fitness by (min - eps).
inline std::vector<double> selection_probabilities(std::span<const double> fitness) {
  if (fitness.empty()) throw ContractViolation("selection over an empty population");
  const double lo = *std::min_element(fitness.begin(), fitness.end()) - kRouletteEpsilon;
  std::vector<double> w(fitness.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) total += (w[i] = fitness[i] - lo);
  for (auto& x : w) x /= total;
  return w;
}

inline std::size_t roulette_draw(std::span<const double> probs, Rng& rng) {
  double u = uniform01(rng);
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (u < probs[i]) return i;
    u -= probs[i];
  }
  return probs.size() - 1;
}

inline PlasticityRule crossover(const PlasticityRule& a, const PlasticityRule& b, double prob_first, Rng& rng) {
  PlasticityRule c;
  c.eta = bernoulli(rng, prob_first) ? a.eta : b.eta;
  for (std::size_t k = 0; k < kRuleOutcomes; ++k) c.outcomes[k] = bernoulli(rng, prob_first) ? a.outcomes[k] : b.outcomes[k];
  return c;
}

inline void mutate(PlasticityRule& r, const GAConfig& cfg, Rng& rng) {
  if (cfg.eta_mut_sigma > 0.0 && bernoulli(rng, cfg.eta_mut_prob))
    r.eta = std::clamp(r.eta + gaussian(rng, 0.0, cfg.eta_mut_sigma), 0.0, kEtaUpper);
  for (auto& o : r.outcomes)
    if (bernoulli(rng, cfg.discrete_resample_prob)) o = static_cast<std::int8_t>(uniform_int(rng, -1, 1));
}

inline PlasticityRule make_child(const PlasticityRule& p1, const PlasticityRule& p2, const GAConfig& cfg, Rng& rng) {
  PlasticityRule c = crossover(p1, p2, cfg.crossover_prob, rng);
  mutate(c, cfg, rng);
  return c;
}

/// Indices sorted by fitness, best first; ties keep population order.
inline std::vector<std::size_t> rank_order(const Population& pop) {
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return *pop[a].fitness > *pop[b].fitness; });
  return idx;
}

/// Elites (with cached fitness) first, then unevaluated children.
inline Population next_generation(const Population& pop, const GAConfig& cfg, Rng& rng) {
  std::vector<double> fit;
  for (const auto& ind : pop) {
    if (!ind.evaluated()) throw ContractViolation("next_generation: unevaluated individual");
    fit.push_back(*ind.fitness);
  }
  const auto order = rank_order(pop);
  const auto probs = selection_probabilities(fit);

  Population next;
  next.reserve(cfg.pop_size);
  for (std::size_t e = 0; e < cfg.elite_count; ++e) next.push_back(pop[order[e]]);
  while (next.size() < cfg.pop_size) {
    const auto& p1 = pop[roulette_draw(probs, rng)].rule;
    const auto& p2 = pop[roulette_draw(probs, rng)].rule;
    next.push_back(Individual{make_child(p1, p2, cfg, rng), std::nullopt, 0});
  }
  return next;
}

struct GenerationRecord {
  int generation = 0;
  double best = 0.0;
  double mean = 0.0;
  double std = 0.0;
  PlasticityRule best_rule;
};

struct GAResult {
  std::vector<Individual> harvest;  // final population's best, best first
  std::vector<GenerationRecord> history;
  int generations = 0;  // number of next_generation steps performed
  bool hit_generation_cap = false;
};

namespace detail {
inline void evaluate_pending(Population& pop, const GAConfig& cfg, std::uint64_t seed, int generation) {
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (!pop[i].evaluated()) {
      pop[i].eval_seed = derive_seed(seed, seed_tag::kEvaluation, static_cast<std::uint64_t>(generation), i);
      pending.push_back(i);
    }
  const auto fit = parallel_map(pending.size(), cfg.jobs, [&](std::size_t k) { return evaluate(pop[pending[k]], cfg); });
  for (std::size_t k = 0; k < pending.size(); ++k) pop[pending[k]].fitness = fit[k];
}

inline GenerationRecord record(const Population& pop, int generation) {
  std::vector<double> fit;
  for (const auto& ind : pop) fit.push_back(*ind.fitness);
  const auto best = rank_order(pop).front();
  return {generation, *pop[best].fitness, mean(fit), stddev(fit), pop[best].rule};
}
}  // namespace detail

/// Runs until the best fitness has not strictly improved for
/// `stagnation_limit` consecutive generations.
inline GAResult run_ga(const GAConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng init_rng(derive_seed(seed, seed_tag::kInit));
  Population pop = init_population(cfg, init_rng);
  detail::evaluate_pending(pop, cfg, seed, 0);

  GAResult res;
  res.history.push_back(detail::record(pop, 0));
  double best = res.history.back().best;
  int stagnant = 0;
  int gen = 0;
  while (stagnant < cfg.stagnation_limit) {
    if (gen >= cfg.max_generations) {
      res.hit_generation_cap = true;
      break;
    }
    Rng sel_rng(derive_seed(seed, seed_tag::kSelection, static_cast<std::uint64_t>(gen)));
    pop = next_generation(pop, cfg, sel_rng);
    ++gen;
    detail::evaluate_pending(pop, cfg, seed, gen);
    res.history.push_back(detail::record(pop, gen));
    if (res.history.back().best > best) {
      best = res.history.back().best;
      stagnant = 0;
    } else {
      ++stagnant;
    }
  }
  res.generations = gen;
  const auto order = rank_order(pop);
  for (std::size_t i = 0; i < cfg.harvest_size; ++i) res.harvest.push_back(pop[order[i]]);
  return res;
}

}  // namespace esp
