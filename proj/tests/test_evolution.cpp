#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "esp/evolution.hpp"

using namespace esp;

namespace {
GAConfig tiny_config() {
  GAConfig cfg;
  cfg.pop_size = 8;
  cfg.elite_count = 2;
  cfg.trials_per_eval = 1;
  cfg.stagnation_limit = 3;
  cfg.max_generations = 40;
  cfg.harvest_size = 4;
  auto& f = cfg.task.foraging;
  f.width = f.height = 10;
  f.n_green = f.n_blue = 2;
  f.n_hidden = 5;
  f.schedule.season_length = 100;
  return cfg;
}

Population with_fitness(std::vector<double> fit) {
  Population pop;
  Rng rng(1);
  for (double f : fit) pop.push_back(Individual{random_rule(rng), f, 0});
  return pop;
}
}  // namespace

TEST(GAInit, OutcomesUniformOverThreeValues) {
  Rng rng(10);
  std::array<long, 3> counts{};
  const int rules = 5000;
  for (int i = 0; i < rules; ++i) {
    const auto r = random_rule(rng);
    ASSERT_GE(r.eta, 0.0);
    ASSERT_LT(r.eta, 1.0);
    for (auto o : r.outcomes) ++counts[static_cast<std::size_t>(o + 1)];
  }
  const double e = rules * 8 / 3.0;
  double chi2 = 0.0;
  for (auto c : counts) chi2 += (c - e) * (c - e) / e;
  EXPECT_LT(chi2, 13.8);  // 2 dof, p = 0.001
}

TEST(Selection, ShiftedProbabilities) {
  const std::vector<double> fit{1.0, 3.0, 2.0};
  const auto p = selection_probabilities(fit);
  const double e = kRouletteEpsilon;
  const double total = e + (2 + e) + (1 + e);
  EXPECT_NEAR(p[0], e / total, 1e-15);
  EXPECT_NEAR(p[1], (2 + e) / total, 1e-15);
  EXPECT_NEAR(p[2], (1 + e) / total, 1e-15);
}

TEST(Selection, AllEqualIsUniform) {
  const std::vector<double> fit(5, -7.5);
  for (double p : selection_probabilities(fit)) EXPECT_NEAR(p, 0.2, 1e-12);
}

TEST(Selection, RouletteFrequencies) {
  const std::vector<double> fit{0.0, 1.0, 4.0, 5.0};
  const auto p = selection_probabilities(fit);
  Rng rng(11);
  const int N = 100000;
  std::array<int, 4> hist{};
  for (int i = 0; i < N; ++i) ++hist[roulette_draw(p, rng)];
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(hist[i], N * p[i], 3 * std::sqrt(N * p[i] * (1 - p[i])) + 1) << i;
  EXPECT_LT(hist[0], 5);  // weight is only the epsilon shift
}

TEST(Selection, EmptyThrows) { EXPECT_THROW(selection_probabilities(std::vector<double>{}), ContractViolation); }

TEST(Variation, IdenticalParentsWithoutMutationCloneExactly) {
  GAConfig cfg;
  cfg.eta_mut_sigma = 0.0;
  cfg.discrete_resample_prob = 0.0;
  Rng rng(12);
  for (int t = 0; t < 200; ++t) {
    const auto p = random_rule(rng);
    EXPECT_EQ(make_child(p, p, cfg, rng), p);
  }
}

TEST(Variation, CrossoverTakesEachGeneFromAParent) {
  Rng rng(13);
  int from_a = 0, total = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto a = random_rule(rng), b = random_rule(rng);
    const auto c = crossover(a, b, 0.5, rng);
    ASSERT_TRUE(c.eta == a.eta || c.eta == b.eta);
    for (std::size_t k = 0; k < kRuleOutcomes; ++k) {
      ASSERT_TRUE(c.outcomes[k] == a.outcomes[k] || c.outcomes[k] == b.outcomes[k]);
      if (a.outcomes[k] != b.outcomes[k]) {
        ++total;
        from_a += c.outcomes[k] == a.outcomes[k];
      }
    }
  }
  EXPECT_NEAR(from_a, total / 2.0, 3 * std::sqrt(total * 0.25));
}

TEST(Variation, MutationKeepsEtaInRange) {
  GAConfig cfg;
  cfg.eta_mut_sigma = 5.0;
  Rng rng(14);
  PlasticityRule r;
  for (int t = 0; t < 5000; ++t) {
    mutate(r, cfg, rng);
    ASSERT_GE(r.eta, 0.0);
    ASSERT_LT(r.eta, 1.0);
    ASSERT_TRUE(r.valid());
  }
}

TEST(Variation, ResampleRateMatches) {
  GAConfig cfg;
  cfg.eta_mut_sigma = 0.0;
  Rng rng(15);
  // A resample keeps the value with probability 1/3, so the visible change rate is 0.15 * 2/3.
  const int N = 20000;
  long changed = 0;
  for (int t = 0; t < N; ++t) {
    PlasticityRule r;
    mutate(r, cfg, rng);
    for (auto o : r.outcomes) changed += o != 0;
  }
  const double p = 0.15 * 2.0 / 3.0, n = N * 8.0;
  EXPECT_NEAR(changed, n * p, 4 * std::sqrt(n * p * (1 - p)));
}

TEST(Generation, ElitesCarriedUnchangedAndSizeConstant) {
  GAConfig cfg;
  cfg.pop_size = 6;
  cfg.elite_count = 2;
  auto pop = with_fitness({1.0, 9.0, 3.0, 9.0, -2.0, 0.5});
  Rng rng(16);
  const auto next = next_generation(pop, cfg, rng);
  ASSERT_EQ(next.size(), 6u);
  EXPECT_EQ(next[0], pop[1]);  // stable: first of the tied 9s
  EXPECT_EQ(next[1], pop[3]);
  for (std::size_t i = 2; i < next.size(); ++i) EXPECT_FALSE(next[i].evaluated());
}

TEST(Generation, UnevaluatedInputThrows) {
  GAConfig cfg;
  cfg.pop_size = 3;
  cfg.elite_count = 1;
  auto pop = with_fitness({1.0, 2.0, 3.0});
  pop[1].fitness.reset();
  Rng rng(17);
  EXPECT_THROW(next_generation(pop, cfg, rng), ContractViolation);
}

TEST(GAConfig, Validation) {
  GAConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.elite_count = 30;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = GAConfig{};
  cfg.harvest_size = 31;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = GAConfig{};
  cfg.crossover_prob = 1.5;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(RunGA, TinyRunIsMonotoneAndHarvests) {
  const auto cfg = tiny_config();
  const auto res = run_ga(cfg, 3);
  ASSERT_EQ(res.harvest.size(), cfg.harvest_size);
  ASSERT_EQ(res.history.size(), static_cast<std::size_t>(res.generations) + 1);
  for (std::size_t g = 1; g < res.history.size(); ++g) EXPECT_GE(res.history[g].best, res.history[g - 1].best);
  for (std::size_t i = 1; i < res.harvest.size(); ++i) EXPECT_GE(*res.harvest[i - 1].fitness, *res.harvest[i].fitness);
  EXPECT_DOUBLE_EQ(*res.harvest[0].fitness, res.history.back().best);
  EXPECT_EQ(res.harvest[0].rule, res.history.back().best_rule);
  if (!res.hit_generation_cap) {
    // the last stagnation_limit generations brought no improvement
    const auto& h = res.history;
    const auto n = h.size();
    ASSERT_GE(n, static_cast<std::size_t>(cfg.stagnation_limit) + 1);
    EXPECT_EQ(h[n - 1].best, h[n - 1 - static_cast<std::size_t>(cfg.stagnation_limit)].best);
  }
}

TEST(RunGA, CachedFitnessMatchesReevaluation) {
  const auto cfg = tiny_config();
  const auto res = run_ga(cfg, 4);
  for (const auto& ind : res.harvest) EXPECT_DOUBLE_EQ(evaluate(ind, cfg), *ind.fitness);
}

TEST(RunGA, ReproducibleAndJobIndependent) {
  auto cfg = tiny_config();
  const auto a = run_ga(cfg, 5);
  cfg.jobs = 3;
  const auto b = run_ga(cfg, 5);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) EXPECT_EQ(a.history[i].best, b.history[i].best);
  EXPECT_EQ(a.harvest, b.harvest);
}

TEST(RunGA, GenerationCapRespected) {
  auto cfg = tiny_config();
  cfg.max_generations = 1;
  cfg.stagnation_limit = 100;
  const auto res = run_ga(cfg, 6);
  EXPECT_TRUE(res.hit_generation_cap);
  EXPECT_EQ(res.generations, 1);
}
