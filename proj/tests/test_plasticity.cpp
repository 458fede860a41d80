#include <gtest/gtest.h>

#include <set>

#include "esp/catalog.hpp"
#include "esp/plasticity.hpp"
#include "oracles.hpp"

using namespace esp;

namespace {
ActivationRecord acts_for(const Network& n, std::vector<std::uint8_t> in) { return forward(n, in); }
}  // namespace

TEST(Rule, PatternSpaceIsBijective) {
  std::set<std::array<std::int8_t, 8>> seen;
  for (std::size_t code = 0; code < kRuleSpaceSize; ++code) {
    const auto r = PlasticityRule::from_pattern_code(code, 0.5);
    ASSERT_TRUE(r.valid());
    ASSERT_EQ(r.pattern_code(), code);
    seen.insert(r.outcomes);
  }
  EXPECT_EQ(seen.size(), 6561u);
  EXPECT_THROW(PlasticityRule::from_pattern_code(6561, 0.1), ContractViolation);
}

TEST(Rule, Validity) {
  PlasticityRule r;
  EXPECT_TRUE(r.valid());
  r.eta = 1.0;
  EXPECT_FALSE(r.valid());
  r.eta = 0.3;
  r.outcomes[3] = 2;
  EXPECT_FALSE(r.valid());
}

TEST(Lookup, ExhaustiveAgainstGenotype) {
  // 6561 patterns x 8 (m, pre, post) states
  for (std::size_t code = 0; code < kRuleSpaceSize; ++code) {
    const auto r = PlasticityRule::from_pattern_code(code, 0.1);
    std::size_t k = 0;
    for (int m : {-1, 1})
      for (int pre = 0; pre < 2; ++pre)
        for (int post = 0; post < 2; ++post) {
          const int expect = static_cast<int>((code / [&] {
                                                 std::size_t p = 1;
                                                 for (std::size_t i = 0; i < k; ++i) p *= 3;
                                                 return p;
                                               }()) % 3) - 1;
          ASSERT_EQ(lookup(r, modulation_from_int(m), static_cast<std::uint8_t>(pre), static_cast<std::uint8_t>(post)), expect);
          ++k;
        }
  }
}

TEST(Lookup, PublishedRules) {
  const auto id1 = catalog_rule(TaskKind::Foraging, 1);
  EXPECT_EQ(lookup(id1, Modulation::Punish, 1, 0), 1);
  EXPECT_EQ(lookup(id1, Modulation::Punish, 1, 1), -1);
  for (std::uint8_t pre = 0; pre < 2; ++pre)
    for (std::uint8_t post = 0; post < 2; ++post) EXPECT_EQ(lookup(id1, Modulation::Reward, pre, post), 0);
  const auto id18 = catalog_rule(TaskKind::Foraging, 18);
  EXPECT_EQ(lookup(id18, Modulation::Reward, 1, 1), 1);
  EXPECT_EQ(lookup(id18, Modulation::Punish, 1, 1), -1);
}

TEST(Lookup, NeutralIsContractViolation) {
  EXPECT_THROW(lookup(PlasticityRule{}, Modulation::Neutral, 0, 0), ContractViolation);
  EXPECT_THROW(modulation_from_int(2), ContractViolation);
}

TEST(Update, ZeroRuleOnlyNormalizes) {
  Network n = init_network(1, 1, 1, 1);
  n.w_hidden(0, 0) = 3.0;
  n.w_hidden(0, 1) = 4.0;
  const auto acts = acts_for(n, {1});
  apply_update_in_place(n, acts, Modulation::Punish, PlasticityRule{0.3, {}});
  EXPECT_NEAR(n.w_hidden(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(n.w_hidden(0, 1), 0.8, 1e-15);
}

TEST(Update, ScalarWeightNormalizesToOne) {
  // One post neuron with a single incoming weight: build a layer directly.
  Matrix w(1, 1, 0.2);
  const std::vector<std::uint8_t> pre{}, post{1};
  std::array<double, 4> delta{0, 0, 0, 0.5};  // bias is the only (active) input
  EXPECT_EQ(detail::update_layer(w, pre, post, delta), 0u);
  EXPECT_DOUBLE_EQ(w(0, 0), 1.0);
}

TEST(Update, NeutralLeavesNetworkBitIdentical) {
  Network n = init_network(6, 20, 3, 9);
  const Network before = n;
  const auto acts = acts_for(n, {1, 0, 0, 1, 0, 0});
  const auto calls = plasticity_update_calls();
  EXPECT_EQ(apply_update_in_place(n, acts, Modulation::Neutral, catalog_rule(TaskKind::Foraging, 1)), 0u);
  EXPECT_EQ(n, before);
  EXPECT_EQ(plasticity_update_calls(), calls);
}

TEST(Update, ZeroRuleIdempotent) {
  Network n = init_network(6, 20, 3, 4);
  const auto acts = acts_for(n, {0, 1, 0, 0, 1, 1});
  const PlasticityRule zero{0.5, {}};
  const Network once = apply_update(n, acts, Modulation::Reward, zero).net;
  const Network twice = apply_update(once, acts, Modulation::Reward, zero).net;
  for (std::size_t i = 0; i < once.w_hidden.data.size(); ++i) EXPECT_NEAR(once.w_hidden.data[i], twice.w_hidden.data[i], 1e-15);
  for (std::size_t i = 0; i < once.w_out.data.size(); ++i) EXPECT_NEAR(once.w_out.data[i], twice.w_out.data[i], 1e-15);
}

TEST(Update, MatchesBruteForceAndNormsAreUnit) {
  Rng rng(123);
  for (int t = 0; t < 500; ++t) {
    const auto n_in = uniform_int<std::size_t>(rng, 1, 8), n_h = uniform_int<std::size_t>(rng, 1, 6);
    Network n = init_network(n_in, n_h, 3, rng);
    std::vector<std::uint8_t> in(n_in);
    for (auto& b : in) b = static_cast<std::uint8_t>(uniform_int(rng, 0, 1));
    const auto rule = PlasticityRule::from_pattern_code(uniform_int<std::size_t>(rng, 0, 6560), uniform01(rng));
    const int m = uniform_int(rng, -1, 1);
    const Network expect = oracle::update(n, in, m, rule);
    const auto res = apply_update(n, forward(n, in), modulation_from_int(m), rule);
    for (std::size_t i = 0; i < expect.w_hidden.data.size(); ++i) ASSERT_NEAR(res.net.w_hidden.data[i], expect.w_hidden.data[i], 1e-12);
    for (std::size_t i = 0; i < expect.w_out.data.size(); ++i) ASSERT_NEAR(res.net.w_out.data[i], expect.w_out.data[i], 1e-12);
    if (m != 0 && res.degenerate_neurons == 0) {
      for (std::size_t r = 0; r < n_h; ++r) ASSERT_NEAR(oracle::row_norm(res.net.w_hidden, r), 1.0, 1e-9);
      for (std::size_t r = 0; r < 3; ++r) ASSERT_NEAR(oracle::row_norm(res.net.w_out, r), 1.0, 1e-9);
    }
  }
}

TEST(Update, DegenerateVectorLeftAndCounted) {
  Network n = init_network(1, 1, 1, 1);
  n.w_hidden(0, 0) = 0.0;
  n.w_hidden(0, 1) = 0.0;
  const auto acts = acts_for(n, {0});  // hidden off, output 0 on
  const auto res = apply_update(n, acts, Modulation::Punish, PlasticityRule{0.5, {}});
  EXPECT_EQ(res.degenerate_neurons, 1u);
  EXPECT_EQ(res.net.w_hidden(0, 0), 0.0);
  EXPECT_EQ(res.net.w_hidden(0, 1), 0.0);
}

TEST(Update, ShapeMismatchThrows) {
  Network n = init_network(6, 20, 3, 1);
  ActivationRecord bogus;
  EXPECT_THROW(apply_update_in_place(n, bogus, Modulation::Reward, PlasticityRule{}), ContractViolation);
}

TEST(Update, CounterCountsNonNeutralCalls) {
  Network n = init_network(6, 5, 3, 1);
  const auto acts = acts_for(n, {0, 0, 0, 0, 0, 0});
  const auto before = plasticity_update_calls();
  apply_update_in_place(n, acts, Modulation::Reward, PlasticityRule{});
  apply_update_in_place(n, acts, Modulation::Punish, PlasticityRule{});
  EXPECT_EQ(plasticity_update_calls(), before + 2);
}
