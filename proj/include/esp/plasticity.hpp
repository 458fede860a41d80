#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "esp/errors.hpp"
#include "esp/network.hpp"

namespace esp {

/// Task-level reinforcement gating plasticity: punishment, neutral or reward.
enum class Modulation : std::int8_t { Punish = -1, Neutral = 0, Reward = 1 };

constexpr int to_int(Modulation m) noexcept { return static_cast<int>(m); }

inline Modulation modulation_from_int(int v) {
  if (v < -1 || v > 1) throw ContractViolation("modulation must be in {-1, 0, +1}");
  return static_cast<Modulation>(v);
}

inline constexpr std::size_t kRuleOutcomes = 8;
inline constexpr std::size_t kRuleSpaceSize = 6561;  // 3^8 discrete patterns

/// Evolved plasticity rule: a learning rate plus the weight-change sign for
/// each (modulation, pre, post) state.
///
/// Outcome order: the four m = -1 states (pre,post) = 00, 01, 10, 11 followed
/// by the same four states for m = +1.
struct PlasticityRule {
  double eta = 0.0;
  std::array<std::int8_t, kRuleOutcomes> outcomes{};

  static constexpr std::size_t index(Modulation m, std::uint8_t pre, std::uint8_t post) noexcept {
    return (m == Modulation::Reward ? 4u : 0u) + 2u * (pre ? 1u : 0u) + (post ? 1u : 0u);
  }

  bool valid() const noexcept {
    if (!(eta >= 0.0 && eta < 1.0)) return false;
    for (auto o : outcomes)
      if (o < -1 || o > 1) return false;
    return true;
  }

  /// Base-3 code of the discrete part in [0, 6561); outcome k contributes (o+1)·3^k.
  std::size_t pattern_code() const noexcept {
    std::size_t code = 0;
    for (std::size_t k = kRuleOutcomes; k-- > 0;) code = code * 3 + static_cast<std::size_t>(outcomes[k] + 1);
    return code;
  }

  static PlasticityRule from_pattern_code(std::size_t code, double eta) {
    if (code >= kRuleSpaceSize) throw ContractViolation("pattern code out of range");
    PlasticityRule r;
    r.eta = eta;
    for (std::size_t k = 0; k < kRuleOutcomes; ++k) {
      r.outcomes[k] = static_cast<std::int8_t>(static_cast<int>(code % 3) - 1);
      code /= 3;
    }
    return r;
  }

  bool operator==(const PlasticityRule&) const = default;
};

/// Weight-change sign for one synapse; m must be non-zero.
inline int lookup(const PlasticityRule& rule, Modulation m, std::uint8_t pre, std::uint8_t post) {
  if (m == Modulation::Neutral) throw ContractViolation("lookup called with m = 0; caller must skip the update");
  return rule.outcomes[PlasticityRule::index(m, pre, post)];
}

namespace detail {
inline std::atomic<std::uint64_t>& update_call_counter() {
  static std::atomic<std::uint64_t> counter{0};
  return counter;
}

// Adds eta * outcome to every incoming weight of each post neuron, then
// rescales the full incoming vector to unit L2 norm. Returns the number of
// neurons whose vector was exactly zero and therefore left unnormalized.
inline std::size_t update_layer(Matrix& w, std::span<const std::uint8_t> pre_bits,
                                std::span<const std::uint8_t> post_bits, const std::array<double, 4>& delta) {
  std::size_t degenerate = 0;
  const std::size_t n_pre = pre_bits.size();
  for (std::size_t i = 0; i < w.rows; ++i) {
    auto row = w.row(i);
    const std::size_t post = post_bits[i] ? 1 : 0;
    const double d0 = delta[post];      // pre inactive
    const double d1 = delta[2 + post];  // pre active
    double norm2 = 0.0;
    for (std::size_t j = 0; j < n_pre; ++j) {
      row[j] += pre_bits[j] ? d1 : d0;
      norm2 += row[j] * row[j];
    }
    row[n_pre] += d1;  // bias input is always active
    norm2 += row[n_pre] * row[n_pre];
    if (norm2 == 0.0) {
      ++degenerate;
      continue;
    }
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& x : row) x *= inv;
  }
  return degenerate;
}
}  // namespace detail

/// Number of apply_update calls made with m != 0 in this process.
inline std::uint64_t plasticity_update_calls() noexcept {
  return detail::update_call_counter().load(std::memory_order_relaxed);
}

/// In-place plasticity step. With m = 0 the network is untouched; otherwise
/// every synapse of both layers changes by eta * lookup(rule, m, pre, post)
/// and each neuron's incoming vector (bias included) is normalized.
/// Returns the count of degenerate (all-zero) incoming vectors.
inline std::size_t apply_update_in_place(Network& net, const ActivationRecord& acts, Modulation m,
                                         const PlasticityRule& rule) {
  if (m == Modulation::Neutral) return 0;
  if (acts.input_bits.size() != net.n_in || acts.hidden_bits.size() != net.n_hidden ||
      acts.output_bits.size() != net.n_out)
    throw ContractViolation("apply_update: activation record does not match network shape");
  detail::update_call_counter().fetch_add(1, std::memory_order_relaxed);

  const std::size_t base = PlasticityRule::index(m, 0, 0);
  std::array<double, 4> delta{};
  for (std::size_t k = 0; k < 4; ++k) delta[k] = rule.eta * rule.outcomes[base + k];

  std::size_t degenerate = detail::update_layer(net.w_hidden, acts.input_bits, acts.hidden_bits, delta);
  degenerate += detail::update_layer(net.w_out, acts.hidden_bits, acts.output_bits, delta);
  return degenerate;
}

struct UpdateResult {
  Network net;
  std::size_t degenerate_neurons = 0;
};

inline UpdateResult apply_update(Network net, const ActivationRecord& acts, Modulation m, const PlasticityRule& rule) {
  const std::size_t degenerate = apply_update_in_place(net, acts, m, rule);
  return {std::move(net), degenerate};
}

}  // namespace esp
