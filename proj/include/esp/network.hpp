#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "esp/errors.hpp"
#include "esp/rng.hpp"

namespace esp {

/// Dense row-major matrix of weights.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  bool operator==(const Matrix&) const = default;
};

/// Fully connected feed-forward network with one hidden layer.
///
/// The last column of each weight matrix holds the bias weight; the bias
/// input is a constant 1 and takes part in plasticity like any other input.
struct Network {
  std::size_t n_in = 0;
  std::size_t n_hidden = 0;
  std::size_t n_out = 0;
  Matrix w_hidden;  // n_hidden x (n_in + 1)
  Matrix w_out;     // n_out x (n_hidden + 1)

  bool operator==(const Network&) const = default;

  bool shapes_consistent() const {
    return w_hidden.rows == n_hidden && w_hidden.cols == n_in + 1 && w_out.rows == n_out &&
           w_out.cols == n_hidden + 1 && w_hidden.data.size() == n_hidden * (n_in + 1) &&
           w_out.data.size() == n_out * (n_hidden + 1);
  }

  bool all_finite() const {
    for (double w : w_hidden.data)
      if (!std::isfinite(w)) return false;
    for (double w : w_out.data)
      if (!std::isfinite(w)) return false;
    return true;
  }
};

/// Binary activations of every layer after one forward pass.
struct ActivationRecord {
  std::vector<std::uint8_t> input_bits;
  std::vector<std::uint8_t> hidden_bits;
  std::vector<std::uint8_t> output_bits;  // one-hot at `action`
  std::vector<double> output_sums;        // real pre-activations of the output layer
  std::size_t action = 0;

  bool operator==(const ActivationRecord&) const = default;
};

/// Step activation: 1 iff the weighted sum is strictly positive.
constexpr std::uint8_t step_activation(double x) noexcept { return x > 0.0 ? 1 : 0; }

inline Network init_network(std::size_t n_in, std::size_t n_hidden, std::size_t n_out, Rng& rng) {
  if (n_in == 0 || n_hidden == 0 || n_out == 0)
    throw ConfigError("network layer sizes must all be >= 1");
  Network net;
  net.n_in = n_in;
  net.n_hidden = n_hidden;
  net.n_out = n_out;
  net.w_hidden = Matrix(n_hidden, n_in + 1);
  net.w_out = Matrix(n_out, n_hidden + 1);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (double& w : net.w_hidden.data) w = dist(rng);
  for (double& w : net.w_out.data) w = dist(rng);
  return net;
}

inline Network init_network(std::size_t n_in, std::size_t n_hidden, std::size_t n_out, std::uint64_t seed) {
  Rng rng(seed);
  return init_network(n_in, n_hidden, n_out, rng);
}

/// Forward pass writing into a reusable record (no allocation once warmed up).
/// The action is the argmax of the output sums; ties go to the lowest index.
inline void forward_into(const Network& net, std::span<const std::uint8_t> input, ActivationRecord& rec) {
  if (input.size() != net.n_in)
    throw ContractViolation("forward: input length " + std::to_string(input.size()) + " != n_in " +
                            std::to_string(net.n_in));
  rec.input_bits.assign(input.begin(), input.end());
  rec.hidden_bits.resize(net.n_hidden);
  rec.output_bits.assign(net.n_out, 0);
  rec.output_sums.resize(net.n_out);

  for (std::size_t h = 0; h < net.n_hidden; ++h) {
    const auto w = net.w_hidden.row(h);
    double sum = w[net.n_in];
    for (std::size_t i = 0; i < net.n_in; ++i)
      if (input[i]) sum += w[i];
    rec.hidden_bits[h] = step_activation(sum);
  }

  std::size_t best = 0;
  for (std::size_t o = 0; o < net.n_out; ++o) {
    const auto w = net.w_out.row(o);
    double sum = w[net.n_hidden];
    for (std::size_t h = 0; h < net.n_hidden; ++h)
      if (rec.hidden_bits[h]) sum += w[h];
    rec.output_sums[o] = sum;
    if (sum > rec.output_sums[best]) best = o;
  }
  rec.action = best;
  rec.output_bits[best] = 1;
}

inline ActivationRecord forward(const Network& net, std::span<const std::uint8_t> input) {
  ActivationRecord rec;
  forward_into(net, input, rec);
  return rec;
}

}  // namespace esp
