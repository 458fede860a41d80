#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "esp/errors.hpp"

namespace esp {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw ContractViolation("mean of an empty sample");
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Population standard deviation (divides by n).
inline double stddev(std::span<const double> xs) {
  const double mu = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

inline double median(std::span<const double> xs) {
  if (xs.empty()) throw ContractViolation("median of an empty sample");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct Summary {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  std::size_t n = 0;
};

inline Summary summarize(std::span<const double> xs) {
  Summary s;
  s.n = xs.size();
  s.mean = mean(xs);
  s.std = stddev(xs);
  s.median = median(xs);
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

}  // namespace esp
