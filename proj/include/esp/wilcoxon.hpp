#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "esp/errors.hpp"

namespace esp {

struct RankSumResult {
  double statistic = 0.0;  // rank sum of the first sample
  double z = 0.0;          // normal-approximation score, 0 on the exact path
  double p_value = 1.0;
  bool exact = false;
};

/// Midranks of the values (1-based); tied values share their average rank.
inline std::vector<double> midranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

/// Two-sided Wilcoxon rank-sum test. The exact null distribution (conditional
/// on ties) is enumerated when n + m <= exact_limit; beyond that, a normal
/// approximation with tie-corrected variance and continuity correction.
inline RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b, std::size_t exact_limit = 12) {
  if (a.empty() || b.empty()) throw ContractViolation("wilcoxon_rank_sum: both samples must be non-empty");
  const std::size_t n = a.size(), m = b.size(), total = n + m;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);

  RankSumResult res;
  res.statistic = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n), 0.0);
  if (std::all_of(pooled.begin(), pooled.end(), [&](double v) { return v == pooled.front(); })) return res;

  if (total <= exact_limit) {
    // Doubled midranks are integers, so sums can be counted exactly.
    std::vector<long> r2(total);
    for (std::size_t i = 0; i < total; ++i) r2[i] = std::lround(2.0 * ranks[i]);
    const long max_sum = std::accumulate(r2.begin(), r2.end(), 0L);
    // ways[k][s]: subsets of size k with doubled-rank sum s
    std::vector<std::vector<std::uint64_t>> ways(n + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(max_sum) + 1, 0));
    ways[0][0] = 1;
    for (std::size_t i = 0; i < total; ++i)
      for (std::size_t k = std::min(i + 1, n); k >= 1; --k)
        for (long s = max_sum; s >= r2[i]; --s) ways[k][static_cast<std::size_t>(s)] += ways[k - 1][static_cast<std::size_t>(s - r2[i])];

    const long observed = std::accumulate(r2.begin(), r2.begin() + static_cast<std::ptrdiff_t>(n), 0L);
    const long center = static_cast<long>(n * (total + 1));  // twice the null mean
    const long dev = std::labs(observed - center);
    std::uint64_t extreme = 0, count = 0;
    for (long s = 0; s <= max_sum; ++s) {
      const auto w = ways[n][static_cast<std::size_t>(s)];
      count += w;
      if (std::labs(s - center) >= dev) extreme += w;
    }
    res.exact = true;
    res.p_value = static_cast<double>(extreme) / static_cast<double>(count);
    return res;
  }

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double N = static_cast<double>(total);
  const double mu = static_cast<double>(n) * (N + 1.0) / 2.0;
  const double var = static_cast<double>(n) * static_cast<double>(m) / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (!(var > 0.0)) return res;
  const double diff = res.statistic - mu;
  const double corrected = std::max(0.0, std::fabs(diff) - 0.5);
  res.z = std::copysign(corrected / std::sqrt(var), diff);
  res.p_value = std::min(1.0, std::erfc(std::fabs(res.z) / std::sqrt(2.0)));
  return res;
}

}  // namespace esp
