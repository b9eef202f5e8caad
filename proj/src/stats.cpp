#include "uqeval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqeval/error.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {
namespace {

double percentile(std::vector<double> sorted, double q) {
  // Linear interpolation between order statistics (the common "type 7" rule).
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = static_cast<std::size_t>(std::ceil(pos));
  if (lo == hi) return sorted[lo];
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

std::vector<double> bootstrap_distribution(std::size_t n, const IndexStatistic& statistic,
                                           const BootstrapConfig& config) {
  if (n == 0) throw ValidationError("bootstrap: empty input");
  if (config.replicates < 1) throw ValidationError("bootstrap: replicates must be >= 1");
  std::vector<double> replicates;
  replicates.reserve(static_cast<std::size_t>(config.replicates));
  std::vector<std::size_t> indices(n);
  for (int r = 0; r < config.replicates; ++r) {
    Rng rng(Rng::derive_seed(config.seed, static_cast<std::uint64_t>(r)));
    for (auto& idx : indices) idx = static_cast<std::size_t>(rng.next_below(n));
    replicates.push_back(statistic(indices));
  }
  return replicates;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / 1.4142135623730951); }

}  // namespace

BootstrapCi bootstrap_ci(std::span<const double> values, const Statistic& statistic,
                         const BootstrapConfig& config) {
  std::vector<double> buffer(values.size());
  const IndexStatistic indexed = [&](std::span<const std::size_t> indices) {
    for (std::size_t i = 0; i < indices.size(); ++i) buffer[i] = values[indices[i]];
    return statistic(buffer);
  };
  BootstrapCi ci = bootstrap_ci_indexed(values.size(), indexed, config);
  ci.estimate = statistic(values);
  return ci;
}

BootstrapCi bootstrap_ci_indexed(std::size_t n, const IndexStatistic& statistic,
                                 const BootstrapConfig& config) {
  if (!(config.ci_level > 0.0) || !(config.ci_level < 1.0)) {
    throw ValidationError("bootstrap: ci_level outside (0,1)");
  }
  std::vector<double> replicates = bootstrap_distribution(n, statistic, config);
  std::sort(replicates.begin(), replicates.end());
  const double tail = (1.0 - config.ci_level) / 2.0;

  BootstrapCi ci;
  std::vector<std::size_t> identity(n);
  std::iota(identity.begin(), identity.end(), std::size_t{0});
  ci.estimate = statistic(identity);
  ci.lower = percentile(replicates, tail);
  ci.upper = percentile(std::move(replicates), 1.0 - tail);
  return ci;
}

double paired_bootstrap_test(std::span<const double> a, std::span<const double> b,
                             const Statistic& statistic, const BootstrapConfig& config) {
  if (a.size() != b.size()) throw ValidationError("paired_bootstrap_test: unpaired inputs");
  std::vector<double> buffer_a(a.size()), buffer_b(b.size());
  const IndexStatistic stat_a = [&](std::span<const std::size_t> indices) {
    for (std::size_t i = 0; i < indices.size(); ++i) buffer_a[i] = a[indices[i]];
    return statistic(buffer_a);
  };
  const IndexStatistic stat_b = [&](std::span<const std::size_t> indices) {
    for (std::size_t i = 0; i < indices.size(); ++i) buffer_b[i] = b[indices[i]];
    return statistic(buffer_b);
  };
  return paired_bootstrap_test_indexed(a.size(), stat_a, stat_b, config);
}

double paired_bootstrap_test_indexed(std::size_t n, const IndexStatistic& statistic_a,
                                     const IndexStatistic& statistic_b,
                                     const BootstrapConfig& config) {
  const IndexStatistic delta = [&](std::span<const std::size_t> indices) {
    return statistic_a(indices) - statistic_b(indices);
  };
  const std::vector<double> deltas = bootstrap_distribution(n, delta, config);
  std::size_t non_positive = 0, non_negative = 0;
  for (double d : deltas) {
    if (d <= 0.0) ++non_positive;
    if (d >= 0.0) ++non_negative;
  }
  const double total = static_cast<double>(deltas.size());
  const double p = 2.0 * std::min(static_cast<double>(non_positive) / total,
                                  static_cast<double>(non_negative) / total);
  return std::clamp(p, 0.0, 1.0);
}

double u_statistic(std::span<const double> u_group, std::span<const double> v_group) {
  if (u_group.empty() || v_group.empty()) {
    throw ValidationError("u_statistic: both groups must be non-empty");
  }
  const std::size_t m = u_group.size();
  const std::size_t total = m + v_group.size();

  std::vector<std::pair<double, bool>> pooled;  // value, belongs to u group
  pooled.reserve(total);
  for (double v : u_group) pooled.emplace_back(v, true);
  for (double v : v_group) pooled.emplace_back(v, false);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Midranks: tied values share the average of their rank range.
  double rank_sum_u = 0.0;
  std::size_t i = 0;
  while (i < total) {
    std::size_t j = i;
    while (j + 1 < total && pooled[j + 1].first == pooled[i].first) ++j;
    const double midrank = static_cast<double>(i + 1 + j + 1) / 2.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (pooled[k].second) rank_sum_u += midrank;
    }
    i = j + 1;
  }
  return rank_sum_u - static_cast<double>(m) * static_cast<double>(m + 1) / 2.0;
}

namespace {

constexpr std::size_t kExactLimit = 20;

// Null distribution of U for tie-free groups: counts[u] = number of rank
// arrangements with statistic exactly u, u = 0..m*n. Recurrence on the
// largest pooled value: c(i, j, u) = c(i-1, j, u-j) + c(i, j-1, u). All
// counts fit in uint64 for m, n <= 20 (total C(40, 20) ~ 1.4e11).
std::vector<std::uint64_t> exact_u_counts(std::size_t m, std::size_t n) {
  const std::size_t max_u = m * n;
  std::vector<std::vector<std::uint64_t>> dp(m + 1, std::vector<std::uint64_t>(max_u + 1, 0));
  for (std::size_t i = 0; i <= m; ++i) dp[i][0] = 1;  // j = 0 level
  for (std::size_t j = 1; j <= n; ++j) {
    // In-place level update: dp[i-1] is already at level j when row i reads
    // it, while dp[i][u] still holds the level j-1 value.
    for (std::size_t i = 1; i <= m; ++i) {
      for (std::size_t u = 1; u <= max_u; ++u) {
        dp[i][u] += u >= j ? dp[i - 1][u - j] : 0;
      }
    }
  }
  return dp[m];
}

double exact_two_sided_p(double u, std::size_t m, std::size_t n) {
  const auto counts = exact_u_counts(m, n);
  const double max_u = static_cast<double>(m * n);
  const double hi = std::max(u, max_u - u);
  const double lo = max_u - hi;
  std::uint64_t total = 0, extreme = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    const double uk = static_cast<double>(k);
    if (uk >= hi || uk <= lo) extreme += counts[k];
  }
  return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(total));
}

double exact_one_sided_p(double u, std::size_t m, std::size_t n, bool greater) {
  const auto counts = exact_u_counts(m, n);
  std::uint64_t total = 0, tail = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    total += counts[k];
    const double uk = static_cast<double>(k);
    if ((greater && uk >= u) || (!greater && uk <= u)) tail += counts[k];
  }
  return std::min(1.0, static_cast<double>(tail) / static_cast<double>(total));
}

bool has_ties(std::span<const double> u_group, std::span<const double> v_group) {
  std::vector<double> pooled(u_group.begin(), u_group.end());
  pooled.insert(pooled.end(), v_group.begin(), v_group.end());
  std::sort(pooled.begin(), pooled.end());
  return std::adjacent_find(pooled.begin(), pooled.end()) != pooled.end();
}

double tie_sum(std::span<const double> u_group, std::span<const double> v_group) {
  std::vector<double> pooled(u_group.begin(), u_group.end());
  pooled.insert(pooled.end(), v_group.begin(), v_group.end());
  std::sort(pooled.begin(), pooled.end());
  double sum = 0.0;
  std::size_t i = 0;
  while (i < pooled.size()) {
    std::size_t j = i;
    while (j + 1 < pooled.size() && pooled[j + 1] == pooled[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    sum += t * t * t - t;
    i = j + 1;
  }
  return sum;
}

}  // namespace

TestResult mann_whitney(std::span<const double> u_group, std::span<const double> v_group,
                        TestTail tail) {
  const std::size_t m = u_group.size();
  const std::size_t n = v_group.size();
  if (m == 0 || n == 0) throw ValidationError("mann_whitney: both groups must be non-empty");

  TestResult result;
  result.statistic = u_statistic(u_group, v_group);
  const double mn = static_cast<double>(m) * static_cast<double>(n);
  result.effect_size = 2.0 * result.statistic / mn - 1.0;

  const bool tied = has_ties(u_group, v_group);
  if (m <= kExactLimit && n <= kExactLimit && !tied) {
    result.method = PValueMethod::kExact;
    switch (tail) {
      case TestTail::kTwoSided:
        result.p_value = exact_two_sided_p(result.statistic, m, n);
        break;
      case TestTail::kGreater:
        result.p_value = exact_one_sided_p(result.statistic, m, n, true);
        break;
      case TestTail::kLess:
        result.p_value = exact_one_sided_p(result.statistic, m, n, false);
        break;
    }
    return result;
  }

  result.method = PValueMethod::kNormalApprox;
  const double total = static_cast<double>(m + n);
  const double mu = mn / 2.0;
  double variance = mn / 12.0 * (total + 1.0);
  if (tied && total > 1.0) {
    variance = mn / 12.0 * (total + 1.0 - tie_sum(u_group, v_group) / (total * (total - 1.0)));
  }
  if (variance <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double sd = std::sqrt(variance);
  constexpr double kContinuity = 0.5;
  switch (tail) {
    case TestTail::kTwoSided: {
      const double z = std::max(std::abs(result.statistic - mu) - kContinuity, 0.0) / sd;
      result.p_value = std::min(1.0, 2.0 * normal_sf(z));
      break;
    }
    case TestTail::kGreater:
      result.p_value = normal_sf((result.statistic - mu - kContinuity) / sd);
      break;
    case TestTail::kLess:
      result.p_value = normal_sf((mu - result.statistic - kContinuity) / sd);
      break;
  }
  return result;
}

double auroc(std::span<const double> scores, std::span<const int> positives) {
  if (scores.size() != positives.size()) {
    throw ValidationError("auroc: score and label lengths differ");
  }
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    (positives[i] ? pos : neg).push_back(scores[i]);
  }
  if (pos.empty() || neg.empty()) {
    throw ValidationError("auroc: both classes must be present");
  }
  return u_statistic(pos, neg) / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

}  // namespace uqeval
