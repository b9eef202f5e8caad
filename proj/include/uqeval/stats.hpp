#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace uqeval {

struct BootstrapConfig {
  int replicates = 2000;
  std::uint64_t seed = 0;
  double ci_level = 0.95;
};

struct BootstrapCi {
  double estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

using Statistic = std::function<double(std::span<const double>)>;

// Percentile bootstrap: seeded resamples with replacement, interval at the
// (1 +- ci_level)/2 percentiles (linear interpolation between order
// statistics). Deterministic given the seed; replicate r uses a stream
// derived from (seed, r), so a parallel evaluation would reproduce it.
BootstrapCi bootstrap_ci(std::span<const double> values, const Statistic& statistic,
                         const BootstrapConfig& config);

// Index-resampling variant for metrics that need more per-record state than
// a single real (ECE, AURC through a closure over the record table).
using IndexStatistic = std::function<double(std::span<const std::size_t>)>;
BootstrapCi bootstrap_ci_indexed(std::size_t n, const IndexStatistic& statistic,
                                 const BootstrapConfig& config);

// Two-sided paired test: resamples pair indices jointly and returns
// p = 2 min(P(delta <= 0), P(delta >= 0)) clamped to [0, 1], where delta is
// statistic(a*) - statistic(b*) per replicate.
double paired_bootstrap_test(std::span<const double> a, std::span<const double> b,
                             const Statistic& statistic, const BootstrapConfig& config);
double paired_bootstrap_test_indexed(std::size_t n, const IndexStatistic& statistic_a,
                                     const IndexStatistic& statistic_b,
                                     const BootstrapConfig& config);

enum class PValueMethod { kExact, kNormalApprox };
enum class TestTail { kTwoSided, kGreater, kLess };

struct TestResult {
  double statistic = 0.0;   // U, with ties counted 1/2
  double p_value = 1.0;
  double effect_size = 0.0; // rank-biserial, 2 AUROC - 1
  PValueMethod method = PValueMethod::kNormalApprox;
};

// U = #{(i,j): u_i > v_j} + (1/2)#{u_i = v_j}, computed via midranks.
double u_statistic(std::span<const double> u_group, std::span<const double> v_group);

// Exact p by enumerating the U null distribution (recurrence over ranks)
// when both groups have at most 20 tie-free observations; otherwise the
// normal approximation with tie-corrected variance and 0.5 continuity
// correction.
TestResult mann_whitney(std::span<const double> u_group, std::span<const double> v_group,
                        TestTail tail = TestTail::kTwoSided);

// Rank-based AUROC with ties counted 1/2: U / (n_pos * n_neg). Both classes
// must be present.
double auroc(std::span<const double> scores, std::span<const int> positives);

}  // namespace uqeval
