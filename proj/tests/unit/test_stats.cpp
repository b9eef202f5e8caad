#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqeval/error.hpp"
#include "uqeval/numeric.hpp"
#include "uqeval/rng.hpp"
#include "uqeval/stats.hpp"

using namespace uqeval;

namespace {

// O(m*n) oracle for U with half-counted ties.
double quadratic_u(std::span<const double> u_group, std::span<const double> v_group) {
  double u = 0.0;
  for (double a : u_group) {
    for (double b : v_group) {
      if (a > b) u += 1.0;
      else if (a == b) u += 0.5;
    }
  }
  return u;
}

// Full permutation oracle for the exact two-sided p-value: enumerate every
// assignment of the pooled tie-free sample into groups of the observed sizes
// and apply the same two-tailed rule to the resulting null distribution.
double permutation_two_sided_p(std::vector<double> u_group, std::vector<double> v_group) {
  const std::size_t m = u_group.size();
  std::vector<double> pooled(u_group);
  pooled.insert(pooled.end(), v_group.begin(), v_group.end());
  std::sort(pooled.begin(), pooled.end());

  const double observed = quadratic_u(u_group, v_group);
  const double max_u = static_cast<double>(m * v_group.size());
  const double hi = std::max(observed, max_u - observed);
  const double lo = max_u - hi;

  std::vector<bool> mask(pooled.size(), false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(m), true);
  std::sort(mask.begin(), mask.end());  // prepare for next_permutation ordering

  std::size_t total = 0, extreme = 0;
  do {
    std::vector<double> a, b;
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      (mask[i] ? a : b).push_back(pooled[i]);
    }
    const double u = quadratic_u(a, b);
    ++total;
    if (u >= hi || u <= lo) ++extreme;
  } while (std::next_permutation(mask.begin(), mask.end()));
  return std::min(1.0, static_cast<double>(extreme) / static_cast<double>(total));
}

}  // namespace

TEST_CASE("constant data collapses the interval") {
  const std::vector<double> values(25, 3.5);
  BootstrapConfig config;
  config.seed = 1;
  const auto ci = bootstrap_ci(values, [](std::span<const double> v) { return mean(v); }, config);
  CHECK(ci.estimate == 3.5);
  CHECK(ci.lower == 3.5);
  CHECK(ci.upper == 3.5);
}

TEST_CASE("single replicate collapses to itself") {
  const std::vector<double> values = {1.0, 2.0, 3.0, 4.0};
  BootstrapConfig config;
  config.replicates = 1;
  config.seed = 9;
  const auto ci = bootstrap_ci(values, [](std::span<const double> v) { return mean(v); }, config);
  CHECK(ci.lower == ci.upper);
}

TEST_CASE("bootstrap is deterministic under a fixed seed") {
  Rng rng(11);
  std::vector<double> values(300);
  for (auto& v : values) v = rng.next_normal();
  BootstrapConfig config;
  config.seed = 123;
  const Statistic stat = [](std::span<const double> v) { return mean(v); };
  const auto a = bootstrap_ci(values, stat, config);
  const auto b = bootstrap_ci(values, stat, config);
  CHECK(a.lower == b.lower);
  CHECK(a.upper == b.upper);
}

TEST_CASE("CI width of the mean tracks the analytic standard error") {
  Rng rng(77);
  std::vector<double> values(10000);
  for (auto& v : values) v = rng.next_normal();
  BootstrapConfig config;
  config.seed = 5;
  const auto ci = bootstrap_ci(values, [](std::span<const double> v) { return mean(v); }, config);
  const double width = ci.upper - ci.lower;
  const double analytic = 2.0 * 1.959963984540054 / std::sqrt(10000.0);
  CHECK(width == doctest::Approx(analytic).epsilon(0.20));
}

TEST_CASE("bootstrap rejects empty input") {
  BootstrapConfig config;
  CHECK_THROWS_AS(bootstrap_ci({}, [](std::span<const double>) { return 0.0; }, config),
                  ValidationError);
}

TEST_CASE("paired test on identical series returns 1") {
  const std::vector<double> a = {0.3, 0.5, 0.7, 0.2};
  BootstrapConfig config;
  config.seed = 3;
  const double p =
      paired_bootstrap_test(a, a, [](std::span<const double> v) { return mean(v); }, config);
  CHECK(p == 1.0);
}

TEST_CASE("paired test detects clean dominance") {
  Rng rng(19);
  std::vector<double> a(200), b(200);
  for (std::size_t i = 0; i < 200; ++i) {
    const double noise = 0.01 * rng.next_normal();
    b[i] = noise;
    a[i] = noise + 5.0;  // gap far beyond the noise scale
  }
  BootstrapConfig config;
  config.seed = 4;
  const double p =
      paired_bootstrap_test(a, b, [](std::span<const double> v) { return mean(v); }, config);
  CHECK(p <= 2.0 / config.replicates);
}

TEST_CASE("single pair stays defined") {
  const std::vector<double> a = {1.0}, b = {0.0};
  BootstrapConfig config;
  config.seed = 6;
  const double p =
      paired_bootstrap_test(a, b, [](std::span<const double> v) { return mean(v); }, config);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);

  CHECK_THROWS_AS(paired_bootstrap_test(a, std::vector<double>{1.0, 2.0},
                                        [](std::span<const double> v) { return mean(v); }, config),
                  ValidationError);
}

TEST_CASE("textbook U example: [2,3] vs [1]") {
  const std::vector<double> u = {2.0, 3.0}, v = {1.0};
  const auto result = mann_whitney(u, v);
  CHECK(result.statistic == 2.0);
  CHECK(result.method == PValueMethod::kExact);
  CHECK(result.p_value == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(result.effect_size == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identical multisets show no effect") {
  const std::vector<double> u = {1.0, 2.0, 2.0, 3.0};
  const auto result = mann_whitney(u, u);
  CHECK(result.effect_size == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(result.p_value > 0.9);
  CHECK(result.method == PValueMethod::kNormalApprox);  // ties present
}

TEST_CASE("complete separation") {
  const std::vector<double> u = {10.0, 11.0, 12.0}, v = {1.0, 2.0, 3.0};
  const auto result = mann_whitney(u, v);
  CHECK(result.statistic == 9.0);
  CHECK(result.effect_size == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(result.method == PValueMethod::kExact);
  CHECK(result.p_value == doctest::Approx(0.1).epsilon(1e-12));  // 2/C(6,3)
}

TEST_CASE("exact p matches full permutation enumeration") {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 1 + rng.next_below(5);
    const std::size_t n = 1 + rng.next_below(5);
    std::vector<double> u(m), v(n);
    // distinct values so the inputs stay tie-free
    std::vector<double> grid(m + n);
    std::iota(grid.begin(), grid.end(), 1.0);
    std::vector<std::size_t> order(m + n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle_indices(order, rng);
    for (std::size_t i = 0; i < m; ++i) u[i] = grid[order[i]];
    for (std::size_t i = 0; i < n; ++i) v[i] = grid[order[m + i]];

    const auto result = mann_whitney(u, v);
    REQUIRE(result.method == PValueMethod::kExact);
    CHECK(result.statistic == quadratic_u(u, v));
    CHECK(result.p_value == doctest::Approx(permutation_two_sided_p(u, v)).epsilon(1e-12));
  }
}

TEST_CASE("normal approximation tracks the exact tail at moderate sizes") {
  Rng rng(29);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t m = 15 + rng.next_below(6);
    const std::size_t n = 15 + rng.next_below(6);
    std::vector<double> u(m), v(n);
    for (auto& x : u) x = rng.next_normal() + 0.6;
    for (auto& x : v) x = rng.next_normal();

    const auto exact = mann_whitney(u, v);
    REQUIRE(exact.method == PValueMethod::kExact);

    // Hand-rolled tie-free normal approximation with continuity correction.
    const double mn = static_cast<double>(m * n);
    const double mu = mn / 2.0;
    const double sd = std::sqrt(mn * static_cast<double>(m + n + 1) / 12.0);
    const double z = std::max(std::abs(exact.statistic - mu) - 0.5, 0.0) / sd;
    const double approx = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    CHECK(std::abs(exact.p_value - approx) < 0.02);
  }
}

TEST_CASE("large groups take the tie-corrected normal path") {
  Rng rng(31);
  std::vector<double> u(40), v(35);
  for (auto& x : u) x = std::floor(rng.next_double() * 10.0);  // heavy ties
  for (auto& x : v) x = std::floor(rng.next_double() * 10.0);
  const auto result = mann_whitney(u, v);
  CHECK(result.method == PValueMethod::kNormalApprox);
  CHECK(result.p_value >= 0.0);
  CHECK(result.p_value <= 1.0);

  const auto greater = mann_whitney(u, v, TestTail::kGreater);
  const auto less = mann_whitney(u, v, TestTail::kLess);
  CHECK(greater.p_value + less.p_value == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("mann_whitney rejects empty groups") {
  CHECK_THROWS_AS(mann_whitney({}, std::vector<double>{1.0}), ValidationError);
}

TEST_CASE("auroc extremes") {
  const std::vector<double> scores = {0.9, 0.8, 0.2, 0.1};
  const std::vector<int> labels = {1, 1, 0, 0};
  CHECK(auroc(scores, labels) == 1.0);

  const std::vector<double> flat(6, 0.5);
  const std::vector<int> mixed = {1, 0, 1, 0, 1, 0};
  CHECK(auroc(flat, mixed) == 0.5);

  CHECK_THROWS_AS(auroc(scores, std::vector<int>{1, 1, 1, 1}), ValidationError);
}

TEST_CASE("rank AUROC equals the quadratic oracle and the U identity") {
  Rng rng(37);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 20 + rng.next_below(180);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(rng.next_below(32)) / 32.0;  // ties on purpose
      labels[i] = rng.next_bernoulli(0.4) ? 1 : 0;
      (labels[i] ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) continue;

    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (labels[i] ? pos : neg).push_back(scores[i]);

    const double a = auroc(scores, labels);
    const double u = u_statistic(pos, neg);
    CHECK(a == doctest::Approx(quadratic_u(pos, neg) /
                               (static_cast<double>(pos.size()) * static_cast<double>(neg.size())))
                   .epsilon(1e-12));
    CHECK(u == quadratic_u(pos, neg));  // midranks agree with pair counting exactly
    CHECK(a == u / (static_cast<double>(pos.size()) * static_cast<double>(neg.size())));
    CHECK(mann_whitney(pos, neg).statistic == u);
  }
}

TEST_CASE("effect size is 2 AUROC - 1") {
  Rng rng(41);
  std::vector<double> u(12), v(15);
  for (auto& x : u) x = rng.next_normal() + 1.0;
  for (auto& x : v) x = rng.next_normal();
  const auto result = mann_whitney(u, v);
  std::vector<double> scores(u);
  scores.insert(scores.end(), v.begin(), v.end());
  std::vector<int> labels(u.size(), 1);
  labels.insert(labels.end(), v.size(), 0);
  CHECK(result.effect_size ==
        doctest::Approx(2.0 * auroc(scores, labels) - 1.0).epsilon(1e-12));
}
