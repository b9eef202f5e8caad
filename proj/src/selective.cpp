#include "uqeval/selective.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "uqeval/error.hpp"
#include "uqeval/numeric.hpp"

namespace uqeval {

RiskCoverageCurve risk_coverage(std::span<const double> scores, std::span<const int> correct) {
  if (scores.size() != correct.size()) {
    throw ValidationError("risk_coverage: scores and correctness lengths differ");
  }
  if (scores.empty()) throw ValidationError("risk_coverage: empty input");

  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RiskCoverageCurve curve;
  curve.n = n;
  curve.points.reserve(n);
  std::size_t errors = 0;
  for (std::size_t k = 0; k < n; ++k) {
    errors += correct[order[k]] ? 0 : 1;
    RiskCoveragePoint pt;
    pt.coverage = static_cast<double>(k + 1) / static_cast<double>(n);
    pt.selective_risk = static_cast<double>(errors) / static_cast<double>(k + 1);
    pt.generalized_risk = pt.selective_risk * pt.coverage;
    pt.threshold = scores[order[k]];
    curve.points.push_back(pt);
  }
  return curve;
}

double aurc(const RiskCoverageCurve& curve) {
  double sum = 0.0;
  for (const auto& pt : curve.points) sum += pt.selective_risk;
  return curve.points.empty() ? 0.0 : sum / static_cast<double>(curve.points.size());
}

double augrc(const RiskCoverageCurve& curve) {
  double sum = 0.0;
  for (const auto& pt : curve.points) sum += pt.generalized_risk;
  return curve.points.empty() ? 0.0 : sum / static_cast<double>(curve.points.size());
}

double coverage_at_risk(const RiskCoverageCurve& curve, double alpha) {
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw ValidationError("coverage_at_risk: alpha outside [0,1]");
  }
  double best = 0.0;
  for (const auto& pt : curve.points) {
    if (pt.selective_risk <= alpha) best = std::max(best, pt.coverage);
  }
  return best;
}

SweepResult joint_threshold_sweep(std::span<const double> entropies,
                                  std::span<const int> correct,
                                  std::span<const int> flipped,
                                  std::span<const double> coverage_grid) {
  const std::size_t n = entropies.size();
  if (correct.size() != n || flipped.size() != n) {
    throw ValidationError("joint_threshold_sweep: input lengths differ");
  }
  if (n == 0) throw ValidationError("joint_threshold_sweep: empty input");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return entropies[a] < entropies[b]; });

  SweepResult result;
  for (double c : coverage_grid) {
    if (!(c > 0.0) || !(c <= 1.0)) {
      throw ValidationError("joint_threshold_sweep: coverage outside (0,1]");
    }
    const std::size_t retained = static_cast<std::size_t>(
        std::min<std::int64_t>(round_half_up(c * static_cast<double>(n)),
                               static_cast<std::int64_t>(n)));
    if (retained == 0) {
      ++result.skipped;
      continue;
    }
    std::size_t errors = 0, flips = 0;
    for (std::size_t k = 0; k < retained; ++k) {
      errors += correct[order[k]] ? 0 : 1;
      flips += flipped[order[k]] ? 1 : 0;
    }
    SweepRow row;
    row.coverage = c;
    row.n_retained = retained;
    row.tau = entropies[order[retained - 1]];
    row.error_rate = static_cast<double>(errors) / static_cast<double>(retained);
    row.flip_rate = static_cast<double>(flips) / static_cast<double>(retained);
    result.rows.push_back(row);
  }
  return result;
}

GateOutcome abstain_gate(double probability, double entropy, const GateConfig& config) {
  constexpr double kMaxEntropy = 0.6931471805599453;  // ln 2
  if (!(config.entropy_threshold >= 0.0) || config.entropy_threshold > kMaxEntropy + 1e-12) {
    throw ValidationError("abstain_gate: threshold outside [0, ln 2]");
  }
  GateOutcome out;
  out.probability = probability;
  out.entropy = entropy;
  out.decision =
      entropy > config.entropy_threshold ? GateDecision::kAbstain : GateDecision::kAnswer;
  return out;
}

}  // namespace uqeval
