#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace uqeval {

struct RiskCoveragePoint {
  double coverage = 0.0;
  double selective_risk = 0.0;    // error rate among retained records
  double generalized_risk = 0.0;  // selective_risk * coverage
  double threshold = 0.0;         // score of the last retained record
};

/// Prefix curve over records sorted by score descending (ties keep input
/// order). One point per prefix length 1..n; the last point is full coverage.
struct RiskCoverageCurve {
  std::vector<RiskCoveragePoint> points;
  std::size_t n = 0;
};

RiskCoverageCurve risk_coverage(std::span<const double> scores, std::span<const int> correct);

// Discrete estimators: unweighted means of the prefix risks.
double aurc(const RiskCoverageCurve& curve);
double augrc(const RiskCoverageCurve& curve);

// Largest prefix coverage whose selective risk stays within alpha; 0 if none.
double coverage_at_risk(const RiskCoverageCurve& curve, double alpha);

struct SweepRow {
  double coverage = 0.0;
  std::size_t n_retained = 0;
  double tau = 0.0;  // largest retained entropy
  double error_rate = 0.0;
  double flip_rate = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::size_t skipped = 0;  // coverage levels whose retained set was empty
};

// For each coverage c, retains the round(c*n) lowest-entropy records and
// reports the error and paraphrase-flip rates over the retained set.
SweepResult joint_threshold_sweep(std::span<const double> entropies,
                                  std::span<const int> correct,
                                  std::span<const int> flipped,
                                  std::span<const double> coverage_grid);

enum class GateTier { kSinglePass, kMultiPass };

struct GateConfig {
  double entropy_threshold = 0.0;  // in [0, ln 2]
  GateTier tier = GateTier::kSinglePass;
};

enum class GateDecision { kAnswer, kAbstain };

struct GateOutcome {
  GateDecision decision = GateDecision::kAnswer;
  double probability = 0.5;
  double entropy = 0.0;
};

// Abstains iff entropy strictly exceeds the threshold.
GateOutcome abstain_gate(double probability, double entropy, const GateConfig& config);

}  // namespace uqeval
