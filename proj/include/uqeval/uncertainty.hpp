#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "uqeval/metrics.hpp"
#include "uqeval/record.hpp"

namespace uqeval {

/// Entropy split for a set of per-sample probabilities: total is the entropy
/// of the mean, aleatoric the mean of the per-sample entropies, epistemic the
/// mutual information between prediction and sample index (their difference).
struct UncertaintyDecomposition {
  double mean_probability = 0.5;
  double total = 0.0;
  double aleatoric = 0.0;
  double epistemic = 0.0;
  double ratio = 0.0;  // epistemic / total; 0 when total is 0
};

// Requires at least two samples; a single draw has no decomposition.
// Identical samples yield epistemic == 0 exactly.
UncertaintyDecomposition decompose(std::span<const double> probabilities);

enum class AggregationStrategy { kProbabilityAverage, kLogitAverage, kMajorityVote };

// Accepts "prob", "logit", "vote".
AggregationStrategy aggregation_from_name(std::string_view name);
std::string_view aggregation_name(AggregationStrategy strategy);

// Collapses member logits into one ScoredPrediction. Majority vote predicts
// the modal label (ties toward "Yes") with the raw "Yes" vote fraction as its
// probability.
ScoredPrediction aggregate(std::span<const std::array<double, 2>> member_logits,
                           AggregationStrategy strategy, int label);

// Per-sample probabilities for decompose(): logistic of each margin.
std::vector<double> member_probabilities(std::span<const std::array<double, 2>> member_logits);
std::vector<double> member_probabilities(std::span<const MemberLogits> members);

// Entry (i, j) = fraction of records where members i and j predict
// differently. Rows of the input are records; columns are members.
std::vector<std::vector<double>> disagreement_matrix(
    const std::vector<std::vector<int>>& per_member_predictions);

struct MemberDiagnostics {
  std::int64_t seed = 0;
  double accuracy = 0.0;
  double ece = 0.0;
  double brier = 0.0;
  double nll = 0.0;
  double aurc = 0.0;
};

// Evaluates each ensemble member on its own logits across the record set.
// All records must carry the same member seed ordering.
std::vector<MemberDiagnostics> member_diagnostics(std::span<const PredictionRecord> records);

}  // namespace uqeval
