#include "uqeval/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "uqeval/error.hpp"
#include "uqeval/selective.hpp"

namespace uqeval {

UncertaintyDecomposition decompose(std::span<const double> probabilities) {
  if (probabilities.size() < 2) {
    throw ValidationError("decompose: need at least two probability samples");
  }
  bool constant = true;
  double sum = 0.0, entropy_sum = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !(p <= 1.0)) {
      throw ValidationError("decompose: probability outside [0,1]");
    }
    constant = constant && p == probabilities.front();
    sum += p;
    entropy_sum += binary_entropy(p);
  }
  const double count = static_cast<double>(probabilities.size());

  UncertaintyDecomposition d;
  // For constant inputs the mean is taken as the shared value so that the
  // epistemic term is exactly zero rather than rounding noise.
  d.mean_probability = constant ? probabilities.front() : sum / count;
  d.total = binary_entropy(d.mean_probability);
  d.aleatoric = constant ? d.total : entropy_sum / count;
  d.epistemic = d.total - d.aleatoric;
  d.ratio = d.total > 0.0 ? d.epistemic / d.total : 0.0;
  return d;
}

AggregationStrategy aggregation_from_name(std::string_view name) {
  if (name == "prob") return AggregationStrategy::kProbabilityAverage;
  if (name == "logit") return AggregationStrategy::kLogitAverage;
  if (name == "vote") return AggregationStrategy::kMajorityVote;
  throw ValidationError("unknown aggregation strategy: " + std::string(name));
}

std::string_view aggregation_name(AggregationStrategy strategy) {
  switch (strategy) {
    case AggregationStrategy::kProbabilityAverage: return "prob";
    case AggregationStrategy::kLogitAverage: return "logit";
    case AggregationStrategy::kMajorityVote: return "vote";
  }
  return "?";
}

std::vector<double> member_probabilities(std::span<const std::array<double, 2>> member_logits) {
  std::vector<double> probs;
  probs.reserve(member_logits.size());
  for (const auto& logits : member_logits) {
    probs.push_back(logistic(logits[0] - logits[1]));
  }
  return probs;
}

std::vector<double> member_probabilities(std::span<const MemberLogits> members) {
  std::vector<double> probs;
  probs.reserve(members.size());
  for (const auto& m : members) probs.push_back(logistic(m.logit_yes - m.logit_no));
  return probs;
}

ScoredPrediction aggregate(std::span<const std::array<double, 2>> member_logits,
                           AggregationStrategy strategy, int label) {
  if (member_logits.empty()) throw ValidationError("aggregate: empty member list");
  switch (strategy) {
    case AggregationStrategy::kProbabilityAverage: {
      double sum = 0.0;
      for (const auto& logits : member_logits) sum += logistic(logits[0] - logits[1]);
      return score_probability(sum / static_cast<double>(member_logits.size()), label);
    }
    case AggregationStrategy::kLogitAverage: {
      double sum = 0.0;
      for (const auto& logits : member_logits) sum += logits[0] - logits[1];
      return score_margin(sum / static_cast<double>(member_logits.size()), label);
    }
    case AggregationStrategy::kMajorityVote: {
      std::size_t yes = 0;
      for (const auto& logits : member_logits) {
        yes += logistic(logits[0] - logits[1]) >= 0.5 ? 1 : 0;
      }
      const double fraction =
          static_cast<double>(yes) / static_cast<double>(member_logits.size());
      // score_probability predicts from the vote fraction, which matches the
      // modal label with ties (fraction 0.5) broken toward "Yes".
      return score_probability(fraction, label);
    }
  }
  throw ValidationError("aggregate: unknown strategy");
}

std::vector<std::vector<double>> disagreement_matrix(
    const std::vector<std::vector<int>>& per_member_predictions) {
  if (per_member_predictions.empty()) {
    throw ValidationError("disagreement_matrix: no records");
  }
  const std::size_t members = per_member_predictions.front().size();
  for (const auto& row : per_member_predictions) {
    if (row.size() != members) throw ValidationError("disagreement_matrix: ragged input");
  }
  if (members == 0) throw ValidationError("disagreement_matrix: no members");

  const double n = static_cast<double>(per_member_predictions.size());
  std::vector<std::vector<double>> matrix(members, std::vector<double>(members, 0.0));
  for (std::size_t i = 0; i < members; ++i) {
    for (std::size_t j = i + 1; j < members; ++j) {
      std::size_t differ = 0;
      for (const auto& row : per_member_predictions) {
        differ += row[i] != row[j] ? 1 : 0;
      }
      matrix[i][j] = matrix[j][i] = static_cast<double>(differ) / n;
    }
  }
  return matrix;
}

std::vector<MemberDiagnostics> member_diagnostics(std::span<const PredictionRecord> records) {
  if (records.empty()) throw ValidationError("member_diagnostics: no records");
  check_member_alignment(records);
  const std::size_t members = records.front().members.size();
  if (members == 0) throw ValidationError("member_diagnostics: records carry no members");

  std::vector<MemberDiagnostics> out;
  out.reserve(members);
  for (std::size_t k = 0; k < members; ++k) {
    std::vector<ScoredPrediction> preds;
    std::vector<double> scores;
    std::vector<int> correct;
    preds.reserve(records.size());
    for (const auto& rec : records) {
      const auto& m = rec.members[k];
      preds.push_back(score_margin(m.logit_yes - m.logit_no, rec.label));
      scores.push_back(preds.back().confidence);
      correct.push_back(preds.back().correct);
    }
    const CalibrationMetrics cm = calibration_metrics(preds);
    MemberDiagnostics d;
    d.seed = records.front().members[k].seed;
    d.accuracy = cm.accuracy;
    d.ece = cm.ece;
    d.brier = cm.brier;
    d.nll = cm.nll;
    d.aurc = aurc(risk_coverage(scores, correct));
    out.push_back(d);
  }
  return out;
}

}  // namespace uqeval
