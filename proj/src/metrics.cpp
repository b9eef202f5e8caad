#include "uqeval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "uqeval/error.hpp"

namespace uqeval {

double logistic(double margin) { return 1.0 / (1.0 + std::exp(-margin)); }

double binary_entropy(double p) {
  if (!(p >= 0.0) || !(p <= 1.0)) {
    throw ValidationError("binary_entropy: probability outside [0,1]");
  }
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

namespace {

ScoredPrediction from_margin_probability(double margin, double p, int label) {
  ScoredPrediction s;
  s.margin = margin;
  s.probability = p;
  s.confidence = std::max(p, 1.0 - p);
  s.predicted = p >= 0.5 ? 1 : 0;
  s.entropy = binary_entropy(p);
  s.correct = s.predicted == label ? 1 : 0;
  return s;
}

}  // namespace

ScoredPrediction score_margin(double margin, int label) {
  return from_margin_probability(margin, logistic(margin), label);
}

ScoredPrediction score(const PredictionRecord& record) {
  return score_margin(record.margin(), record.label);
}

ScoredPrediction score_probability(double probability, int label) {
  if (!(probability >= 0.0) || !(probability <= 1.0)) {
    throw ValidationError("score_probability: probability outside [0,1]");
  }
  const double margin = std::log(probability) - std::log1p(-probability);
  return from_margin_probability(margin, probability, label);
}

std::vector<ReliabilityBin> reliability_bins(std::span<const ScoredPrediction> preds, int bins) {
  if (bins < 1) throw ValidationError("reliability_bins: need at least one bin");
  const double width = 1.0 / bins;
  std::vector<ReliabilityBin> out(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    out[b].lower = b * width;
    out[b].upper = b + 1 == bins ? 1.0 : (b + 1) * width;
  }
  std::vector<double> conf_sum(bins, 0.0);
  std::vector<std::size_t> correct_sum(bins, 0);
  for (const auto& p : preds) {
    int b = static_cast<int>(p.confidence * bins);
    b = std::clamp(b, 0, bins - 1);  // confidence 1.0 lands in the last bin
    ++out[b].count;
    conf_sum[b] += p.confidence;
    correct_sum[b] += static_cast<std::size_t>(p.correct);
  }
  for (int b = 0; b < bins; ++b) {
    if (out[b].count > 0) {
      out[b].mean_confidence = conf_sum[b] / static_cast<double>(out[b].count);
      out[b].accuracy = static_cast<double>(correct_sum[b]) / static_cast<double>(out[b].count);
    }
  }
  return out;
}

double ece_from_bins(std::span<const ReliabilityBin> bins, std::size_t n) {
  if (n == 0) return 0.0;
  double ece = 0.0;
  for (const auto& bin : bins) {
    if (bin.count == 0) continue;
    ece += static_cast<double>(bin.count) / static_cast<double>(n) *
           std::abs(bin.accuracy - bin.mean_confidence);
  }
  return ece;
}

CalibrationMetrics calibration_metrics(std::span<const ScoredPrediction> preds, int bins) {
  if (preds.empty()) throw ValidationError("calibration_metrics: empty input");
  const auto bin_table = reliability_bins(preds, bins);

  CalibrationMetrics m;
  m.ece = ece_from_bins(bin_table, preds.size());
  double brier = 0.0, nll = 0.0;
  std::size_t correct = 0;
  for (const auto& p : preds) {
    // Recover the label: it equals the prediction exactly when correct.
    const double y = static_cast<double>(p.correct ? p.predicted : 1 - p.predicted);
    const double d = p.probability - y;
    brier += d * d;
    const double pc = std::clamp(p.probability, kNllEpsilon, 1.0 - kNllEpsilon);
    nll -= y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc);
    correct += static_cast<std::size_t>(p.correct);
  }
  const double n = static_cast<double>(preds.size());
  m.brier = brier / n;
  m.nll = nll / n;
  m.accuracy = static_cast<double>(correct) / n;
  return m;
}

}  // namespace uqeval
