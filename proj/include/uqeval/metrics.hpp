#pragma once

#include <span>
#include <vector>

#include "uqeval/record.hpp"

namespace uqeval {

// NLL clamps probabilities to [kNllEpsilon, 1 - kNllEpsilon] so a confidently
// wrong prediction scores a large finite penalty instead of infinity.
inline constexpr double kNllEpsilon = 1e-12;
inline constexpr int kDefaultBins = 15;

double logistic(double margin);

// Shannon entropy of a Bernoulli(p) in nats, with 0 ln 0 := 0.
// Throws ValidationError outside [0, 1].
double binary_entropy(double p);

/// Derived view of one record: margin, positive-class probability, the
/// confidence max(p, 1-p), the predicted label (ties at p = 0.5 go to "Yes"),
/// predictive entropy, and correctness against the ground truth.
struct ScoredPrediction {
  double margin = 0.0;
  double probability = 0.5;
  double confidence = 0.5;
  int predicted = 1;
  double entropy = 0.0;
  int correct = 0;
};

ScoredPrediction score_margin(double margin, int label);
ScoredPrediction score(const PredictionRecord& record);

// Builds the view from an already-aggregated probability (ensemble mean,
// vote fraction). The margin is the corresponding log-odds, which may be
// infinite when p hits 0 or 1.
ScoredPrediction score_probability(double probability, int label);

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  std::size_t count = 0;
  double mean_confidence = 0.0;
  double accuracy = 0.0;
};

// Equal-width bins over [0, 1]; bins are [lo, hi) except the last, which is
// closed. Bins below confidence 0.5 simply stay empty.
std::vector<ReliabilityBin> reliability_bins(std::span<const ScoredPrediction> preds,
                                             int bins = kDefaultBins);

double ece_from_bins(std::span<const ReliabilityBin> bins, std::size_t n);

struct CalibrationMetrics {
  double ece = 0.0;
  double brier = 0.0;
  double nll = 0.0;
  double accuracy = 0.0;
};

// ECE is computed through reliability_bins, so the two agree bit-for-bit.
CalibrationMetrics calibration_metrics(std::span<const ScoredPrediction> preds,
                                       int bins = kDefaultBins);

}  // namespace uqeval
