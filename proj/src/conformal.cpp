#include "uqeval/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "uqeval/error.hpp"

namespace uqeval {

double nonconformity(double p_yes, int label) {
  if (!(p_yes >= 0.0) || !(p_yes <= 1.0)) {
    throw ValidationError("nonconformity: p_yes outside [0,1]");
  }
  return label == 1 ? 1.0 - p_yes : p_yes;
}

ConformalModel conformal_calibrate(std::span<const double> p_yes, std::span<const int> labels,
                                   double alpha) {
  if (p_yes.size() != labels.size()) {
    throw ValidationError("conformal_calibrate: probability and label lengths differ");
  }
  if (p_yes.empty()) throw ValidationError("conformal_calibrate: empty calibration set");
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw ValidationError("conformal_calibrate: alpha outside (0,1)");
  }

  std::vector<double> scores;
  scores.reserve(p_yes.size());
  for (std::size_t i = 0; i < p_yes.size(); ++i) {
    scores.push_back(nonconformity(p_yes[i], labels[i]));
  }
  std::sort(scores.begin(), scores.end());

  const std::size_t n = scores.size();
  double level = static_cast<double>(n + 1) * (1.0 - alpha);
  // Snap near-integer products so exact ranks (e.g. 20 * 0.9 = 18) do not
  // drift up through the ceiling from floating-point rounding.
  const double nearest = std::round(level);
  if (std::abs(level - nearest) < 1e-9) level = nearest;
  const auto k = static_cast<std::size_t>(std::ceil(level));
  const std::size_t rank = std::min(std::max<std::size_t>(k, 1), n);  // clamp to the max score

  ConformalModel model;
  model.alpha = alpha;
  model.q_hat = scores[rank - 1];
  model.n_cal = n;
  return model;
}

PredictionSet conformal_predict(double p_yes, const ConformalModel& model) {
  PredictionSet set;
  set.contains_yes = nonconformity(p_yes, 1) <= model.q_hat;
  set.contains_no = nonconformity(p_yes, 0) <= model.q_hat;
  return set;
}

ConformalReport conformal_report(std::span<const PredictionSet> sets, std::span<const int> labels,
                                 const ConformalModel& model) {
  if (sets.size() != labels.size()) {
    throw ValidationError("conformal_report: set and label lengths differ");
  }
  ConformalReport report;
  if (sets.empty()) {
    report.coverage_gap = 1.0 - model.alpha;
    return report;
  }
  std::size_t covered = 0, singletons = 0, total_size = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    covered += sets[i].contains(labels[i]) ? 1 : 0;
    singletons += sets[i].size() == 1 ? 1 : 0;
    total_size += static_cast<std::size_t>(sets[i].size());
  }
  const double n = static_cast<double>(sets.size());
  report.empirical_coverage = static_cast<double>(covered) / n;
  report.mean_size = static_cast<double>(total_size) / n;
  report.singleton_fraction = static_cast<double>(singletons) / n;
  report.coverage_gap = (1.0 - model.alpha) - report.empirical_coverage;
  return report;
}

}  // namespace uqeval
