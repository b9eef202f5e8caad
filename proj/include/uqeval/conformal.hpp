#pragma once

#include <span>
#include <vector>

namespace uqeval {

// APS nonconformity for the binary case: 1 - p_yes when the label is "Yes",
// p_yes otherwise.
double nonconformity(double p_yes, int label);

struct ConformalModel {
  double alpha = 0.1;
  double q_hat = 0.0;
  std::size_t n_cal = 0;
};

// q_hat is the k-th smallest calibration score, k = ceil((n+1)(1-alpha)),
// clamped to the largest score when k exceeds n.
ConformalModel conformal_calibrate(std::span<const double> p_yes, std::span<const int> labels,
                                   double alpha);

struct PredictionSet {
  bool contains_yes = false;
  bool contains_no = false;

  int size() const { return (contains_yes ? 1 : 0) + (contains_no ? 1 : 0); }
  bool contains(int label) const { return label == 1 ? contains_yes : contains_no; }
};

// A label enters the set when its nonconformity stays within q_hat. Empty
// sets are possible when q_hat < 0.5 and are reported as size 0.
PredictionSet conformal_predict(double p_yes, const ConformalModel& model);

struct ConformalReport {
  double empirical_coverage = 0.0;
  double mean_size = 0.0;
  double singleton_fraction = 0.0;
  double coverage_gap = 0.0;  // (1 - alpha) - empirical
};

ConformalReport conformal_report(std::span<const PredictionSet> sets, std::span<const int> labels,
                                 const ConformalModel& model);

}  // namespace uqeval
