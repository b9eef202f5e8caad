#pragma once

#include <span>
#include <string>

#include "uqeval/metrics.hpp"

namespace uqeval {

/// Scalar temperature fitted by NLL minimization on a calibration split.
/// Dividing margins by a positive temperature never changes their sign, so
/// predicted labels are preserved by construction.
struct TemperatureModel {
  double temperature = 1.0;
  std::size_t calibration_size = 0;
  double final_nll = 0.0;
  bool converged = false;
};

inline constexpr double kTemperatureMin = 0.05;
inline constexpr double kTemperatureMax = 20.0;

// Golden-section search on ln T over [ln 0.05, ln 20]; stops when the best
// NLL improves by less than 1e-9 between iterations or after 200 iterations.
// Requires both label values and at least minimum_calibration records.
TemperatureModel fit_temperature(std::span<const double> margins, std::span<const int> labels,
                                 std::size_t minimum_calibration = 20);

ScoredPrediction apply_temperature(double margin, const TemperatureModel& model, int label);

// Mean clamped NLL of sigma(margin / temperature) against the labels.
double temperature_nll(std::span<const double> margins, std::span<const int> labels,
                       double temperature);

std::string temperature_to_json(const TemperatureModel& model);
TemperatureModel temperature_from_json(const std::string& text);

}  // namespace uqeval
