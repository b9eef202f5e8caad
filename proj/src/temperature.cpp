#include "uqeval/temperature.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "uqeval/error.hpp"

namespace uqeval {

double temperature_nll(std::span<const double> margins, std::span<const int> labels,
                       double temperature) {
  double nll = 0.0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    const double p = std::clamp(logistic(margins[i] / temperature), kNllEpsilon, 1.0 - kNllEpsilon);
    nll -= labels[i] == 1 ? std::log(p) : std::log(1.0 - p);
  }
  return nll / static_cast<double>(margins.size());
}

TemperatureModel fit_temperature(std::span<const double> margins, std::span<const int> labels,
                                 std::size_t minimum_calibration) {
  if (margins.size() != labels.size()) {
    throw ValidationError("fit_temperature: margins and labels lengths differ");
  }
  if (margins.size() < minimum_calibration) {
    throw ValidationError("fit_temperature: " + std::to_string(margins.size()) +
                          " records, need at least " + std::to_string(minimum_calibration));
  }
  const bool has_positive = std::find(labels.begin(), labels.end(), 1) != labels.end();
  const bool has_negative = std::find(labels.begin(), labels.end(), 0) != labels.end();
  if (!has_positive || !has_negative) {
    throw ValidationError("fit_temperature: calibration labels are single-class");
  }

  const auto objective = [&](double log_t) {
    return temperature_nll(margins, labels, std::exp(log_t));
  };

  // Golden-section over ln T; the NLL is unimodal in T for this one-parameter
  // family, so the bracket always contains the minimizer. Individual
  // iterations may fail to improve min(f1, f2) while the bracket is still
  // wide, so the improvement criterion only applies once the bracket is
  // narrow enough that the incumbent probe pins the minimum.
  constexpr double kInvPhi = 0.6180339887498949;
  constexpr int kMaxIterations = 200;
  constexpr double kNllTolerance = 1e-9;
  constexpr double kBracketGuard = 1e-3;   // in ln T
  constexpr double kBracketResolved = 1e-12;

  double lo = std::log(kTemperatureMin);
  double hi = std::log(kTemperatureMax);
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  double best = std::min(f1, f2);
  bool converged = false;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = objective(x2);
    }
    const double current = std::min(f1, f2);  // never increases
    const double width = hi - lo;
    if ((best - current < kNllTolerance && width < kBracketGuard) ||
        width < kBracketResolved) {
      best = current;
      converged = true;
      break;
    }
    best = current;
  }

  TemperatureModel model;
  model.temperature = std::exp(0.5 * (lo + hi));
  model.calibration_size = margins.size();
  model.final_nll = temperature_nll(margins, labels, model.temperature);
  model.converged = converged;

  // The search cannot beat the identity temperature by less than it finds;
  // if numerics ever disagree, keep T = 1 so scaling never hurts the
  // objective it minimizes.
  const double nll_identity = temperature_nll(margins, labels, 1.0);
  if (model.final_nll > nll_identity) {
    model.temperature = 1.0;
    model.final_nll = nll_identity;
  }
  return model;
}

ScoredPrediction apply_temperature(double margin, const TemperatureModel& model, int label) {
  if (!(model.temperature > 0.0)) {
    throw ValidationError("apply_temperature: temperature must be positive");
  }
  return score_margin(margin / model.temperature, label);
}

std::string temperature_to_json(const TemperatureModel& model) {
  nlohmann::json obj;
  obj["temperature"] = model.temperature;
  obj["calibration_size"] = model.calibration_size;
  obj["final_nll"] = model.final_nll;
  obj["converged"] = model.converged;
  return obj.dump(2);
}

TemperatureModel temperature_from_json(const std::string& text) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("temperature model: malformed JSON: ") + e.what());
  }
  TemperatureModel model;
  model.temperature = obj.at("temperature").get<double>();
  model.calibration_size = obj.value("calibration_size", std::size_t{0});
  model.final_nll = obj.value("final_nll", 0.0);
  model.converged = obj.value("converged", true);
  if (!(model.temperature >= kTemperatureMin) || !(model.temperature <= kTemperatureMax)) {
    throw ValidationError("temperature model: temperature outside [0.05, 20]");
  }
  return model;
}

}  // namespace uqeval
