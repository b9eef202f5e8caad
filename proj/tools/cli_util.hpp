#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "uqeval/error.hpp"
#include "uqeval/metrics.hpp"
#include "uqeval/record.hpp"
#include "uqeval/temperature.hpp"
#include "uqeval/uncertainty.hpp"

namespace uqeval::cli {

// Fixed-width float formatting keeps report files byte-stable across runs.
inline std::string fmt_fixed(double value, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
  return buf;
}

inline std::string fmt_general(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::span<const std::string> header)
      : out_(path) {
    if (!out_) throw Error("cannot open output file: " + path.string());
    write_row_strings(header);
  }

  void write_row_strings(std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  void write_row(std::initializer_list<std::string> cells) {
    write_row_strings(std::vector<std::string>(cells));
  }

 private:
  std::ofstream out_;
};

struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> outputs;
};

inline void write_manifest(const std::filesystem::path& out_dir, const Manifest& manifest) {
  nlohmann::json obj;
  obj["command"] = manifest.command;
  obj["inputs"] = manifest.inputs;
  obj["seed"] = manifest.seed;
  obj["config"] = manifest.config;
  obj["version"] = UQEVAL_VERSION;
  obj["outputs"] = manifest.outputs;
  std::ofstream out(out_dir / "manifest.json");
  if (!out) throw Error("cannot open manifest: " + (out_dir / "manifest.json").string());
  out << obj.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Method registry: maps method names onto the scoring pipeline.

struct MethodOutput {
  std::vector<ScoredPrediction> preds;
  std::vector<double> selective_score;  // ranking key for risk-coverage
  std::string label;
};

inline ScoredPrediction score_mcdrop(const PredictionRecord& rec) {
  if (rec.passes.empty()) {
    throw ValidationError("record '" + rec.id + "': field 'passes' required for method mcdrop");
  }
  const auto probs = member_probabilities(rec.passes);
  double sum = 0.0;
  for (double p : probs) sum += p;
  return score_probability(sum / static_cast<double>(probs.size()), rec.label);
}

inline ScoredPrediction score_ensemble(const PredictionRecord& rec,
                                       AggregationStrategy strategy) {
  if (rec.members.empty()) {
    throw ValidationError("record '" + rec.id + "': field 'members' required for method ensemble");
  }
  std::vector<std::array<double, 2>> logits;
  logits.reserve(rec.members.size());
  for (const auto& m : rec.members) logits.push_back({m.logit_yes, m.logit_no});
  return aggregate(logits, strategy, rec.label);
}

// Scores every record with the requested method. `temperature` must be
// present for method "temp"; callers fit it on a calibration split first.
inline MethodOutput run_method(std::span<const PredictionRecord> records,
                               const std::string& method, AggregationStrategy strategy,
                               const std::optional<TemperatureModel>& temperature) {
  MethodOutput out;
  out.label = method == "ensemble"
                  ? method + "[" + std::string(aggregation_name(strategy)) + "]"
                  : method;
  out.preds.reserve(records.size());
  out.selective_score.reserve(records.size());
  for (const auto& rec : records) {
    ScoredPrediction s;
    if (method == "softmax" || method == "margin") {
      s = score(rec);
    } else if (method == "temp") {
      if (!temperature) throw ValidationError("method temp requires a fitted temperature");
      s = apply_temperature(rec.margin(), *temperature, rec.label);
    } else if (method == "mcdrop") {
      s = score_mcdrop(rec);
    } else if (method == "ensemble") {
      s = score_ensemble(rec, strategy);
    } else {
      throw ValidationError("unknown method: " + method);
    }
    out.preds.push_back(s);
    out.selective_score.push_back(method == "margin" ? std::abs(s.margin) : s.confidence);
  }
  return out;
}

inline std::vector<double> parse_real_list(const std::string& text, const char* flag) {
  std::vector<double> values;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) continue;
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ValidationError(std::string(flag) + ": cannot parse '" + token + "'");
    }
  }
  if (values.empty()) throw ValidationError(std::string(flag) + ": empty list");
  return values;
}

}  // namespace uqeval::cli
