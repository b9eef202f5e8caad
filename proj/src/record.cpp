#include "uqeval/record.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "uqeval/error.hpp"
#include "uqeval/numeric.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {
namespace {

using nlohmann::json;

const std::unordered_set<std::string>& known_fields() {
  static const std::unordered_set<std::string> fields = {
      "id", "dataset", "logit_yes", "logit_no", "label",
      "paraphrases", "passes", "members", "corruption"};
  return fields;
}

double require_finite(const json& obj, const char* key, std::size_t line) {
  if (!obj.contains(key)) {
    throw ParseError("line " + std::to_string(line) + ": missing required field '" + key + "'");
  }
  const json& v = obj.at(key);
  if (!v.is_number()) {
    throw ParseError("line " + std::to_string(line) + ": field '" + key + "' is not a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x)) {
    throw ValidationError("line " + std::to_string(line) + ": field '" + key + "' is not finite");
  }
  return x;
}

PredictionRecord parse_line(const json& obj, std::size_t line, ParseStats& stats) {
  if (!obj.is_object()) {
    throw ParseError("line " + std::to_string(line) + ": record is not an object");
  }
  PredictionRecord rec;
  if (!obj.contains("id") || !obj.at("id").is_string()) {
    throw ParseError("line " + std::to_string(line) + ": missing required field 'id'");
  }
  rec.id = obj.at("id").get<std::string>();
  rec.dataset = obj.value("dataset", std::string{});
  rec.logit_yes = require_finite(obj, "logit_yes", line);
  rec.logit_no = require_finite(obj, "logit_no", line);

  if (!obj.contains("label") || !obj.at("label").is_number_integer()) {
    throw ParseError("line " + std::to_string(line) + ": missing required field 'label'");
  }
  rec.label = obj.at("label").get<int>();
  if (rec.label != 0 && rec.label != 1) {
    throw ValidationError("line " + std::to_string(line) + ": label must be 0 or 1");
  }

  if (obj.contains("paraphrases")) {
    for (const json& p : obj.at("paraphrases")) {
      ParaphraseLogits pl;
      pl.id = p.value("id", std::string{});
      pl.logit_yes = require_finite(p, "logit_yes", line);
      pl.logit_no = require_finite(p, "logit_no", line);
      rec.paraphrases.push_back(std::move(pl));
    }
  }
  if (obj.contains("passes")) {
    for (const json& p : obj.at("passes")) {
      if (!p.is_array() || p.size() != 2) {
        throw ParseError("line " + std::to_string(line) + ": pass entry must be [logit_yes, logit_no]");
      }
      const double zy = p.at(0).get<double>();
      const double zn = p.at(1).get<double>();
      if (!std::isfinite(zy) || !std::isfinite(zn)) {
        throw ValidationError("line " + std::to_string(line) + ": pass logits must be finite");
      }
      rec.passes.push_back({zy, zn});
    }
  }
  if (obj.contains("members")) {
    for (const json& m : obj.at("members")) {
      MemberLogits ml;
      if (!m.contains("seed") || !m.at("seed").is_number_integer()) {
        throw ParseError("line " + std::to_string(line) + ": member entry missing integer 'seed'");
      }
      ml.seed = m.at("seed").get<std::int64_t>();
      ml.logit_yes = require_finite(m, "logit_yes", line);
      ml.logit_no = require_finite(m, "logit_no", line);
      rec.members.push_back(std::move(ml));
    }
  }
  if (obj.contains("corruption") && !obj.at("corruption").is_null()) {
    const json& c = obj.at("corruption");
    CorruptionTag tag;
    tag.kind = c.value("kind", std::string{});
    tag.severity = c.value("severity", 0);
    rec.corruption = std::move(tag);
  }

  for (const auto& item : obj.items()) {
    if (known_fields().count(item.key()) == 0) ++stats.unknown_fields;
  }
  return rec;
}

json to_json(const PredictionRecord& rec) {
  json obj;
  obj["id"] = rec.id;
  if (!rec.dataset.empty()) obj["dataset"] = rec.dataset;
  obj["logit_yes"] = rec.logit_yes;
  obj["logit_no"] = rec.logit_no;
  obj["label"] = rec.label;
  if (!rec.paraphrases.empty()) {
    json arr = json::array();
    for (const auto& p : rec.paraphrases) {
      arr.push_back({{"id", p.id}, {"logit_yes", p.logit_yes}, {"logit_no", p.logit_no}});
    }
    obj["paraphrases"] = std::move(arr);
  }
  if (!rec.passes.empty()) {
    json arr = json::array();
    for (const auto& p : rec.passes) arr.push_back({p[0], p[1]});
    obj["passes"] = std::move(arr);
  }
  if (!rec.members.empty()) {
    json arr = json::array();
    for (const auto& m : rec.members) {
      arr.push_back({{"seed", m.seed}, {"logit_yes", m.logit_yes}, {"logit_no", m.logit_no}});
    }
    obj["members"] = std::move(arr);
  }
  if (rec.corruption) {
    obj["corruption"] = {{"kind", rec.corruption->kind}, {"severity", rec.corruption->severity}};
  }
  return obj;
}

}  // namespace

std::vector<PredictionRecord> read_records(std::istream& in, ParseStats* stats) {
  ParseStats local;
  ParseStats& st = stats != nullptr ? *stats : local;
  std::vector<PredictionRecord> records;
  std::unordered_map<std::string, std::size_t> first_line_of_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      // covers syntax errors and number overflow alike
      throw ParseError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    PredictionRecord rec = parse_line(obj, line_no, st);
    auto [it, inserted] = first_line_of_id.emplace(rec.id, line_no);
    if (!inserted) {
      throw ValidationError("duplicate id '" + rec.id + "' on lines " +
                            std::to_string(it->second) + " and " + std::to_string(line_no));
    }
    records.push_back(std::move(rec));
    ++st.lines;
  }
  return records;
}

std::vector<PredictionRecord> read_records_file(const std::string& path, ParseStats* stats) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open record file: " + path);
  return read_records(in, stats);
}

void write_records(std::ostream& out, std::span<const PredictionRecord> records) {
  for (const auto& rec : records) {
    out << to_json(rec).dump() << '\n';
  }
}

void write_records_file(const std::string& path, std::span<const PredictionRecord> records) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file: " + path);
  write_records(out, records);
}

Split split_calibration(std::span<const PredictionRecord> records, const SplitSpec& spec) {
  const std::size_t n = records.size();
  if (n == 0) throw ValidationError("split_calibration: no records");
  if (spec.calibration_fraction <= 0.0 || spec.calibration_fraction >= 1.0) {
    throw ValidationError("split_calibration: calibration_fraction must lie in (0,1)");
  }
  const std::size_t wanted = static_cast<std::size_t>(
      round_half_up(spec.calibration_fraction * static_cast<double>(n)));
  const std::size_t n_cal = std::max(wanted, spec.minimum_calibration);
  if (n_cal + 1 > n) {
    throw ValidationError("split_calibration: " + std::to_string(n) +
                          " records cannot provide " + std::to_string(n_cal) +
                          " calibration records and leave an evaluation record");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(spec.seed);
  shuffle_indices(order, rng);

  Split split;
  split.calibration.reserve(n_cal);
  split.evaluation.reserve(n - n_cal);
  for (std::size_t i = 0; i < n; ++i) {
    const PredictionRecord& rec = records[order[i]];
    (i < n_cal ? split.calibration : split.evaluation).push_back(rec);
  }
  return split;
}

std::vector<PredictionRecord> filter_by_dataset(std::span<const PredictionRecord> records,
                                                const std::string& tag) {
  std::vector<PredictionRecord> out;
  for (const auto& rec : records) {
    if (rec.dataset == tag) out.push_back(rec);
  }
  return out;
}

std::vector<PredictionRecord> filter_by_corruption(std::span<const PredictionRecord> records,
                                                   const std::string& kind) {
  std::vector<PredictionRecord> out;
  for (const auto& rec : records) {
    if (rec.corruption && rec.corruption->kind == kind) out.push_back(rec);
  }
  return out;
}

void check_member_alignment(std::span<const PredictionRecord> records) {
  if (records.empty()) return;
  const auto& reference = records.front().members;
  for (const auto& rec : records) {
    if (rec.members.size() != reference.size()) {
      throw ValidationError("record '" + rec.id + "' has " + std::to_string(rec.members.size()) +
                            " members, expected " + std::to_string(reference.size()));
    }
    for (std::size_t k = 0; k < reference.size(); ++k) {
      if (rec.members[k].seed != reference[k].seed) {
        throw ValidationError("record '" + rec.id + "' member order differs at position " +
                              std::to_string(k));
      }
    }
  }
}

}  // namespace uqeval
