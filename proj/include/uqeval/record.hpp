#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace uqeval {

struct ParaphraseLogits {
  std::string id;
  double logit_yes = 0.0;
  double logit_no = 0.0;

  bool operator==(const ParaphraseLogits&) const = default;
};

struct MemberLogits {
  std::int64_t seed = 0;
  double logit_yes = 0.0;
  double logit_no = 0.0;

  bool operator==(const MemberLogits&) const = default;
};

struct CorruptionTag {
  std::string kind;
  int severity = 0;

  bool operator==(const CorruptionTag&) const = default;
};

/// One logged question instance: yes/no logits, the ground-truth label, and
/// whatever optional evidence the inference run captured (paraphrase logits,
/// stochastic passes, ensemble members). Optional lists may be empty; each
/// downstream operation declares which ones it needs.
struct PredictionRecord {
  std::string id;
  std::string dataset;
  double logit_yes = 0.0;  // logit of "Yes"
  double logit_no = 0.0;   // logit of "No"
  int label = 0;           // 1 = "Yes"
  std::vector<ParaphraseLogits> paraphrases;
  std::vector<std::array<double, 2>> passes;  // [logit_yes, logit_no]
  std::vector<MemberLogits> members;
  std::optional<CorruptionTag> corruption;

  double margin() const { return logit_yes - logit_no; }

  bool operator==(const PredictionRecord&) const = default;
};

struct ParseStats {
  std::size_t lines = 0;
  std::size_t unknown_fields = 0;  // fields ignored with a warning counter
};

// JSON Lines, one record per line. Throws ParseError with the offending line
// number; duplicate ids raise ValidationError naming both lines.
std::vector<PredictionRecord> read_records(std::istream& in, ParseStats* stats = nullptr);
std::vector<PredictionRecord> read_records_file(const std::string& path, ParseStats* stats = nullptr);

void write_records(std::ostream& out, std::span<const PredictionRecord> records);
void write_records_file(const std::string& path, std::span<const PredictionRecord> records);

struct SplitSpec {
  double calibration_fraction = 0.15;
  std::size_t minimum_calibration = 20;
  std::uint64_t seed = 0;
};

struct Split {
  std::vector<PredictionRecord> calibration;
  std::vector<PredictionRecord> evaluation;
};

// Seeded uniform shuffle, then prefix take of
// max(round(fraction * n), minimum_calibration) records. Fails if fewer than
// one evaluation record would remain.
Split split_calibration(std::span<const PredictionRecord> records, const SplitSpec& spec);

std::vector<PredictionRecord> filter_by_dataset(std::span<const PredictionRecord> records,
                                                const std::string& tag);
std::vector<PredictionRecord> filter_by_corruption(std::span<const PredictionRecord> records,
                                                   const std::string& kind);

// Throws ValidationError unless every record carries the same member seed
// sequence (ensemble operations assume aligned columns).
void check_member_alignment(std::span<const PredictionRecord> records);

}  // namespace uqeval
