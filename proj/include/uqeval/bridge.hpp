#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "uqeval/record.hpp"
#include "uqeval/stats.hpp"

namespace uqeval {

enum class FlipMode { kCanonical, kMethodConsistent };

struct FlipRecord {
  std::string id;
  int flipped = 0;
  int n_paraphrases = 0;
  FlipMode mode = FlipMode::kCanonical;
};

struct FlipLabels {
  std::vector<FlipRecord> records;
  std::size_t without_paraphrases = 0;  // forced to flipped = 0
};

// Canonical mode compares each paraphrase's single-pass prediction against
// the record's own single-pass prediction; method-consistent mode compares
// against the supplied per-id reference predictions. Paraphrases are always
// scored single-pass. Records without paraphrases cannot flip.
FlipLabels flip_labels(std::span<const PredictionRecord> records, FlipMode mode,
                       const std::unordered_map<std::string, int>* reference = nullptr);

struct BridgeReport {
  double flip_rate = 0.0;
  double mean_entropy_flipped = 0.0;
  double mean_entropy_stable = 0.0;
  double entropy_gap = 0.0;  // flipped minus stable
  double flip_auroc = 0.0;
  double p_value = 1.0;
  double effect_size = 0.0;
  bool discriminative = false;  // false when either flip class is empty
  std::size_t n_flipped = 0;
  std::size_t n_stable = 0;
  std::size_t n_skipped = 0;  // records without paraphrases
};

// entropies[i] belongs to flips[i]. Records without paraphrases are skipped
// from every denominator. When only one flip class remains, the report
// carries the group means but flags auroc/p/effect as unavailable.
BridgeReport bridge_report(std::span<const double> entropies, std::span<const FlipRecord> flips);

}  // namespace uqeval
