#include "uqeval/bridge.hpp"

#include <unordered_set>

#include "uqeval/error.hpp"
#include "uqeval/metrics.hpp"

namespace uqeval {

FlipLabels flip_labels(std::span<const PredictionRecord> records, FlipMode mode,
                       const std::unordered_map<std::string, int>* reference) {
  if (mode == FlipMode::kMethodConsistent && reference == nullptr) {
    throw ValidationError("flip_labels: method-consistent mode needs reference predictions");
  }

  FlipLabels out;
  out.records.reserve(records.size());
  for (const auto& rec : records) {
    std::unordered_set<std::string> seen;
    for (const auto& p : rec.paraphrases) {
      if (!p.id.empty() && !seen.insert(p.id).second) {
        throw ValidationError("record '" + rec.id + "': paraphrase id '" + p.id + "' collides");
      }
    }

    int base_prediction;
    if (mode == FlipMode::kCanonical) {
      base_prediction = score(rec).predicted;
    } else {
      const auto it = reference->find(rec.id);
      if (it == reference->end()) {
        throw ValidationError("flip_labels: no reference prediction for record '" + rec.id + "'");
      }
      base_prediction = it->second;
    }

    FlipRecord flip;
    flip.id = rec.id;
    flip.n_paraphrases = static_cast<int>(rec.paraphrases.size());
    flip.mode = mode;
    if (rec.paraphrases.empty()) {
      ++out.without_paraphrases;
    } else {
      for (const auto& p : rec.paraphrases) {
        const int predicted = score_margin(p.logit_yes - p.logit_no, rec.label).predicted;
        if (predicted != base_prediction) {
          flip.flipped = 1;
          break;
        }
      }
    }
    out.records.push_back(std::move(flip));
  }
  return out;
}

BridgeReport bridge_report(std::span<const double> entropies, std::span<const FlipRecord> flips) {
  if (entropies.size() != flips.size()) {
    throw ValidationError("bridge_report: entropies and flips lengths differ");
  }

  BridgeReport report;
  std::vector<double> flipped_entropy, stable_entropy;
  for (std::size_t i = 0; i < flips.size(); ++i) {
    if (flips[i].n_paraphrases == 0) {
      ++report.n_skipped;
      continue;
    }
    (flips[i].flipped ? flipped_entropy : stable_entropy).push_back(entropies[i]);
  }
  report.n_flipped = flipped_entropy.size();
  report.n_stable = stable_entropy.size();
  const std::size_t used = report.n_flipped + report.n_stable;
  if (used == 0) throw ValidationError("bridge_report: no records carry paraphrases");

  report.flip_rate = static_cast<double>(report.n_flipped) / static_cast<double>(used);
  double sum_f = 0.0, sum_s = 0.0;
  for (double h : flipped_entropy) sum_f += h;
  for (double h : stable_entropy) sum_s += h;
  report.mean_entropy_flipped =
      report.n_flipped > 0 ? sum_f / static_cast<double>(report.n_flipped) : 0.0;
  report.mean_entropy_stable =
      report.n_stable > 0 ? sum_s / static_cast<double>(report.n_stable) : 0.0;
  report.entropy_gap = report.mean_entropy_flipped - report.mean_entropy_stable;

  if (report.n_flipped > 0 && report.n_stable > 0) {
    report.discriminative = true;
    report.flip_auroc = u_statistic(flipped_entropy, stable_entropy) /
                        (static_cast<double>(report.n_flipped) *
                         static_cast<double>(report.n_stable));
    const TestResult test = mann_whitney(flipped_entropy, stable_entropy);
    report.p_value = test.p_value;
    report.effect_size = test.effect_size;
  }
  return report;
}

}  // namespace uqeval
