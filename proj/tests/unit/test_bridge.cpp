#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "uqeval/bridge.hpp"
#include "uqeval/error.hpp"
#include "uqeval/metrics.hpp"
#include "uqeval/rng.hpp"
#include "uqeval/synth.hpp"
#include "uqeval/temperature.hpp"

using namespace uqeval;

namespace {

PredictionRecord make_record(const std::string& id, double margin,
                             std::vector<double> paraphrase_margins) {
  PredictionRecord rec;
  rec.id = id;
  rec.logit_yes = margin;
  rec.logit_no = 0.0;
  rec.label = 1;
  int j = 0;
  for (double m : paraphrase_margins) {
    rec.paraphrases.push_back({id + "/p" + std::to_string(j++), m, 0.0});
  }
  return rec;
}

}  // namespace

TEST_CASE("agreeing paraphrases do not flip") {
  const std::vector<PredictionRecord> records = {make_record("a", 2.0, {1.5, 3.0})};
  const auto flips = flip_labels(records, FlipMode::kCanonical);
  REQUIRE(flips.records.size() == 1);
  CHECK(flips.records[0].flipped == 0);
  CHECK(flips.records[0].n_paraphrases == 2);
  CHECK(flips.without_paraphrases == 0);
}

TEST_CASE("one disagreeing paraphrase flips") {
  const std::vector<PredictionRecord> records = {make_record("a", 2.0, {1.5, -0.5})};
  const auto flips = flip_labels(records, FlipMode::kCanonical);
  CHECK(flips.records[0].flipped == 1);
}

TEST_CASE("records without paraphrases are forced stable and counted") {
  const std::vector<PredictionRecord> records = {make_record("a", 2.0, {})};
  const auto flips = flip_labels(records, FlipMode::kCanonical);
  CHECK(flips.records[0].flipped == 0);
  CHECK(flips.records[0].n_paraphrases == 0);
  CHECK(flips.without_paraphrases == 1);
}

TEST_CASE("method-consistent mode needs a reference") {
  const std::vector<PredictionRecord> records = {make_record("a", 2.0, {1.0})};
  CHECK_THROWS_AS(flip_labels(records, FlipMode::kMethodConsistent), ValidationError);

  std::unordered_map<std::string, int> reference;  // missing the id
  CHECK_THROWS_AS(flip_labels(records, FlipMode::kMethodConsistent, &reference),
                  ValidationError);

  reference["a"] = 0;  // reference disagrees with every paraphrase
  const auto flips = flip_labels(records, FlipMode::kMethodConsistent, &reference);
  CHECK(flips.records[0].flipped == 1);
}

TEST_CASE("paraphrase id collisions are detected") {
  auto rec = make_record("a", 2.0, {1.0, 1.0});
  rec.paraphrases[1].id = rec.paraphrases[0].id;
  const std::vector<PredictionRecord> records = {rec};
  CHECK_THROWS_AS(flip_labels(records, FlipMode::kCanonical), ValidationError);
}

TEST_CASE("canonical labels are invariant to argmax-preserving rescoring") {
  SynthConfig config;
  config.n = 300;
  config.seed = 51;
  config.paraphrase_count = 4;
  config.paraphrase_jitter = 1.0;
  const auto records = generate(config);

  const auto canonical = flip_labels(records, FlipMode::kCanonical);

  // A temperature-scaled method predicts the same labels, so its
  // method-consistent flips must coincide with the canonical ones.
  TemperatureModel model;
  model.temperature = 3.7;
  std::unordered_map<std::string, int> reference;
  for (const auto& rec : records) {
    reference[rec.id] = apply_temperature(rec.margin(), model, rec.label).predicted;
  }
  const auto consistent = flip_labels(records, FlipMode::kMethodConsistent, &reference);

  REQUIRE(canonical.records.size() == consistent.records.size());
  for (std::size_t i = 0; i < canonical.records.size(); ++i) {
    CHECK(canonical.records[i].flipped == consistent.records[i].flipped);
  }
}

TEST_CASE("minimal perfect bridge") {
  const std::vector<double> entropies = {0.6, 0.2};
  std::vector<FlipRecord> flips(2);
  flips[0] = {"a", 1, 3, FlipMode::kCanonical};
  flips[1] = {"b", 0, 3, FlipMode::kCanonical};
  const auto report = bridge_report(entropies, flips);
  CHECK(report.discriminative);
  CHECK(report.flip_auroc == 1.0);
  CHECK(report.entropy_gap == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(report.flip_rate == 0.5);
}

TEST_CASE("single-class flips produce a partial report") {
  const std::vector<double> entropies = {0.6, 0.2};
  std::vector<FlipRecord> flips(2);
  flips[0] = {"a", 1, 3, FlipMode::kCanonical};
  flips[1] = {"b", 1, 2, FlipMode::kCanonical};
  const auto report = bridge_report(entropies, flips);
  CHECK_FALSE(report.discriminative);
  CHECK(report.flip_rate == 1.0);
  CHECK(report.mean_entropy_flipped == doctest::Approx(0.4));
}

TEST_CASE("paraphrase-free records leave the denominators") {
  const std::vector<double> entropies = {0.6, 0.2, 0.5};
  std::vector<FlipRecord> flips(3);
  flips[0] = {"a", 1, 3, FlipMode::kCanonical};
  flips[1] = {"b", 0, 2, FlipMode::kCanonical};
  flips[2] = {"c", 0, 0, FlipMode::kCanonical};  // skipped
  const auto report = bridge_report(entropies, flips);
  CHECK(report.n_skipped == 1);
  CHECK(report.n_flipped == 1);
  CHECK(report.n_stable == 1);
  CHECK(report.flip_rate == 0.5);
}

TEST_CASE("flip AUROC is invariant under monotone uncertainty rescoring") {
  SynthConfig config;
  config.n = 500;
  config.seed = 53;
  config.paraphrase_count = 5;
  config.paraphrase_jitter = 0.7;
  const auto records = generate(config);
  const auto flips = flip_labels(records, FlipMode::kCanonical);

  std::vector<double> entropies, neg_abs_margin;
  for (const auto& rec : records) {
    const auto s = score(rec);
    entropies.push_back(s.entropy);
    neg_abs_margin.push_back(-std::abs(s.margin));
  }
  const auto by_entropy = bridge_report(entropies, flips.records);
  const auto by_margin = bridge_report(neg_abs_margin, flips.records);
  REQUIRE(by_entropy.discriminative);
  CHECK(by_entropy.flip_auroc == doctest::Approx(by_margin.flip_auroc).epsilon(1e-12));
  CHECK(by_entropy.flip_auroc > 0.5);  // jitter flips cluster near the boundary
}

TEST_CASE("shuffled flip labels destroy the signal") {
  SynthConfig config;
  config.n = 800;
  config.seed = 57;
  config.paraphrase_count = 5;
  config.paraphrase_jitter = 0.7;
  const auto records = generate(config);
  auto flips = flip_labels(records, FlipMode::kCanonical);

  std::vector<double> entropies;
  for (const auto& rec : records) entropies.push_back(score(rec).entropy);

  std::vector<std::size_t> order(flips.records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(99);
  shuffle_indices(order, rng);
  std::vector<FlipRecord> shuffled;
  shuffled.reserve(order.size());
  for (std::size_t idx : order) shuffled.push_back(flips.records[idx]);

  const auto report = bridge_report(entropies, shuffled);
  REQUIRE(report.discriminative);
  CHECK(report.flip_auroc > 0.40);
  CHECK(report.flip_auroc < 0.60);
}

TEST_CASE("mismatched lengths are rejected") {
  CHECK_THROWS_AS(bridge_report(std::vector<double>{0.1}, std::vector<FlipRecord>{}),
                  ValidationError);
}
