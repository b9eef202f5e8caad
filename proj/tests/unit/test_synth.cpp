#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "uqeval/error.hpp"
#include "uqeval/metrics.hpp"
#include "uqeval/synth.hpp"
#include "uqeval/uncertainty.hpp"

using namespace uqeval;

TEST_CASE("same seed gives byte-identical files") {
  SynthConfig config;
  config.n = 100;
  config.seed = 42;
  config.paraphrase_count = 3;
  config.paraphrase_jitter = 0.5;
  config.ensemble_members = 2;
  config.member_noise = 0.2;
  config.pass_count = 4;
  config.pass_jitter = 0.3;

  const auto a = generate(config);
  const auto b = generate(config);
  CHECK(a == b);

  std::ostringstream sa, sb;
  write_records(sa, a);
  write_records(sb, b);
  CHECK(sa.str() == sb.str());

  config.seed = 43;
  CHECK(generate(config) != a);
}

TEST_CASE("logits encode the margin directly") {
  SynthConfig config;
  config.n = 20;
  config.seed = 1;
  const auto records = generate(config);
  for (const auto& rec : records) {
    CHECK(rec.logit_no == 0.0);
    CHECK(rec.margin() == rec.logit_yes);
  }
}

TEST_CASE("invalid configurations are rejected") {
  SynthConfig config;
  config.prevalence_alpha = 0.0;
  CHECK_THROWS_AS(generate(config), ValidationError);
  config = {};
  config.temperature_distortion = -1.0;
  CHECK_THROWS_AS(generate(config), ValidationError);
  config = {};
  config.paraphrase_jitter = -0.5;
  CHECK_THROWS_AS(generate(config), ValidationError);
  config = {};
  config.ensemble_members = 2;
  config.member_bias = {0.1};  // wrong length
  CHECK_THROWS_AS(generate(config), ValidationError);
}

TEST_CASE("unit distortion yields a calibrated log") {
  SynthConfig config;
  config.n = 20000;
  config.seed = 5;
  const auto records = generate(config);
  std::vector<ScoredPrediction> preds;
  preds.reserve(records.size());
  for (const auto& rec : records) preds.push_back(score(rec));
  CHECK(calibration_metrics(preds).ece < 0.02);
}

TEST_CASE("flip probability decreases with distance from the boundary") {
  SynthConfig config;
  config.n = 4000;
  config.seed = 6;
  config.paraphrase_count = 5;
  config.paraphrase_jitter = 0.6;
  const auto records = generate(config);

  // Bucket |margin| and compare flip rates between close and far buckets.
  double near_flips = 0, near_total = 0, far_flips = 0, far_total = 0;
  for (const auto& rec : records) {
    const double distance = std::abs(rec.margin());
    bool flipped = false;
    const int base = score(rec).predicted;
    for (const auto& p : rec.paraphrases) {
      flipped = flipped || score_margin(p.logit_yes - p.logit_no, rec.label).predicted != base;
    }
    if (distance < 0.5) {
      near_total += 1;
      near_flips += flipped ? 1 : 0;
    } else if (distance > 1.5) {
      far_total += 1;
      far_flips += flipped ? 1 : 0;
    }
  }
  REQUIRE(near_total > 100);
  REQUIRE(far_total > 100);
  CHECK(near_flips / near_total > far_flips / far_total);
}

TEST_CASE("member bias drives the epistemic term") {
  SynthConfig agreeing;
  agreeing.n = 500;
  agreeing.seed = 7;
  agreeing.ensemble_members = 4;
  agreeing.member_noise = 0.05;

  SynthConfig opposed = agreeing;
  opposed.member_bias = {-2.0, -1.0, 1.0, 2.0};

  auto mean_mi = [](const std::vector<PredictionRecord>& records) {
    double total = 0.0;
    for (const auto& rec : records) {
      total += decompose(member_probabilities(rec.members)).epistemic;
    }
    return total / static_cast<double>(records.size());
  };

  const double mi_agreeing = mean_mi(generate(agreeing));
  const double mi_opposed = mean_mi(generate(opposed));
  CHECK(mi_agreeing < 0.01);
  CHECK(mi_opposed > 5.0 * mi_agreeing);
}

TEST_CASE("passes jitter around the base margin") {
  SynthConfig config;
  config.n = 200;
  config.seed = 8;
  config.pass_count = 10;
  config.pass_jitter = 0.3;
  const auto records = generate(config);
  double total_dev = 0.0;
  std::size_t count = 0;
  for (const auto& rec : records) {
    REQUIRE(rec.passes.size() == 10);
    for (const auto& pass : rec.passes) {
      total_dev += std::abs(pass[0] - rec.logit_yes);
      ++count;
    }
  }
  // mean |N(0, 0.3^2)| = 0.3 sqrt(2/pi) ~ 0.239
  CHECK(total_dev / static_cast<double>(count) == doctest::Approx(0.2394).epsilon(0.1));
}
