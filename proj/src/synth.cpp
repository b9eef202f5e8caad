#include "uqeval/synth.hpp"

#include <cmath>
#include <cstdio>

#include "uqeval/error.hpp"
#include "uqeval/rng.hpp"

namespace uqeval {
namespace {

double logit(double p) { return std::log(p) - std::log1p(-p); }

std::string record_id(std::size_t index) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "synth-%06zu", index);
  return buf;
}

}  // namespace

std::vector<PredictionRecord> generate(const SynthConfig& config) {
  if (!(config.prevalence_alpha > 0.0) || !(config.prevalence_beta > 0.0)) {
    throw ValidationError("generate: Beta shape parameters must be > 0");
  }
  if (!(config.temperature_distortion > 0.0)) {
    throw ValidationError("generate: temperature distortion must be > 0");
  }
  if (config.ensemble_members < 0 || config.pass_count < 0 || config.paraphrase_count < 0) {
    throw ValidationError("generate: counts must be >= 0");
  }
  if (config.member_noise < 0.0 || config.pass_jitter < 0.0 || config.paraphrase_jitter < 0.0) {
    throw ValidationError("generate: jitter stds must be >= 0");
  }
  if (!config.member_bias.empty() &&
      config.member_bias.size() != static_cast<std::size_t>(config.ensemble_members)) {
    throw ValidationError("generate: member_bias length must match ensemble_members");
  }

  Rng rng(config.seed);
  std::vector<PredictionRecord> records;
  records.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double p = rng.next_beta(config.prevalence_alpha, config.prevalence_beta);
    const double base_margin = config.temperature_distortion * logit(p);

    PredictionRecord rec;
    rec.id = record_id(i);
    rec.dataset = config.dataset;
    rec.logit_yes = base_margin;
    rec.logit_no = 0.0;
    rec.label = rng.next_bernoulli(p) ? 1 : 0;

    for (int j = 0; j < config.paraphrase_count; ++j) {
      ParaphraseLogits pl;
      pl.id = rec.id + "/p" + std::to_string(j);
      pl.logit_yes = base_margin + config.paraphrase_jitter * rng.next_normal();
      pl.logit_no = 0.0;
      rec.paraphrases.push_back(std::move(pl));
    }
    for (int k = 0; k < config.pass_count; ++k) {
      rec.passes.push_back({base_margin + config.pass_jitter * rng.next_normal(), 0.0});
    }
    for (int k = 0; k < config.ensemble_members; ++k) {
      MemberLogits ml;
      ml.seed = k + 1;
      const double bias = config.member_bias.empty() ? 0.0
                                                     : config.member_bias[static_cast<std::size_t>(k)];
      ml.logit_yes = base_margin + bias + config.member_noise * rng.next_normal();
      ml.logit_no = 0.0;
      rec.members.push_back(std::move(ml));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace uqeval
