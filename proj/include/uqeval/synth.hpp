#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uqeval/record.hpp"

namespace uqeval {

/// Configuration of the seeded synthetic log generator. Each record draws a
/// true probability p from Beta(prevalence_alpha, prevalence_beta), a label
/// from Bernoulli(p), and a base margin temperature_distortion * logit(p);
/// logits are stored as (margin, 0). Optional paraphrases, passes, and
/// ensemble members jitter the base margin as configured.
struct SynthConfig {
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  double temperature_distortion = 1.0;  // margins are scaled by this factor
  double prevalence_alpha = 2.0;
  double prevalence_beta = 2.0;

  int ensemble_members = 0;
  std::vector<double> member_bias;  // per-member margin offset; empty = zeros
  double member_noise = 0.0;

  int pass_count = 0;
  double pass_jitter = 0.0;

  int paraphrase_count = 0;
  double paraphrase_jitter = 0.0;

  std::string dataset = "synth";
};

// Deterministic per seed: identical configs produce byte-identical files.
std::vector<PredictionRecord> generate(const SynthConfig& config);

}  // namespace uqeval
