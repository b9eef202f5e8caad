// Command-line front end: wires record files through the evaluation modules
// and emits CSV reports plus a JSON manifest per run. Every subcommand is
// deterministic given its inputs and --seed.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>

#include "cli_util.hpp"
#include "uqeval/bridge.hpp"
#include "uqeval/conformal.hpp"
#include "uqeval/corruption.hpp"
#include "uqeval/error.hpp"
#include "uqeval/image.hpp"
#include "uqeval/metrics.hpp"
#include "uqeval/record.hpp"
#include "uqeval/rng.hpp"
#include "uqeval/selective.hpp"
#include "uqeval/stats.hpp"
#include "uqeval/synth.hpp"
#include "uqeval/temperature.hpp"
#include "uqeval/uncertainty.hpp"

namespace fs = std::filesystem;
using namespace uqeval;
using namespace uqeval::cli;

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("UQEVAL_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

fs::path ensure_out_dir(const std::string& out_dir) {
  fs::path dir(out_dir);
  fs::create_directories(dir);
  return dir;
}

TemperatureModel fit_for_records(std::span<const PredictionRecord> fit_source,
                                 std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  const auto split = split_calibration(fit_source, spec);
  std::vector<double> margins;
  std::vector<int> labels;
  margins.reserve(split.calibration.size());
  for (const auto& rec : split.calibration) {
    margins.push_back(rec.margin());
    labels.push_back(rec.label);
  }
  return fit_temperature(margins, labels);
}

struct EvaluateOptions {
  std::string input;
  std::string calib_input;
  std::string method = "softmax";
  std::string strategy = "prob";
  int bins = kDefaultBins;
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

void write_metrics_csv(const fs::path& path, const std::string& label,
                       const MethodOutput& output, int bins) {
  const auto metrics = calibration_metrics(output.preds, bins);
  std::vector<int> correct;
  correct.reserve(output.preds.size());
  for (const auto& p : output.preds) correct.push_back(p.correct);
  const auto curve = risk_coverage(output.selective_score, correct);

  const std::vector<std::string> header = {"method", "n",   "accuracy", "ece",
                                           "brier",  "nll", "aurc",     "augrc",
                                           "cov_at_5pct",   "cov_at_10pct"};
  CsvWriter csv(path, header);
  csv.write_row({label, std::to_string(output.preds.size()), fmt_fixed(metrics.accuracy),
                 fmt_fixed(metrics.ece), fmt_fixed(metrics.brier), fmt_fixed(metrics.nll),
                 fmt_fixed(aurc(curve)), fmt_fixed(augrc(curve)),
                 fmt_fixed(coverage_at_risk(curve, 0.05)),
                 fmt_fixed(coverage_at_risk(curve, 0.10))});
}

void write_reliability_csv(const fs::path& path, std::span<const ScoredPrediction> preds,
                           int bins) {
  const auto table = reliability_bins(preds, bins);
  const std::vector<std::string> header = {"bin_lower", "bin_upper", "count",
                                           "mean_confidence", "accuracy"};
  CsvWriter csv(path, header);
  for (const auto& bin : table) {
    csv.write_row({fmt_fixed(bin.lower), fmt_fixed(bin.upper), std::to_string(bin.count),
                   fmt_fixed(bin.mean_confidence), fmt_fixed(bin.accuracy)});
  }
}

void write_curve_csv(const fs::path& path, const RiskCoverageCurve& curve) {
  const std::vector<std::string> header = {"coverage", "selective_risk", "generalized_risk",
                                           "threshold"};
  CsvWriter csv(path, header);
  for (const auto& pt : curve.points) {
    csv.write_row({fmt_fixed(pt.coverage), fmt_fixed(pt.selective_risk),
                   fmt_fixed(pt.generalized_risk), fmt_fixed(pt.threshold)});
  }
}

// Mean decomposition over records, overall and split by correctness.
void write_decomposition_csv(const fs::path& path,
                             std::span<const PredictionRecord> records,
                             std::span<const ScoredPrediction> preds, bool from_passes) {
  struct Acc {
    double total = 0, aleatoric = 0, epistemic = 0;
    std::size_t n = 0;
    void add(const UncertaintyDecomposition& d) {
      total += d.total;
      aleatoric += d.aleatoric;
      epistemic += d.epistemic;
      ++n;
    }
  };
  Acc all, correct, error;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto probs = from_passes ? member_probabilities(records[i].passes)
                                   : member_probabilities(records[i].members);
    const auto d = decompose(probs);
    all.add(d);
    (preds[i].correct ? correct : error).add(d);
  }
  const std::vector<std::string> header = {"group", "n", "mean_total", "mean_aleatoric",
                                           "mean_mi", "mi_ratio"};
  CsvWriter csv(path, header);
  const auto row = [&](const char* name, const Acc& acc) {
    const double n = acc.n > 0 ? static_cast<double>(acc.n) : 1.0;
    const double total = acc.total / n;
    const double mi = acc.epistemic / n;
    csv.write_row({name, std::to_string(acc.n), fmt_fixed(total), fmt_fixed(acc.aleatoric / n),
                   fmt_fixed(mi), fmt_fixed(total > 0.0 ? mi / total : 0.0)});
  };
  row("correct", correct);
  row("error", error);
  row("all", all);
}

void write_members_csv(const fs::path& diag_path, const fs::path& disagreement_path,
                       std::span<const PredictionRecord> records) {
  const auto diags = member_diagnostics(records);
  {
    const std::vector<std::string> header = {"seed", "accuracy", "ece", "brier", "nll", "aurc"};
    CsvWriter csv(diag_path, header);
    for (const auto& d : diags) {
      csv.write_row({std::to_string(d.seed), fmt_fixed(d.accuracy), fmt_fixed(d.ece),
                     fmt_fixed(d.brier), fmt_fixed(d.nll), fmt_fixed(d.aurc)});
    }
  }
  std::vector<std::vector<int>> predictions(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& m : records[i].members) {
      predictions[i].push_back(
          score_margin(m.logit_yes - m.logit_no, records[i].label).predicted);
    }
  }
  const auto matrix = disagreement_matrix(predictions);
  std::vector<std::string> header = {"seed"};
  for (const auto& d : diags) header.push_back(std::to_string(d.seed));
  CsvWriter csv(disagreement_path, header);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    std::vector<std::string> row = {std::to_string(diags[i].seed)};
    for (double v : matrix[i]) row.push_back(fmt_fixed(v));
    csv.write_row_strings(row);
  }
}

int cmd_evaluate(const EvaluateOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  const auto records = read_records_file(opt.input);
  const auto strategy = aggregation_from_name(opt.strategy);

  std::optional<TemperatureModel> temperature;
  std::vector<PredictionRecord> evaluation;
  Manifest manifest;
  manifest.command = "evaluate";
  manifest.inputs = {opt.input};
  manifest.seed = opt.seed;
  manifest.config = {{"method", opt.method}, {"strategy", opt.strategy}, {"bins", opt.bins}};

  if (opt.method == "temp") {
    if (!opt.calib_input.empty()) {
      // Cross-domain protocol: fit elsewhere, evaluate on the whole file.
      const auto fit_source = read_records_file(opt.calib_input);
      temperature = fit_for_records(fit_source, opt.seed);
      evaluation = records;
      manifest.inputs.push_back(opt.calib_input);
    } else {
      SplitSpec spec;
      spec.seed = opt.seed;
      auto split = split_calibration(records, spec);
      std::vector<double> margins;
      std::vector<int> labels;
      for (const auto& rec : split.calibration) {
        margins.push_back(rec.margin());
        labels.push_back(rec.label);
      }
      temperature = fit_temperature(margins, labels);
      evaluation = std::move(split.evaluation);
    }
    std::ofstream model_out(out_dir / "temperature.json");
    model_out << temperature_to_json(*temperature) << '\n';
    manifest.outputs.push_back("temperature.json");
  } else {
    evaluation = records;
  }

  const auto output = run_method(evaluation, opt.method, strategy, temperature);
  write_metrics_csv(out_dir / "metrics.csv", output.label, output, opt.bins);
  write_reliability_csv(out_dir / "reliability.csv", output.preds, opt.bins);

  std::vector<int> correct;
  for (const auto& p : output.preds) correct.push_back(p.correct);
  write_curve_csv(out_dir / "risk_coverage.csv",
                  risk_coverage(output.selective_score, correct));
  manifest.outputs.insert(manifest.outputs.end(),
                          {"metrics.csv", "reliability.csv", "risk_coverage.csv"});

  if (opt.method == "mcdrop" || opt.method == "ensemble") {
    write_decomposition_csv(out_dir / "decomposition.csv", evaluation, output.preds,
                            opt.method == "mcdrop");
    manifest.outputs.push_back("decomposition.csv");
  }
  if (opt.method == "ensemble") {
    write_members_csv(out_dir / "members.csv", out_dir / "disagreement.csv", evaluation);
    manifest.outputs.insert(manifest.outputs.end(), {"members.csv", "disagreement.csv"});
  }
  write_manifest(out_dir, manifest);
  return 0;
}

struct TempOptions {
  std::string input;
  std::string calib_input;
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

int cmd_temp(const TempOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  const auto records = read_records_file(opt.input);

  TemperatureModel model;
  std::vector<PredictionRecord> evaluation;
  Manifest manifest;
  manifest.command = "temp";
  manifest.inputs = {opt.input};
  manifest.seed = opt.seed;

  if (!opt.calib_input.empty() && opt.calib_input != opt.input) {
    // Fit on the other file's calibration split, apply to every record here.
    const auto fit_source = read_records_file(opt.calib_input);
    model = fit_for_records(fit_source, opt.seed);
    evaluation = records;
    manifest.inputs.push_back(opt.calib_input);
  } else {
    SplitSpec spec;
    spec.seed = opt.seed;
    auto split = split_calibration(records, spec);
    std::vector<double> margins;
    std::vector<int> labels;
    for (const auto& rec : split.calibration) {
      margins.push_back(rec.margin());
      labels.push_back(rec.label);
    }
    model = fit_temperature(margins, labels);
    evaluation = std::move(split.evaluation);
  }

  {
    std::ofstream model_out(out_dir / "temperature.json");
    model_out << temperature_to_json(model) << '\n';
  }

  // Before/after comparison on the evaluation records.
  const std::vector<std::string> header = {"method", "temperature", "n",   "accuracy",
                                           "ece",    "brier",       "nll", "aurc"};
  CsvWriter csv(out_dir / "metrics.csv", header);
  const auto emit = [&](const std::string& label, double t) {
    TemperatureModel applied = model;
    applied.temperature = t;
    std::vector<ScoredPrediction> preds;
    std::vector<double> scores;
    std::vector<int> correct;
    for (const auto& rec : evaluation) {
      preds.push_back(apply_temperature(rec.margin(), applied, rec.label));
      scores.push_back(preds.back().confidence);
      correct.push_back(preds.back().correct);
    }
    const auto metrics = calibration_metrics(preds);
    csv.write_row({label, fmt_fixed(t), std::to_string(preds.size()),
                   fmt_fixed(metrics.accuracy), fmt_fixed(metrics.ece),
                   fmt_fixed(metrics.brier), fmt_fixed(metrics.nll),
                   fmt_fixed(aurc(risk_coverage(scores, correct)))});
  };
  emit("baseline", 1.0);
  emit("temp", model.temperature);

  manifest.config = {{"fit_source", opt.calib_input.empty() ? opt.input : opt.calib_input}};
  manifest.outputs = {"temperature.json", "metrics.csv"};
  write_manifest(out_dir, manifest);
  return 0;
}

struct ConformalOptions {
  std::string input;
  std::string test_input;
  std::string method = "softmax";
  std::string strategy = "prob";
  std::string alphas = "0.05,0.10";
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

int cmd_conformal(const ConformalOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  const auto records = read_records_file(opt.input);
  const auto strategy = aggregation_from_name(opt.strategy);
  const auto alphas = parse_real_list(opt.alphas, "--alpha");

  SplitSpec spec;
  spec.seed = opt.seed;
  auto split = split_calibration(records, spec);
  std::vector<PredictionRecord> test_records;
  if (!opt.test_input.empty()) {
    test_records = read_records_file(opt.test_input);  // shift protocol
  } else {
    test_records = std::move(split.evaluation);
  }

  std::optional<TemperatureModel> temperature;
  if (opt.method == "temp") {
    temperature = fit_for_records(records, opt.seed + 1);
  }
  const auto cal = run_method(split.calibration, opt.method, strategy, temperature);
  const auto test = run_method(test_records, opt.method, strategy, temperature);

  std::vector<double> cal_p;
  std::vector<int> cal_y;
  for (std::size_t i = 0; i < split.calibration.size(); ++i) {
    cal_p.push_back(cal.preds[i].probability);
    cal_y.push_back(split.calibration[i].label);
  }

  const std::vector<std::string> header = {"alpha", "target",    "empirical",
                                           "q_hat", "mean_size", "singleton_pct"};
  CsvWriter csv(out_dir / "conformal.csv", header);
  for (double alpha : alphas) {
    const auto model = conformal_calibrate(cal_p, cal_y, alpha);
    std::vector<PredictionSet> sets;
    std::vector<int> labels;
    for (std::size_t i = 0; i < test_records.size(); ++i) {
      sets.push_back(conformal_predict(test.preds[i].probability, model));
      labels.push_back(test_records[i].label);
    }
    const auto report = conformal_report(sets, labels, model);
    csv.write_row({fmt_fixed(alpha, 2), fmt_fixed(1.0 - alpha, 2),
                   fmt_fixed(report.empirical_coverage), fmt_fixed(model.q_hat),
                   fmt_fixed(report.mean_size),
                   fmt_fixed(report.singleton_fraction * 100.0, 4)});
  }

  Manifest manifest;
  manifest.command = "conformal";
  manifest.inputs = {opt.input};
  if (!opt.test_input.empty()) manifest.inputs.push_back(opt.test_input);
  manifest.seed = opt.seed;
  manifest.config = {{"method", opt.method}, {"alphas", opt.alphas}};
  manifest.outputs = {"conformal.csv"};
  write_manifest(out_dir, manifest);
  return 0;
}

struct BridgeOptions {
  std::string input;
  std::string mode = "canonical";
  std::string method = "softmax";
  std::string strategy = "prob";
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

int cmd_bridge(const BridgeOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  const auto records = read_records_file(opt.input);
  const auto strategy = aggregation_from_name(opt.strategy);

  std::optional<TemperatureModel> temperature;
  if (opt.method == "temp") {
    temperature = fit_for_records(records, opt.seed);
  }
  const auto output = run_method(records, opt.method, strategy, temperature);

  FlipLabels flips;
  if (opt.mode == "canonical") {
    flips = flip_labels(records, FlipMode::kCanonical);
  } else if (opt.mode == "consistent") {
    std::unordered_map<std::string, int> reference;
    for (std::size_t i = 0; i < records.size(); ++i) {
      reference[records[i].id] = output.preds[i].predicted;
    }
    flips = flip_labels(records, FlipMode::kMethodConsistent, &reference);
  } else {
    throw ValidationError("--mode must be canonical or consistent");
  }

  std::vector<double> entropies;
  for (const auto& p : output.preds) entropies.push_back(p.entropy);
  const auto report = bridge_report(entropies, flips.records);

  {
    const std::vector<std::string> header = {"method",  "h_flip", "h_stable",
                                             "delta_h", "auroc",  "p_value"};
    CsvWriter csv(out_dir / "bridge.csv", header);
    csv.write_row({output.label, fmt_fixed(report.mean_entropy_flipped),
                   fmt_fixed(report.mean_entropy_stable), fmt_fixed(report.entropy_gap),
                   report.discriminative ? fmt_fixed(report.flip_auroc) : "n/a",
                   report.discriminative ? fmt_general(report.p_value) : "n/a"});
  }
  {
    const std::vector<std::string> header = {"id", "flipped", "n_paraphrases"};
    CsvWriter csv(out_dir / "flips.csv", header);
    for (const auto& f : flips.records) {
      csv.write_row({f.id, std::to_string(f.flipped), std::to_string(f.n_paraphrases)});
    }
  }

  Manifest manifest;
  manifest.command = "bridge";
  manifest.inputs = {opt.input};
  manifest.seed = opt.seed;
  manifest.config = {{"mode", opt.mode},
                     {"method", opt.method},
                     {"flip_rate", report.flip_rate},
                     {"n_skipped", report.n_skipped}};
  manifest.outputs = {"bridge.csv", "flips.csv"};
  write_manifest(out_dir, manifest);
  return 0;
}

struct SweepOptions {
  std::string input;
  std::string coverages = "1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1";
  std::string method = "softmax";
  std::string strategy = "prob";
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

int cmd_sweep(const SweepOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  const auto records = read_records_file(opt.input);
  const auto strategy = aggregation_from_name(opt.strategy);
  const auto grid = parse_real_list(opt.coverages, "--coverages");

  std::optional<TemperatureModel> temperature;
  if (opt.method == "temp") {
    temperature = fit_for_records(records, opt.seed);
  }
  const auto output = run_method(records, opt.method, strategy, temperature);
  const auto flips = flip_labels(records, FlipMode::kCanonical);

  std::vector<double> entropies;
  std::vector<int> correct, flipped;
  for (std::size_t i = 0; i < records.size(); ++i) {
    entropies.push_back(output.preds[i].entropy);
    correct.push_back(output.preds[i].correct);
    flipped.push_back(flips.records[i].flipped);
  }
  const auto result = joint_threshold_sweep(entropies, correct, flipped, grid);
  if (result.skipped > 0) {
    std::cerr << "uqeval: warning: " << result.skipped
              << " coverage level(s) skipped (empty retained set)\n";
  }

  const std::vector<std::string> header = {"coverage", "n", "tau", "error_pct", "flip_pct"};
  CsvWriter csv(out_dir / "sweep.csv", header);
  for (const auto& row : result.rows) {
    csv.write_row({fmt_fixed(row.coverage, 2), std::to_string(row.n_retained),
                   fmt_fixed(row.tau), fmt_fixed(row.error_rate * 100.0, 4),
                   fmt_fixed(row.flip_rate * 100.0, 4)});
  }

  Manifest manifest;
  manifest.command = "sweep";
  manifest.inputs = {opt.input};
  manifest.seed = opt.seed;
  manifest.config = {{"method", opt.method}, {"coverages", opt.coverages}};
  manifest.outputs = {"sweep.csv"};
  write_manifest(out_dir, manifest);
  return 0;
}

struct GateOptions {
  std::string input;
  double tau = 0.0;
  std::string tier = "single";
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

int cmd_gate(const GateOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  const auto records = read_records_file(opt.input);

  GateConfig config;
  config.entropy_threshold = opt.tau;
  if (opt.tier == "single") {
    config.tier = GateTier::kSinglePass;
  } else if (opt.tier == "multi") {
    config.tier = GateTier::kMultiPass;
  } else {
    throw ValidationError("--tier must be single or multi");
  }

  const std::vector<std::string> header = {"id", "decision", "probability", "entropy"};
  CsvWriter csv(out_dir / "decisions.csv", header);
  std::size_t abstained = 0;
  for (const auto& rec : records) {
    double probability, entropy;
    if (config.tier == GateTier::kSinglePass) {
      const auto s = score(rec);
      probability = s.probability;
      entropy = s.entropy;
    } else {
      if (rec.passes.empty()) {
        throw ValidationError("record '" + rec.id + "': field 'passes' required for tier multi");
      }
      const auto probs = member_probabilities(rec.passes);
      double sum = 0.0;
      for (double p : probs) sum += p;
      probability = sum / static_cast<double>(probs.size());
      entropy = binary_entropy(probability);
    }
    const auto outcome = abstain_gate(probability, entropy, config);
    const bool abstain = outcome.decision == GateDecision::kAbstain;
    abstained += abstain ? 1 : 0;
    csv.write_row({rec.id, abstain ? "abstain" : "answer", fmt_fixed(outcome.probability),
                   fmt_fixed(outcome.entropy)});
  }

  Manifest manifest;
  manifest.command = "gate";
  manifest.inputs = {opt.input};
  manifest.seed = opt.seed;
  manifest.config = {{"tau", opt.tau},
                     {"tier", opt.tier},
                     {"abstained", abstained},
                     {"total", records.size()}};
  manifest.outputs = {"decisions.csv"};
  write_manifest(out_dir, manifest);
  return 0;
}

struct CorruptOptions {
  std::vector<std::string> inputs;
  std::string kinds = "all";
  std::string severities = "1,3,5";
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

int cmd_corrupt(const CorruptOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);

  std::vector<CorruptionKind> kinds;
  if (opt.kinds == "all") {
    kinds = {CorruptionKind::kGaussianNoise, CorruptionKind::kGaussianBlur,
             CorruptionKind::kContrast, CorruptionKind::kBrightness, CorruptionKind::kJpeg};
  } else {
    std::istringstream in(opt.kinds);
    std::string token;
    while (std::getline(in, token, ',')) {
      if (!token.empty()) kinds.push_back(corruption_from_name(token));
    }
    if (kinds.empty()) throw ValidationError("--kinds: empty list");
  }
  std::vector<int> severities;
  for (double s : parse_real_list(opt.severities, "--severities")) {
    severities.push_back(static_cast<int>(s));
  }

  const std::vector<std::string> header = {"image_path", "kind", "severity", "output_path"};
  CsvWriter csv(out_dir / "manifest.csv", header);
  std::vector<std::string> outputs = {"manifest.csv"};
  for (std::size_t img_idx = 0; img_idx < opt.inputs.size(); ++img_idx) {
    const auto image = read_png(opt.inputs[img_idx]);
    const std::string stem = fs::path(opt.inputs[img_idx]).stem().string();
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      for (int severity : severities) {
        const auto spec = CorruptionSpec::from_grid(kinds[k], severity);
        // Stable per-(image, kind, severity) noise stream.
        const std::uint64_t stream = Rng::derive_seed(
            opt.seed, img_idx * 64 + k * 8 + static_cast<std::size_t>(severity));
        const auto corrupted = apply_corruption(image, spec, stream);
        const std::string name = stem + "__" + std::string(corruption_name(kinds[k])) + "_s" +
                                 std::to_string(severity) + ".png";
        write_png((out_dir / name).string(), corrupted);
        csv.write_row({opt.inputs[img_idx], std::string(corruption_name(kinds[k])),
                       std::to_string(severity), name});
        outputs.push_back(name);
      }
    }
  }

  Manifest manifest;
  manifest.command = "corrupt";
  manifest.inputs = opt.inputs;
  manifest.seed = opt.seed;
  manifest.config = {{"kinds", opt.kinds}, {"severities", opt.severities}};
  manifest.outputs = std::move(outputs);
  write_manifest(out_dir, manifest);
  return 0;
}

struct SynthOptions {
  SynthConfig config;
  std::string member_bias;
  std::string out_dir;
};

int cmd_synth(SynthOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  if (!opt.member_bias.empty()) {
    opt.config.member_bias = parse_real_list(opt.member_bias, "--member-bias");
  }
  const auto records = generate(opt.config);
  write_records_file((out_dir / "records.jsonl").string(), records);

  Manifest manifest;
  manifest.command = "synth";
  manifest.seed = opt.config.seed;
  manifest.config = {{"n", opt.config.n},
                     {"t0", opt.config.temperature_distortion},
                     {"beta_a", opt.config.prevalence_alpha},
                     {"beta_b", opt.config.prevalence_beta},
                     {"members", opt.config.ensemble_members},
                     {"member_noise", opt.config.member_noise},
                     {"passes", opt.config.pass_count},
                     {"pass_jitter", opt.config.pass_jitter},
                     {"paraphrases", opt.config.paraphrase_count},
                     {"paraphrase_jitter", opt.config.paraphrase_jitter},
                     {"dataset", opt.config.dataset}};
  manifest.outputs = {"records.jsonl"};
  write_manifest(out_dir, manifest);
  return 0;
}

struct ReportOptions {
  std::string input;
  std::string method_a;
  std::string method_b;
  std::string strategy = "prob";
  std::string metric = "brier";
  std::vector<std::string> merge;
  int bootstrap = 2000;
  double ci_level = 0.95;
  std::uint64_t seed = default_seed();
  std::string out_dir;
};

double metric_on_subset(const std::string& metric, std::span<const ScoredPrediction> preds,
                        std::span<const double> selective,
                        std::span<const std::size_t> indices) {
  if (metric == "aurc") {
    std::vector<double> scores;
    std::vector<int> correct;
    for (std::size_t idx : indices) {
      scores.push_back(selective[idx]);
      correct.push_back(preds[idx].correct);
    }
    return aurc(risk_coverage(scores, correct));
  }
  std::vector<ScoredPrediction> sample;
  sample.reserve(indices.size());
  for (std::size_t idx : indices) sample.push_back(preds[idx]);
  const auto m = calibration_metrics(sample);
  if (metric == "accuracy") return m.accuracy;
  if (metric == "ece") return m.ece;
  if (metric == "brier") return m.brier;
  if (metric == "nll") return m.nll;
  throw ValidationError("unknown metric: " + metric);
}

int cmd_report(const ReportOptions& opt) {
  const fs::path out_dir = ensure_out_dir(opt.out_dir);
  Manifest manifest;
  manifest.command = "report";
  manifest.seed = opt.seed;
  manifest.config = {{"metric", opt.metric},
                     {"bootstrap", opt.bootstrap},
                     {"ci_level", opt.ci_level}};

  if (!opt.merge.empty()) {
    std::ofstream merged(out_dir / "merged.csv");
    if (!merged) throw Error("cannot open merged.csv");
    std::string expected_header;
    for (const auto& path : opt.merge) {
      std::ifstream in(path);
      if (!in) throw Error("cannot open CSV to merge: " + path);
      std::string header;
      if (!std::getline(in, header)) throw ParseError("empty CSV: " + path);
      if (expected_header.empty()) {
        expected_header = header;
        merged << header << '\n';
      } else if (header != expected_header) {
        throw ValidationError("CSV headers differ: " + path);
      }
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty()) merged << line << '\n';
      }
      manifest.inputs.push_back(path);
    }
    manifest.outputs.push_back("merged.csv");
  }

  if (!opt.input.empty() && !opt.method_a.empty()) {
    const auto records = read_records_file(opt.input);
    const auto strategy = aggregation_from_name(opt.strategy);
    manifest.inputs.push_back(opt.input);

    BootstrapConfig config;
    config.replicates = opt.bootstrap;
    config.seed = opt.seed;
    config.ci_level = opt.ci_level;

    struct MethodRun {
      std::string name;
      MethodOutput output;
      BootstrapCi ci;
    };
    std::vector<MethodRun> runs;
    for (const std::string& name : {opt.method_a, opt.method_b}) {
      if (name.empty()) continue;
      std::optional<TemperatureModel> temperature;
      if (name == "temp") temperature = fit_for_records(records, opt.seed);
      MethodRun run;
      run.name = name;
      run.output = run_method(records, name, strategy, temperature);
      const auto& output = run.output;
      run.ci = bootstrap_ci_indexed(
          records.size(),
          [&](std::span<const std::size_t> indices) {
            return metric_on_subset(opt.metric, output.preds, output.selective_score, indices);
          },
          config);
      runs.push_back(std::move(run));
    }

    const std::vector<std::string> header = {"method", "metric", "estimate", "ci_lower",
                                             "ci_upper"};
    CsvWriter csv(out_dir / "report.csv", header);
    for (const auto& run : runs) {
      csv.write_row({run.output.label, opt.metric, fmt_fixed(run.ci.estimate),
                     fmt_fixed(run.ci.lower), fmt_fixed(run.ci.upper)});
    }
    manifest.outputs.push_back("report.csv");

    if (runs.size() == 2) {
      const auto& a = runs[0].output;
      const auto& b = runs[1].output;
      const double p = paired_bootstrap_test_indexed(
          records.size(),
          [&](std::span<const std::size_t> indices) {
            return metric_on_subset(opt.metric, a.preds, a.selective_score, indices);
          },
          [&](std::span<const std::size_t> indices) {
            return metric_on_subset(opt.metric, b.preds, b.selective_score, indices);
          },
          config);
      const std::vector<std::string> cmp_header = {"metric",     "method_a",   "method_b",
                                                   "estimate_a", "estimate_b", "delta",
                                                   "p_value"};
      CsvWriter cmp(out_dir / "comparison.csv", cmp_header);
      cmp.write_row({opt.metric, runs[0].name, runs[1].name, fmt_fixed(runs[0].ci.estimate),
                     fmt_fixed(runs[1].ci.estimate),
                     fmt_fixed(runs[0].ci.estimate - runs[1].ci.estimate), fmt_general(p)});
      manifest.outputs.push_back("comparison.csv");
    }
  }

  if (manifest.outputs.empty()) {
    throw ValidationError("report: nothing to do (need --merge or --input with --method-a)");
  }
  write_manifest(out_dir, manifest);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty evaluation toolkit for binary yes/no prediction logs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", UQEVAL_VERSION);

  EvaluateOptions eval_opt;
  auto* eval = app.add_subcommand("evaluate", "Calibration, reliability, and selective metrics");
  eval->add_option("--input", eval_opt.input, "Record JSONL file")->required();
  eval->add_option("--calib-input", eval_opt.calib_input,
                   "Fit source for --method temp (defaults to --input's split)");
  eval->add_option("--method", eval_opt.method, "softmax | margin | temp | mcdrop | ensemble");
  eval->add_option("--strategy", eval_opt.strategy, "prob | logit | vote (ensemble)");
  eval->add_option("--bins", eval_opt.bins, "Reliability bin count");
  eval->add_option("--seed", eval_opt.seed, "Split seed");
  eval->add_option("--out-dir", eval_opt.out_dir, "Output directory")->required();

  TempOptions temp_opt;
  auto* temp = app.add_subcommand("temp", "Fit a temperature and report before/after metrics");
  temp->add_option("--input", temp_opt.input, "Record JSONL file to scale")->required();
  temp->add_option("--calib-input", temp_opt.calib_input, "Fit on this file's split instead");
  temp->add_option("--seed", temp_opt.seed, "Split seed");
  temp->add_option("--out-dir", temp_opt.out_dir, "Output directory")->required();

  ConformalOptions conf_opt;
  auto* conf = app.add_subcommand("conformal", "Split-conformal calibration and report");
  conf->add_option("--input", conf_opt.input, "Record JSONL file")->required();
  conf->add_option("--test-input", conf_opt.test_input,
                   "Evaluate sets on this file (shift protocol)");
  conf->add_option("--method", conf_opt.method, "Probability source method");
  conf->add_option("--strategy", conf_opt.strategy, "Ensemble strategy");
  conf->add_option("--alpha", conf_opt.alphas, "Comma-separated miscoverage targets");
  conf->add_option("--seed", conf_opt.seed, "Split seed");
  conf->add_option("--out-dir", conf_opt.out_dir, "Output directory")->required();

  BridgeOptions bridge_opt;
  auto* bridge = app.add_subcommand("bridge", "Paraphrase flip labels and bridge report");
  bridge->add_option("--input", bridge_opt.input, "Record JSONL file")->required();
  bridge->add_option("--mode", bridge_opt.mode, "canonical | consistent");
  bridge->add_option("--method", bridge_opt.method, "Uncertainty source method");
  bridge->add_option("--strategy", bridge_opt.strategy, "Ensemble strategy");
  bridge->add_option("--seed", bridge_opt.seed, "Split seed (temp fitting)");
  bridge->add_option("--out-dir", bridge_opt.out_dir, "Output directory")->required();

  SweepOptions sweep_opt;
  auto* sweep = app.add_subcommand("sweep", "Joint entropy-threshold sweep");
  sweep->add_option("--input", sweep_opt.input, "Record JSONL file")->required();
  sweep->add_option("--coverages", sweep_opt.coverages, "Comma-separated coverage grid");
  sweep->add_option("--method", sweep_opt.method, "Uncertainty source method");
  sweep->add_option("--strategy", sweep_opt.strategy, "Ensemble strategy");
  sweep->add_option("--seed", sweep_opt.seed, "Split seed (temp fitting)");
  sweep->add_option("--out-dir", sweep_opt.out_dir, "Output directory")->required();

  GateOptions gate_opt;
  auto* gate = app.add_subcommand("gate", "Entropy-threshold abstention decisions");
  gate->add_option("--input", gate_opt.input, "Record JSONL file")->required();
  gate->add_option("--tau", gate_opt.tau, "Entropy threshold in [0, ln 2]")->required();
  gate->add_option("--tier", gate_opt.tier, "single | multi");
  gate->add_option("--seed", gate_opt.seed, "Unused; accepted for uniformity");
  gate->add_option("--out-dir", gate_opt.out_dir, "Output directory")->required();

  CorruptOptions corrupt_opt;
  auto* corrupt = app.add_subcommand("corrupt", "Generate the image corruption grid");
  corrupt->add_option("--input", corrupt_opt.inputs, "Input PNG image(s)")->required();
  corrupt->add_option("--kinds", corrupt_opt.kinds, "all or comma-separated kinds");
  corrupt->add_option("--severities", corrupt_opt.severities, "Comma-separated severities");
  corrupt->add_option("--seed", corrupt_opt.seed, "Noise seed");
  corrupt->add_option("--out-dir", corrupt_opt.out_dir, "Output directory")->required();

  SynthOptions synth_opt;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic prediction log");
  synth->add_option("--n", synth_opt.config.n, "Record count");
  synth->add_option("--seed", synth_opt.config.seed, "Generator seed");
  synth->add_option("--t0", synth_opt.config.temperature_distortion, "Margin distortion factor");
  synth->add_option("--beta-a", synth_opt.config.prevalence_alpha, "Beta shape a");
  synth->add_option("--beta-b", synth_opt.config.prevalence_beta, "Beta shape b");
  synth->add_option("--members", synth_opt.config.ensemble_members, "Ensemble member count");
  synth->add_option("--member-bias", synth_opt.member_bias, "Comma-separated member biases");
  synth->add_option("--member-noise", synth_opt.config.member_noise, "Member margin noise std");
  synth->add_option("--passes", synth_opt.config.pass_count, "Stochastic pass count");
  synth->add_option("--pass-jitter", synth_opt.config.pass_jitter, "Pass margin jitter std");
  synth->add_option("--paraphrases", synth_opt.config.paraphrase_count, "Paraphrase count");
  synth->add_option("--paraphrase-jitter", synth_opt.config.paraphrase_jitter,
                    "Paraphrase margin jitter std");
  synth->add_option("--dataset", synth_opt.config.dataset, "Dataset tag");
  synth->add_option("--out-dir", synth_opt.out_dir, "Output directory")->required();

  ReportOptions report_opt;
  auto* report = app.add_subcommand("report", "Bootstrap CIs, paired tests, CSV merging");
  report->add_option("--input", report_opt.input, "Record JSONL file");
  report->add_option("--method-a", report_opt.method_a, "First method");
  report->add_option("--method-b", report_opt.method_b, "Second method (paired test)");
  report->add_option("--strategy", report_opt.strategy, "Ensemble strategy");
  report->add_option("--metric", report_opt.metric, "accuracy | ece | brier | nll | aurc");
  report->add_option("--merge", report_opt.merge, "CSV files to concatenate");
  report->add_option("--bootstrap", report_opt.bootstrap, "Replicate count");
  report->add_option("--ci-level", report_opt.ci_level, "Confidence level");
  report->add_option("--seed", report_opt.seed, "Resampling seed");
  report->add_option("--out-dir", report_opt.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) return cmd_evaluate(eval_opt);
    if (temp->parsed()) return cmd_temp(temp_opt);
    if (conf->parsed()) return cmd_conformal(conf_opt);
    if (bridge->parsed()) return cmd_bridge(bridge_opt);
    if (sweep->parsed()) return cmd_sweep(sweep_opt);
    if (gate->parsed()) return cmd_gate(gate_opt);
    if (corrupt->parsed()) return cmd_corrupt(corrupt_opt);
    if (synth->parsed()) return cmd_synth(synth_opt);
    if (report->parsed()) return cmd_report(report_opt);
  } catch (const std::exception& e) {
    std::cerr << "uqeval: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
