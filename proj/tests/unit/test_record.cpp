#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "uqeval/error.hpp"
#include "uqeval/record.hpp"
#include "uqeval/synth.hpp"

using namespace uqeval;

namespace {

std::vector<PredictionRecord> parse_text(const std::string& text, ParseStats* stats = nullptr) {
  std::istringstream in(text);
  return read_records(in, stats);
}

}  // namespace

TEST_CASE("minimal record parses with empty optionals") {
  const auto records =
      parse_text(R"({"id":"q1","logit_yes":1.2,"logit_no":-0.3,"label":1})" "\n");
  REQUIRE(records.size() == 1);
  CHECK(records[0].id == "q1");
  CHECK(records[0].logit_yes == doctest::Approx(1.2));
  CHECK(records[0].logit_no == doctest::Approx(-0.3));
  CHECK(records[0].label == 1);
  CHECK(records[0].paraphrases.empty());
  CHECK(records[0].passes.empty());
  CHECK(records[0].members.empty());
  CHECK_FALSE(records[0].corruption.has_value());
}

TEST_CASE("missing required field reports the line number") {
  const std::string text =
      R"({"id":"q1","logit_yes":1.0,"logit_no":0.0,"label":1})" "\n"
      R"({"id":"q2","logit_yes":1.0,"label":0})" "\n";
  CHECK_THROWS_WITH_AS(parse_text(text), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("duplicate ids are rejected citing both lines") {
  const std::string text =
      R"({"id":"q17","logit_yes":1.0,"logit_no":0.0,"label":1})" "\n"
      R"({"id":"q18","logit_yes":1.0,"logit_no":0.0,"label":1})" "\n"
      R"({"id":"q17","logit_yes":2.0,"logit_no":0.0,"label":0})" "\n";
  try {
    parse_text(text);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("q17") != std::string::npos);
    CHECK(msg.find("1") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
}

TEST_CASE("non-finite logits are rejected") {
  CHECK_THROWS_AS(parse_text(R"({"id":"q1","logit_yes":1e999,"logit_no":0.0,"label":1})" "\n"),
                  Error);
  CHECK_THROWS_AS(parse_text(R"({"id":"q1","logit_yes":null,"logit_no":0.0,"label":1})" "\n"),
                  ParseError);
}

TEST_CASE("labels outside {0,1} are rejected") {
  CHECK_THROWS_AS(parse_text(R"({"id":"q1","logit_yes":1.0,"logit_no":0.0,"label":2})" "\n"),
                  ValidationError);
}

TEST_CASE("malformed JSON names the line") {
  const std::string text =
      R"({"id":"q1","logit_yes":1.0,"logit_no":0.0,"label":1})" "\n"
      "not json\n";
  CHECK_THROWS_WITH_AS(parse_text(text), doctest::Contains("line 2"), ParseError);
}

TEST_CASE("unknown fields increment the warning counter") {
  ParseStats stats;
  parse_text(R"({"id":"q1","logit_yes":1.0,"logit_no":0.0,"label":1,"extra":5,"note":"x"})" "\n",
             &stats);
  CHECK(stats.unknown_fields == 2);
  CHECK(stats.lines == 1);
}

TEST_CASE("serialize-parse round trip is lossless") {
  SynthConfig config;
  config.n = 50;
  config.seed = 7;
  config.paraphrase_count = 3;
  config.paraphrase_jitter = 0.4;
  config.pass_count = 4;
  config.pass_jitter = 0.2;
  config.ensemble_members = 2;
  config.member_noise = 0.1;
  auto records = generate(config);
  records[0].corruption = CorruptionTag{"jpeg", 3};

  std::ostringstream out;
  write_records(out, records);
  const auto reparsed = parse_text(out.str());
  REQUIRE(reparsed.size() == records.size());
  CHECK(reparsed == records);

  // Second round trip is byte-identical.
  std::ostringstream out2;
  write_records(out2, reparsed);
  CHECK(out.str() == out2.str());
}

TEST_CASE("split sizes follow max(round(f*n), minimum)") {
  SynthConfig config;
  config.n = 200;
  auto records = generate(config);

  SplitSpec spec;
  spec.seed = 3;
  auto split = split_calibration(records, spec);
  CHECK(split.calibration.size() == 30);
  CHECK(split.evaluation.size() == 170);

  config.n = 100;
  records = generate(config);
  split = split_calibration(records, spec);
  CHECK(split.calibration.size() == 20);  // max(15, 20)
  CHECK(split.evaluation.size() == 80);

  config.n = 20;
  records = generate(config);
  CHECK_THROWS_AS(split_calibration(records, spec), ValidationError);
}

TEST_CASE("split is deterministic, disjoint, and exhaustive") {
  SynthConfig config;
  config.n = 137;
  config.seed = 11;
  const auto records = generate(config);

  SplitSpec spec;
  spec.seed = 99;
  const auto a = split_calibration(records, spec);
  const auto b = split_calibration(records, spec);
  CHECK(a.calibration == b.calibration);
  CHECK(a.evaluation == b.evaluation);

  std::vector<std::string> seen;
  for (const auto& r : a.calibration) seen.push_back(r.id);
  for (const auto& r : a.evaluation) seen.push_back(r.id);
  std::sort(seen.begin(), seen.end());
  CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  CHECK(seen.size() == records.size());

  SplitSpec other = spec;
  other.seed = 100;
  const auto c = split_calibration(records, other);
  CHECK(c.calibration != a.calibration);  // different seed, different shuffle
}

TEST_CASE("filters copy without mutating") {
  SynthConfig config;
  config.n = 10;
  auto records = generate(config);
  records[3].corruption = CorruptionTag{"contrast", 5};
  const auto snapshot = records;

  const auto by_tag = filter_by_dataset(records, "synth");
  CHECK(by_tag.size() == records.size());
  const auto by_kind = filter_by_corruption(records, "contrast");
  CHECK(by_kind.size() == 1);
  CHECK(by_kind[0].id == records[3].id);
  CHECK(records == snapshot);
}

TEST_CASE("member alignment check") {
  SynthConfig config;
  config.n = 5;
  config.ensemble_members = 3;
  auto records = generate(config);
  CHECK_NOTHROW(check_member_alignment(records));

  std::swap(records[2].members[0], records[2].members[1]);
  CHECK_THROWS_AS(check_member_alignment(records), ValidationError);
}
