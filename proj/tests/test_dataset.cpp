#include <doctest.h>

#include <fstream>
#include <sstream>

#include "msat/dataset.hpp"
#include "msat/rng.hpp"
#include "test_util.hpp"

using namespace msat;
using msat_test::fixture;
using msat_test::scratch_dir;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

MwpRecord make_record(std::string id, std::string question,
                      std::vector<Rational> numbers, std::string equation,
                      Rational answer) {
  MwpRecord rec;
  rec.id = std::move(id);
  rec.question = std::move(question);
  rec.numbers = std::move(numbers);
  rec.equation = std::move(equation);
  rec.answer = answer;
  rec.answer_type = classify_answer(answer);
  return rec;
}

}  // namespace

TEST_CASE("classify_answer taxonomy") {
  CHECK(classify_answer(Rational(5)) == AnswerType::PosInt);
  CHECK(classify_answer(Rational(0)) == AnswerType::NonNegInt);
  CHECK(classify_answer(Rational(7, 2)) == AnswerType::PosDecimal);
  CHECK(classify_answer(Rational(-3)) == AnswerType::Other);
  CHECK(classify_answer(Rational(-1, 2)) == AnswerType::Other);
  // no terminating decimal expansion
  CHECK(classify_answer(Rational(1, 3)) == AnswerType::Other);
}

TEST_CASE("extract_number_spans") {
  const auto spans = msat::extract_number_spans("has 70 and 3.5 kg");
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].value == Rational(70));
  CHECK(spans[0].pos == 4);
  CHECK(spans[0].len == 2);
  CHECK(spans[1].value == Rational(7, 2));
  CHECK(spans[1].len == 3);

  // a trailing dot is not part of the number
  const auto dot = msat::extract_number_spans("ate 3. Then");
  REQUIRE(dot.size() == 1);
  CHECK(dot[0].value == Rational(3));
  CHECK(dot[0].len == 1);

  CHECK(msat::extract_number_spans("no digits here").empty());
  CHECK(msat::extract_number_spans("a1b22").size() == 2);
}

TEST_CASE("load_mwp mawps fixture") {
  const auto loaded = load_mwp(fixture("mawps_small.json"), "mawps");
  CHECK(loaded.issues.empty());
  REQUIRE(loaded.records.size() == 3);

  const auto& rec = loaded.records[0];
  CHECK(rec.id == "1");
  CHECK(rec.numbers == std::vector<Rational>{Rational(70), Rational(27)});
  REQUIRE(rec.equation.has_value());
  CHECK(*rec.equation == "(number0-number1)");
  CHECK(rec.answer == Rational(43));
  CHECK(rec.answer_type == AnswerType::PosInt);

  const auto stats = compute_stats(loaded.records);
  CHECK(stats.count == 3);
  CHECK(stats.records_without_equation == 0);
  CHECK(*stats.avg_input_length == doctest::Approx(64.0 / 3.0));
  CHECK(*stats.avg_reasoning_steps == doctest::Approx(1.0));
}

TEST_CASE("load_mwp reports a record whose equation disagrees") {
  const auto loaded = load_mwp(fixture("mawps_bad.json"), "mawps");
  REQUIRE(loaded.records.size() == 2);
  REQUIRE(loaded.issues.size() == 1);
  CHECK(loaded.issues[0].id == "1");
  CHECK(loaded.issues[0].message.find("evaluates to") != std::string::npos);
}

TEST_CASE("load_mwp empty file yields an empty corpus") {
  const auto loaded = load_mwp(fixture("empty.json"), "mawps");
  CHECK(loaded.records.empty());
  CHECK(loaded.issues.empty());
}

TEST_CASE("load_mwp unknown format") {
  CHECK_THROWS_AS(load_mwp(fixture("empty.json"), "nope"),
                  std::runtime_error);
  CHECK_THROWS_AS(load_mwp("does_not_exist.json", "mawps"),
                  std::runtime_error);
}

TEST_CASE("load_mwp svamp fixture maps literals to slots by first use") {
  const auto loaded = load_mwp(fixture("svamp_small.json"), "svamp");
  CHECK(loaded.issues.empty());
  REQUIRE(loaded.records.size() == 3);

  // Body and Question are joined; 26 -> number0, 9 -> number2
  const auto& rec = loaded.records[0];
  CHECK(rec.id == "chal-1");
  CHECK(rec.numbers.size() == 3);
  CHECK(*rec.equation == "(number0-number2)");

  // duplicate values map to distinct slots in order
  const auto& dup = loaded.records[2];
  CHECK(dup.numbers == std::vector<Rational>{Rational(6), Rational(6)});
  CHECK(*dup.equation == "(number0+number1)");
}

TEST_CASE("load_mwp masked fixture substitutes numbers into the question") {
  const auto loaded = load_mwp(fixture("masked_small.jsonl"), "masked");
  CHECK(loaded.issues.empty());
  REQUIRE(loaded.records.size() == 3);

  const auto& rec = loaded.records[0];
  CHECK(rec.question ==
        "There are 12 birds and 7 more arrive . How many birds in total ?");
  CHECK(rec.numbers == std::vector<Rational>{Rational(12), Rational(7)});
  CHECK(rec.answer == Rational(19));

  const auto& decimal = loaded.records[1];
  CHECK(decimal.answer == Rational(15, 2));
  CHECK(decimal.answer_type == AnswerType::PosDecimal);
}

TEST_CASE("compute_stats averages reasoning steps over equations present") {
  std::vector<MwpRecord> records;
  records.push_back(make_record("a", "x 1 and 2", {1, 2},
                                "(number0+number1)", Rational(3)));
  records.push_back(make_record("b", "y 1 2 3", {1, 2, 3},
                                "((number0+number1)*number2)", Rational(9)));
  records.push_back(make_record("c", "z 4 5", {4, 5},
                                "(number1-number0)", Rational(1)));
  const auto stats = compute_stats(records);
  CHECK(stats.count == 3);
  CHECK(*stats.avg_reasoning_steps == doctest::Approx(4.0 / 3.0));

  MwpRecord no_eq = records[0];
  no_eq.equation.reset();
  records.push_back(no_eq);
  const auto stats2 = compute_stats(records);
  CHECK(stats2.records_without_equation == 1);
  CHECK(*stats2.avg_reasoning_steps == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("compute_stats on an empty corpus") {
  const auto stats = compute_stats(std::span<const MwpRecord>{});
  CHECK(stats.count == 0);
  CHECK_FALSE(stats.avg_input_length.has_value());
  CHECK_FALSE(stats.avg_reasoning_steps.has_value());
}

TEST_CASE("perturb_numbers keeps the answer type and ranges") {
  const auto rec = make_record(
      "p-0", "Paul has 5 apples and buys 3 more .", {5, 3},
      "(number0+number1)", Rational(8));
  const auto out = perturb_numbers(rec, 99);
  CHECK(out.id == rec.id);
  CHECK(out.equation == rec.equation);
  CHECK(out.answer_type == AnswerType::PosInt);
  REQUIRE(out.numbers.size() == 2);
  for (const auto& n : out.numbers) {
    CHECK(n.is_integer());
    CHECK(n >= Rational(10));
    CHECK(n <= Rational(10000));
  }
  CHECK(out.answer == out.numbers[0] + out.numbers[1]);

  // the question text is rewritten in place
  const auto spans = msat::extract_number_spans(out.question);
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].value == out.numbers[0]);
  CHECK(spans[1].value == out.numbers[1]);
  CHECK(out.question.find("apples and buys") != std::string::npos);

  // deterministic in the seed
  const auto again = perturb_numbers(rec, 99);
  CHECK(again.question == out.question);
  CHECK(again.answer == out.answer);

  // custom range
  const auto narrow = perturb_numbers(rec, 7, 100, 120);
  for (const auto& n : narrow.numbers) {
    CHECK(n >= Rational(100));
    CHECK(n <= Rational(120));
  }
}

TEST_CASE("perturbing a decimal-answer record keeps it decimal") {
  const auto rec = make_record(
      "p-1", "A rope of 15 meters is cut into 2 equal pieces .", {15, 2},
      "(number0/number1)", Rational(15, 2));
  REQUIRE(rec.answer_type == AnswerType::PosDecimal);
  const auto out = perturb_numbers(rec, 5);
  CHECK(classify_answer(out.answer) == AnswerType::PosDecimal);
  CHECK_FALSE(out.answer.is_integer());
  CHECK(out.answer.has_finite_decimal());
}

TEST_CASE("a resample equal to the originals leaves the answer unchanged") {
  // degenerate identity case, forced by searching seeds
  const auto rec = make_record("deg", "Lena bought 42 pencils .",
                               {Rational(42)}, "number0", Rational(42));
  bool found = false;
  for (std::uint64_t seed = 0; seed < 200'000 && !found; ++seed) {
    const auto out = perturb_numbers(rec, seed);
    if (out.numbers == rec.numbers) {
      found = true;
      CHECK(out.answer == rec.answer);
      CHECK(out.question == rec.question);
    }
  }
  CHECK(found);
}

TEST_CASE("perturbation failures carry the record id") {
  // integer draws can never produce a fractional sum
  const auto rec = make_record("frac", "He ate 0.25 of a cake and 0.25 of a pie .",
                               {Rational(1, 4), Rational(1, 4)},
                               "(number0+number1)", Rational(1, 2));
  REQUIRE(rec.answer_type == AnswerType::PosDecimal);
  try {
    perturb_numbers(rec, 1, 10, 10000, 50);
    FAIL("expected PerturbationFailure");
  } catch (const PerturbationFailure& e) {
    CHECK(e.record_id() == "frac");
  }

  MwpRecord no_eq = rec;
  no_eq.equation.reset();
  CHECK_THROWS_AS(perturb_numbers(no_eq, 1), UnsupportedRecord);
}

TEST_CASE("write_msat_dataset splits, self-verifies and reproduces") {
  const auto dir = scratch_dir("write_small");
  GenConfig config;
  config.seed = 7;
  const auto manifest = write_msat_dataset(config, 10, 2, dir);
  CHECK(manifest.train_count == 8);
  CHECK(manifest.eval_count == 2);
  CHECK(manifest.format_version == "msat-1");
  CHECK_FALSE(manifest.inventory_hash.empty());

  const auto train = read_msat_file(dir / "train.jsonl");
  const auto eval = read_msat_file(dir / "eval.jsonl");
  CHECK(train.size() == 8);
  CHECK(eval.size() == 2);
  CHECK(train[0].id == "msat-0");
  CHECK(eval[1].id == "msat-9");

  for (const auto& file : {dir / "train.jsonl", dir / "eval.jsonl"}) {
    const auto report = verify_msat_file(file);
    CHECK(report.failed_ids.empty());
    CHECK(report.agreement_percent() == 100.0);
  }

  const auto dir2 = scratch_dir("write_small_again");
  write_msat_dataset(config, 10, 2, dir2);
  CHECK(slurp(dir / "train.jsonl") == slurp(dir2 / "train.jsonl"));
  CHECK(slurp(dir / "eval.jsonl") == slurp(dir2 / "eval.jsonl"));
  CHECK(slurp(dir / "manifest.json") == slurp(dir2 / "manifest.json"));
}

TEST_CASE("write_msat_dataset validates the split") {
  const auto dir = scratch_dir("write_bad");
  GenConfig config;
  CHECK_THROWS_WITH_AS(write_msat_dataset(config, 10, 20, dir),
                       "eval split exceeds count", std::invalid_argument);
  CHECK_THROWS_AS(write_msat_dataset(config, 10, 10, dir),
                  std::invalid_argument);
}

TEST_CASE("verify_msat_file flags corrupted records") {
  const auto dir = scratch_dir("verify_corrupt");
  GenConfig config;
  config.seed = 11;
  write_msat_dataset(config, 6, 2, dir);

  // corrupt the answer of the first eval record
  auto examples = read_msat_file(dir / "eval.jsonl");
  REQUIRE(examples.size() == 2);
  examples[0].answer = "999999999";
  std::ofstream out(dir / "eval.jsonl", std::ios::binary);
  for (const auto& ex : examples) {
    out << msat_example_to_json_line(ex) << "\n";
  }
  out.close();

  const auto report = verify_msat_file(dir / "eval.jsonl");
  CHECK(report.checked == 2);
  REQUIRE(report.failed_ids.size() == 1);
  CHECK(report.failed_ids[0] == examples[0].id);
}

TEST_CASE("msat files round-trip and read back as a corpus") {
  const auto dir = scratch_dir("msat_roundtrip");
  GenConfig config;
  config.seed = 3;
  const auto manifest = write_msat_dataset(config, 12, 3, dir);

  const auto examples = read_msat_file(dir / "train.jsonl");
  for (const auto& ex : examples) {
    CHECK(msat_example_from_json_line(msat_example_to_json_line(ex)).input ==
          ex.input);
  }

  // the msat adapter exposes dataset files as a corpus for stats
  const auto loaded = load_mwp(dir / "train.jsonl", "msat");
  CHECK(loaded.issues.empty());
  CHECK(loaded.records.size() == examples.size());
  const auto stats = compute_stats(loaded.records);
  CHECK(stats.records_without_equation == 0);
  double step_sum = 0;
  for (const auto& ex : examples) step_sum += ex.num_steps;
  const auto eval_examples = read_msat_file(dir / "eval.jsonl");
  for (const auto& ex : eval_examples) step_sum += ex.num_steps;
  CHECK(manifest.avg_num_steps == doctest::Approx(step_sum / 12.0));
}

TEST_CASE("evaluate_predictions scores gold programs at 100%") {
  const auto dir = scratch_dir("eval_gold");
  GenConfig config;
  config.seed = 21;
  write_msat_dataset(config, 10, 4, dir);
  const auto eval_split = read_msat_file(dir / "eval.jsonl");
  const auto gold = gold_answers(std::span<const MsatExample>(eval_split));

  std::vector<Prediction> preds;
  for (const auto& ex : eval_split) {
    preds.push_back(Prediction{ex.id, ex.output_code});
  }
  const auto report = evaluate_predictions(gold, preds,
                                           OutputFormat::CodeStyle);
  CHECK(report.total == 4);
  CHECK(report.correct == 4);
  CHECK(*report.accuracy == 1.0);
  CHECK(report.wrong_answer == 0);
  CHECK(report.failures.empty());

  // math and answer-only formats agree as well
  std::vector<Prediction> math_preds, ans_preds;
  for (const auto& ex : eval_split) {
    math_preds.push_back(Prediction{ex.id, ex.output_math});
    ans_preds.push_back(Prediction{ex.id, ex.answer});
  }
  CHECK(*evaluate_predictions(gold, math_preds, OutputFormat::MathExpr)
             .accuracy == 1.0);
  CHECK(*evaluate_predictions(gold, ans_preds, OutputFormat::AnswerOnly)
             .accuracy == 1.0);
}

TEST_CASE("evaluate_predictions itemizes failures") {
  const std::vector<GoldAnswer> gold{{"a", Rational(2)}, {"b", Rational(3)},
                                     {"c", Rational(4)}, {"d", Rational(5)}};
  const std::vector<Prediction> preds{
      {"a", "N0=3\nN1=1\nAns=N0-N1"},   // correct
      {"b", "N0=3\nAns=N0+N1"},         // undefined variable
      {"c", "gibberish"},               // parse error
      {"d", "N0=9\nAns=N0"},            // wrong answer
  };
  const auto report =
      evaluate_predictions(gold, preds, OutputFormat::CodeStyle);
  CHECK(report.total == 4);
  CHECK(report.correct == 1);
  CHECK(report.wrong_answer == 1);
  CHECK(report.failures.at(FailKind::UndefinedVar) == 1);
  CHECK(report.failures.at(FailKind::ParseError) == 1);
  CHECK(*report.accuracy == doctest::Approx(0.25));
}

TEST_CASE("evaluate_predictions rejects duplicate or unknown ids") {
  const std::vector<GoldAnswer> gold{{"a", Rational(2)}};
  const std::vector<Prediction> dup{{"a", "2"}, {"a", "2"}};
  CHECK_THROWS_AS(
      evaluate_predictions(gold, dup, OutputFormat::AnswerOnly),
      std::invalid_argument);
  const std::vector<Prediction> unknown{{"zzz", "2"}};
  CHECK_THROWS_AS(
      evaluate_predictions(gold, unknown, OutputFormat::AnswerOnly),
      std::invalid_argument);
}

TEST_CASE("evaluate_predictions with no predictions") {
  const std::vector<GoldAnswer> gold{{"a", Rational(2)}};
  const auto report = evaluate_predictions(gold, {}, OutputFormat::AnswerOnly);
  CHECK(report.total == 0);
  CHECK_FALSE(report.accuracy.has_value());
}

TEST_CASE("evaluate_predictions applies the relative tolerance") {
  const std::vector<GoldAnswer> gold{{"a", Rational(1, 3)}};
  const std::vector<Prediction> preds{{"a", "0.3333"}};
  const auto exact =
      evaluate_predictions(gold, preds, OutputFormat::AnswerOnly);
  CHECK(exact.correct == 0);
  const auto tolerant = evaluate_predictions(
      gold, preds, OutputFormat::AnswerOnly, *Rational::from_decimal("0.001"));
  CHECK(tolerant.correct == 1);
}

TEST_CASE("canonical jsonl round-trips through write and load") {
  const auto dir = scratch_dir("jsonl_roundtrip");
  std::vector<MwpRecord> records;
  records.push_back(make_record(
      "r-0", "Paul has 11 apples and buys 23 more .", {11, 23},
      "(number0+number1)", Rational(34)));
  records.push_back(make_record(
      "r-1", "A rope of 15 meters is cut into 2 equal pieces .", {15, 2},
      "(number0/number1)", Rational(15, 2)));
  const auto path = dir / "records.jsonl";
  write_mwp_jsonl(records, path);

  const auto loaded = load_mwp(path, "jsonl");
  CHECK(loaded.issues.empty());
  REQUIRE(loaded.records.size() == 2);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(loaded.records[i].id == records[i].id);
    CHECK(loaded.records[i].question == records[i].question);
    CHECK(loaded.records[i].numbers == records[i].numbers);
    CHECK(loaded.records[i].equation == records[i].equation);
    CHECK(loaded.records[i].answer == records[i].answer);
    CHECK(loaded.records[i].answer_type == records[i].answer_type);
  }
}

TEST_CASE("partition_ids deals a deterministic near-even split") {
  std::vector<std::string> ids;
  for (int i = 0; i < 11; ++i) ids.push_back("id-" + std::to_string(i));
  const auto folds = partition_ids(ids, 5, 42);
  REQUIRE(folds.size() == 5);
  std::vector<std::string> all;
  for (const auto& fold : folds) {
    CHECK(fold.size() >= 2);
    CHECK(fold.size() <= 3);
    all.insert(all.end(), fold.begin(), fold.end());
  }
  CHECK(all.size() == ids.size());
  std::sort(all.begin(), all.end());
  auto sorted = ids;
  std::sort(sorted.begin(), sorted.end());
  CHECK(all == sorted);

  const auto again = partition_ids(ids, 5, 42);
  CHECK(again == folds);
  CHECK_THROWS_AS(partition_ids(ids, 0, 1), std::invalid_argument);
}
