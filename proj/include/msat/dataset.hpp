#pragma once

// Corpus ingestion, dataset statistics, out-of-distribution number
// perturbation, prediction scoring, and the synthetic-dataset writer.
//
// File formats:
//   * Task dataset files: one JSON object per line with fields
//     id/input/output_code/output_math/answer/num_steps/template_id/seed;
//     a manifest.json with format_version "msat-1" sits next to them.
//   * Prediction files: one JSON object per line with fields id/prediction.
//   * Word-problem corpora: see the named adapters accepted by load_mwp
//     ("mawps", "svamp", "masked", "jsonl", "msat"). The canonical internal
//     record is a question with inline numbers, the ordered number list, an
//     optional infix equation over slots number0, number1, ..., and the
//     answer.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "msat/emit.hpp"
#include "msat/instantiate.hpp"
#include "msat/interp.hpp"

namespace msat {

enum class AnswerType { PosInt, NonNegInt, PosDecimal, Other };

std::string_view answer_type_name(AnswerType t);

// Most specific class wins: positive integer, then zero, then positive
// value with a terminating decimal expansion, then everything else.
AnswerType classify_answer(const Rational& answer);

struct MwpRecord {
  std::string id;
  std::string question;
  std::vector<Rational> numbers;  // in question order
  std::optional<std::string> equation;  // infix over number0, number1, ...
  Rational answer;
  AnswerType answer_type = AnswerType::Other;
};

struct NumberSpan {
  std::size_t pos;
  std::size_t len;
  Rational value;
};

// Maximal digit runs, with a '.' kept inside the run only when surrounded by
// digits ("3.5" is one span, "3." is the span "3").
std::vector<NumberSpan> extract_number_spans(std::string_view text);

struct LoadIssue {
  std::string id;
  std::string message;
};

struct LoadResult {
  std::vector<MwpRecord> records;
  std::vector<LoadIssue> issues;  // per-record invariant violations
};

// Loads and validates a corpus. Throws std::runtime_error on I/O or
// file-level schema errors; per-record invariant violations land in
// `issues` and the offending records stay in `records`.
LoadResult load_mwp(const std::filesystem::path& path,
                    std::string_view format_id);

struct DatasetStats {
  std::size_t count = 0;
  std::optional<double> avg_input_length;     // whitespace tokens
  std::optional<double> avg_reasoning_steps;  // operators per equation
  std::size_t records_without_equation = 0;
};

DatasetStats compute_stats(std::span<const MwpRecord> records);

class PerturbationFailure : public std::runtime_error {
 public:
  PerturbationFailure(std::string record_id, int budget);
  const std::string& record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

class UnsupportedRecord : public std::runtime_error {
 public:
  explicit UnsupportedRecord(std::string record_id, std::string why);
  const std::string& record_id() const { return record_id_; }

 private:
  std::string record_id_;
};

// Redraws every question number as an integer in [range_min, range_max],
// jointly rejection-sampled until the recomputed answer has the original
// answer type. Digit spans in the question are replaced in place. Throws
// PerturbationFailure when the budget runs out and UnsupportedRecord when
// the record has no equation.
MwpRecord perturb_numbers(const MwpRecord& record, std::uint64_t rng_seed,
                          std::int64_t range_min = 10,
                          std::int64_t range_max = 10000, int budget = 10000);

// --- prediction scoring -----------------------------------------------------

struct GoldAnswer {
  std::string id;
  Rational answer;
};

struct Prediction {
  std::string id;
  std::string text;
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::optional<double> accuracy;  // absent when total == 0
  std::size_t wrong_answer = 0;
  std::map<FailKind, std::size_t> failures;
};

// Scores predictions against gold answers. Prediction ids must be unique
// and every id must exist in gold (std::invalid_argument otherwise).
// Execution failures count as incorrect and are itemized by kind.
EvalReport evaluate_predictions(std::span<const GoldAnswer> gold,
                                std::span<const Prediction> preds,
                                OutputFormat format,
                                const Rational& rel_tol = Rational());

// --- synthetic dataset files ------------------------------------------------

struct MsatExample {
  std::string id;
  std::string input;
  std::string output_code;
  std::string output_math;
  std::string answer;
  int num_steps = 0;
  int template_id = 0;
  std::uint64_t seed = 0;
};

std::vector<GoldAnswer> gold_answers(std::span<const MwpRecord> records);
std::vector<GoldAnswer> gold_answers(std::span<const MsatExample> examples);

struct DatasetManifest {
  std::string format_version = "msat-1";
  GenConfig config;
  std::uint64_t count = 0;
  std::uint64_t split_eval = 0;
  std::string inventory_hash;  // FNV-1a over the template inventory
  std::string train_file = "train.jsonl";
  std::string eval_file = "eval.jsonl";
  std::uint64_t train_count = 0;
  std::uint64_t eval_count = 0;
  double avg_num_steps = 0.0;

  std::string to_json_text() const;
};

// Stable hex digest of the enumerated template inventory, recorded in the
// manifest for provenance.
std::string template_inventory_hash(std::span<const EquationTemplate> tmpls);

// Builds example `index` end to end: generate, invert, emit all formats.
MsatExample make_msat_example(const GenConfig& config,
                              std::span<const EquationTemplate> inventory,
                              std::uint64_t index);

std::string msat_example_to_json_line(const MsatExample& ex);
MsatExample msat_example_from_json_line(std::string_view line);

// Generates `count` examples and writes train (count - split_eval) and eval
// (split_eval) record files plus manifest.json into out_dir. Honors the
// MSAT_THREADS environment variable; output bytes are independent of the
// worker count. Requires split_eval < count.
DatasetManifest write_msat_dataset(const GenConfig& config,
                                   std::uint64_t count,
                                   std::uint64_t split_eval,
                                   const std::filesystem::path& out_dir);

std::vector<MsatExample> read_msat_file(const std::filesystem::path& path);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

struct VerifyReport {
  std::uint64_t checked = 0;
  std::vector<std::string> failed_ids;
  double agreement_percent() const {
    if (checked == 0) return 100.0;
    return 100.0 * static_cast<double>(checked - failed_ids.size()) /
           static_cast<double>(checked);
  }
};

// Re-checks the three-way agreement exec(output_code) = eval(output_math)
// = answer for every record in a dataset file, independently of how the
// file was produced.
VerifyReport verify_msat_file(const std::filesystem::path& path);

// Writes records in the canonical "jsonl" corpus format.
void write_mwp_jsonl(std::span<const MwpRecord> records,
                     const std::filesystem::path& path);

// Deterministically shuffles ids into `folds` near-equal parts (sizes differ
// by at most one).
std::vector<std::vector<std::string>> partition_ids(
    std::span<const std::string> ids, int folds, std::uint64_t seed);

}  // namespace msat
