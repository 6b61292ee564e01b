#include "msat/dataset.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "msat/emit.hpp"
#include "msat/invert.hpp"
#include "msat/rng.hpp"

namespace msat {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Rational json_to_rational(const json& j, const std::string& where) {
  if (j.is_number_integer()) {
    return Rational(static_cast<long long>(j.get<std::int64_t>()));
  }
  if (j.is_number_unsigned()) {
    return Rational(BigInt(j.get<std::uint64_t>()));
  }
  if (j.is_number_float()) {
    // dump() prints the shortest decimal that round-trips, so going through
    // text keeps e.g. 0.1 equal to 1/10 instead of the binary fraction.
    auto r = Rational::from_decimal(j.dump());
    if (r) return *r;
  }
  if (j.is_string()) {
    auto r = Rational::from_decimal(j.get<std::string>());
    if (r) return *r;
  }
  throw std::runtime_error(where + ": not a number");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open file: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

std::size_t whitespace_token_count(std::string_view s) {
  std::size_t count = 0;
  bool in_token = false;
  for (char c : s) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

std::string slot_name(std::size_t i) { return "number" + std::to_string(i); }

// Resolves number0, number1, ... against a value list.
VarResolver slot_resolver(const std::vector<Rational>& numbers) {
  return [&numbers](std::string_view name) -> std::optional<Rational> {
    if (name.size() <= 6 || name.substr(0, 6) != "number") return std::nullopt;
    std::size_t idx = 0;
    for (char c : name.substr(6)) {
      if (c < '0' || c > '9') return std::nullopt;
      idx = idx * 10 + static_cast<std::size_t>(c - '0');
      if (idx > 1000000) return std::nullopt;
    }
    if (idx >= numbers.size()) return std::nullopt;
    return numbers[idx];
  };
}

MathParseOptions corpus_equation_options() {
  MathParseOptions opts;
  opts.allow_variables = true;
  opts.allow_unary_minus = true;
  opts.allow_whitespace = true;
  return opts;
}

// Rewrites literal leaves into number slots, matching each literal to the
// first unused question number with the same value (textual left-to-right
// order). Unmatched literals stay literal constants.
MathAst map_literals_to_slots(const MathAst& ast,
                              const std::vector<Rational>& numbers,
                              std::vector<bool>& used) {
  return ast.visit([&](const auto& node) -> MathAst {
    using T = std::decay_t<decltype(node)>;
    if constexpr (std::is_same_v<T, MathAst::Literal>) {
      for (std::size_t i = 0; i < numbers.size(); ++i) {
        if (!used[i] && numbers[i] == node.value) {
          used[i] = true;
          return MathAst::var(slot_name(i));
        }
      }
      return MathAst::literal(node.value);
    } else if constexpr (std::is_same_v<T, MathAst::Var>) {
      return MathAst::var(node.name);
    } else if constexpr (std::is_same_v<T, MathAst::Unary>) {
      return MathAst::negate(map_literals_to_slots(node.child, numbers, used));
    } else {
      // sequence the recursion explicitly: literals claim slots left to right
      MathAst left = map_literals_to_slots(node.left, numbers, used);
      MathAst right = map_literals_to_slots(node.right, numbers, used);
      return MathAst::binary(node.op, std::move(left), std::move(right));
    }
  });
}

// Strips a lone unknown from "X = expr" or "expr = X"; returns nullopt when
// the shape is not a single equality solvable for one side.
std::optional<std::string> equation_expression_side(std::string_view text) {
  const std::size_t first = text.find('=');
  if (first == std::string_view::npos) return std::string(trim(text));
  if (text.find('=', first + 1) != std::string_view::npos) return std::nullopt;
  const auto lhs = trim(text.substr(0, first));
  const auto rhs = trim(text.substr(first + 1));
  auto is_unknown = [](std::string_view s) {
    return s.size() == 1 && std::isalpha(static_cast<unsigned char>(s[0]));
  };
  if (is_unknown(lhs)) return std::string(rhs);
  if (is_unknown(rhs)) return std::string(lhs);
  return std::nullopt;
}

struct RawRecord {
  std::string id;
  std::string question;
  std::optional<std::vector<Rational>> numbers;  // explicit list, if any
  std::optional<std::string> equation_text;      // as found in the corpus
  bool equation_has_slots = false;  // slots already present (no mapping)
  Rational answer;
};

std::vector<Rational> parse_number_list(const json& j,
                                        const std::string& where) {
  std::vector<Rational> out;
  if (j.is_string()) {
    std::istringstream in(j.get<std::string>());
    std::string tok;
    while (in >> tok) {
      auto r = Rational::from_decimal(tok);
      if (!r) throw std::runtime_error(where + ": bad number '" + tok + "'");
      out.push_back(*r);
    }
    return out;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      out.push_back(json_to_rational(j[i], where));
    }
    return out;
  }
  throw std::runtime_error(where + ": numbers must be a list or string");
}

const json& require_field(const json& j, const char* field,
                          const std::string& where) {
  auto it = j.find(field);
  if (it == j.end()) {
    throw std::runtime_error(where + ": missing field '" + field + "'");
  }
  return *it;
}

std::string json_to_id(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  if (j.is_number_unsigned()) return std::to_string(j.get<std::uint64_t>());
  return j.dump();
}

// Replaces masked tokens number0, number1, ... by their values. Tokens must
// stand alone (not embedded in a larger identifier).
std::string substitute_slots(const std::string& question,
                             const std::vector<Rational>& numbers,
                             std::vector<std::string>* problems) {
  std::string out;
  std::size_t i = 0;
  const std::size_t n = question.size();
  auto is_word = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < n) {
    const bool boundary = i == 0 || !is_word(question[i - 1]);
    if (boundary && question.compare(i, 6, "number") == 0 && i + 6 < n &&
        std::isdigit(static_cast<unsigned char>(question[i + 6]))) {
      std::size_t j = i + 6;
      std::size_t idx = 0;
      while (j < n && std::isdigit(static_cast<unsigned char>(question[j]))) {
        idx = idx * 10 + static_cast<std::size_t>(question[j] - '0');
        ++j;
      }
      if (j == n || !is_word(question[j])) {
        if (idx < numbers.size()) {
          out += numbers[idx].to_string();
        } else {
          if (problems) {
            problems->push_back("mask " + slot_name(idx) +
                                " has no matching number");
          }
          out.append(question, i, j - i);
        }
        i = j;
        continue;
      }
    }
    out += question[i++];
  }
  return out;
}

std::vector<RawRecord> adapt_mawps(const json& root) {
  if (!root.is_array()) {
    throw std::runtime_error("mawps: expected a JSON array");
  }
  std::vector<RawRecord> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto& item = root[i];
    const std::string where = "record " + std::to_string(i);
    RawRecord rec;
    if (item.contains("iIndex")) {
      rec.id = json_to_id(item["iIndex"]);
    } else if (item.contains("id")) {
      rec.id = json_to_id(item["id"]);
    } else {
      rec.id = std::to_string(i);
    }
    rec.question = require_field(item, "sQuestion", where).get<std::string>();
    const auto& eqs = require_field(item, "lEquations", where);
    if (!eqs.is_array()) {
      throw std::runtime_error(where + ": field 'lEquations' must be a list");
    }
    if (!eqs.empty()) {
      rec.equation_text = eqs[0].get<std::string>();
    }
    const auto& sols = require_field(item, "lSolutions", where);
    if (!sols.is_array() || sols.empty()) {
      throw std::runtime_error(where +
                               ": field 'lSolutions' must be a non-empty list");
    }
    rec.answer = json_to_rational(sols[0], where + ".lSolutions");
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawRecord> adapt_svamp(const json& root) {
  if (!root.is_array()) {
    throw std::runtime_error("svamp: expected a JSON array");
  }
  std::vector<RawRecord> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const auto& item = root[i];
    const std::string where = "record " + std::to_string(i);
    RawRecord rec;
    rec.id = item.contains("ID") ? json_to_id(item["ID"]) : std::to_string(i);
    std::string body = item.value("Body", std::string());
    std::string question =
        require_field(item, "Question", where).get<std::string>();
    rec.question = body.empty() ? question : body + " " + question;
    rec.equation_text =
        require_field(item, "Equation", where).get<std::string>();
    rec.answer =
        json_to_rational(require_field(item, "Answer", where), where);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<json> parse_jsonl_or_array(const std::string& text,
                                       const char* format) {
  std::vector<json> items;
  const auto trimmed = trim(text);
  if (trimmed.empty()) return items;
  if (trimmed.front() == '[') {
    json root = json::parse(trimmed);
    for (auto& item : root) items.push_back(std::move(item));
    return items;
  }
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      items.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw std::runtime_error(std::string(format) + ": line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return items;
}

std::vector<RawRecord> adapt_masked(const std::string& text) {
  std::vector<RawRecord> out;
  auto items = parse_jsonl_or_array(text, "masked");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const std::string where = "record " + std::to_string(i);
    RawRecord rec;
    rec.id = item.contains("id") ? json_to_id(item["id"]) : std::to_string(i);
    rec.question = require_field(item, "question", where).get<std::string>();
    rec.numbers =
        parse_number_list(require_field(item, "numbers", where), where);
    rec.equation_text =
        require_field(item, "equation", where).get<std::string>();
    rec.equation_has_slots = true;
    rec.answer =
        json_to_rational(require_field(item, "answer", where), where);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawRecord> adapt_jsonl(const std::string& text) {
  std::vector<RawRecord> out;
  auto items = parse_jsonl_or_array(text, "jsonl");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const std::string where = "record " + std::to_string(i);
    RawRecord rec;
    rec.id = item.contains("id") ? json_to_id(item["id"]) : std::to_string(i);
    rec.question = require_field(item, "question", where).get<std::string>();
    if (item.contains("numbers")) {
      rec.numbers = parse_number_list(item["numbers"], where);
    }
    if (item.contains("equation") && !item["equation"].is_null()) {
      rec.equation_text = item["equation"].get<std::string>();
      rec.equation_has_slots = true;
    }
    rec.answer =
        json_to_rational(require_field(item, "answer", where), where);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawRecord> adapt_msat(const std::string& text) {
  std::vector<RawRecord> out;
  auto items = parse_jsonl_or_array(text, "msat");
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& item = items[i];
    const std::string where = "record " + std::to_string(i);
    RawRecord rec;
    rec.id = json_to_id(require_field(item, "id", where));
    rec.question = require_field(item, "input", where).get<std::string>();
    rec.equation_text =
        require_field(item, "output_math", where).get<std::string>();
    rec.answer =
        json_to_rational(require_field(item, "answer", where), where);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

std::string_view answer_type_name(AnswerType t) {
  switch (t) {
    case AnswerType::PosInt: return "POS_INT";
    case AnswerType::NonNegInt: return "NON_NEG_INT";
    case AnswerType::PosDecimal: return "POS_DECIMAL";
    case AnswerType::Other: return "OTHER";
  }
  return "OTHER";
}

AnswerType classify_answer(const Rational& answer) {
  if (answer.is_integer()) {
    if (answer.sign() > 0) return AnswerType::PosInt;
    if (answer.is_zero()) return AnswerType::NonNegInt;
    return AnswerType::Other;
  }
  if (answer.sign() > 0 && answer.has_finite_decimal()) {
    return AnswerType::PosDecimal;
  }
  return AnswerType::Other;
}

std::vector<NumberSpan> extract_number_spans(std::string_view text) {
  std::vector<NumberSpan> out;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    if (i + 1 < n && text[i] == '.' &&
        std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
      ++i;
      while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
    }
    const auto span = text.substr(start, i - start);
    auto value = Rational::from_decimal(span);
    if (value) {
      out.push_back(NumberSpan{start, span.size(), *value});
    }
  }
  return out;
}

LoadResult load_mwp(const std::filesystem::path& path,
                    std::string_view format_id) {
  const bool known = format_id == "mawps" || format_id == "svamp" ||
                     format_id == "masked" || format_id == "jsonl" ||
                     format_id == "msat";
  if (!known) {
    throw std::runtime_error("unknown corpus format: " +
                             std::string(format_id));
  }
  const std::string text = read_file(path);
  LoadResult result;
  if (is_blank(text)) return result;

  std::vector<RawRecord> raw;
  if (format_id == "mawps") {
    raw = adapt_mawps(json::parse(text));
  } else if (format_id == "svamp") {
    raw = adapt_svamp(json::parse(text));
  } else if (format_id == "masked") {
    raw = adapt_masked(text);
  } else if (format_id == "jsonl") {
    raw = adapt_jsonl(text);
  } else {
    raw = adapt_msat(text);
  }

  for (auto& r : raw) {
    MwpRecord rec;
    rec.id = std::move(r.id);
    rec.answer = r.answer;
    rec.answer_type = classify_answer(rec.answer);

    std::vector<std::string> problems;
    if (r.equation_has_slots && r.numbers) {
      // Masked formats carry the numbers separately; realize the question.
      rec.question = substitute_slots(r.question, *r.numbers, &problems);
      rec.numbers = std::move(*r.numbers);
    } else {
      rec.question = std::move(r.question);
      auto spans = extract_number_spans(rec.question);
      rec.numbers.reserve(spans.size());
      for (const auto& s : spans) rec.numbers.push_back(s.value);
    }

    // Question numbers must agree with the extracted digit runs.
    {
      auto spans = extract_number_spans(rec.question);
      bool match = spans.size() == rec.numbers.size();
      for (std::size_t i = 0; match && i < spans.size(); ++i) {
        match = spans[i].value == rec.numbers[i];
      }
      if (!match) {
        problems.push_back("question digit runs do not match number list");
      }
    }

    if (r.equation_text) {
      std::optional<std::string> expr_side =
          r.equation_has_slots
              ? std::optional<std::string>(*r.equation_text)
              : equation_expression_side(*r.equation_text);
      if (!expr_side) {
        problems.push_back("unsupported equation shape: " + *r.equation_text);
      } else {
        auto parsed = parse_math(*expr_side, corpus_equation_options());
        if (const auto* failure = std::get_if<ParseFailure>(&parsed)) {
          problems.push_back("equation does not parse: " + failure->detail);
        } else {
          MathAst ast = std::get<MathAst>(parsed);
          if (!r.equation_has_slots) {
            std::vector<bool> used(rec.numbers.size(), false);
            ast = map_literals_to_slots(ast, rec.numbers, used);
          }
          rec.equation = ast.to_string();
          auto value = eval_ast(ast, slot_resolver(rec.numbers));
          if (!value.ok()) {
            problems.push_back("equation does not evaluate: " +
                               value.detail());
          } else if (!answers_equal(value.value(), rec.answer,
                                    *Rational::from_decimal("0.0001"))) {
            problems.push_back("equation evaluates to " +
                               value.value().to_string() + ", answer is " +
                               rec.answer.to_string());
          }
        }
      }
    }

    for (auto& p : problems) {
      result.issues.push_back(LoadIssue{rec.id, std::move(p)});
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

DatasetStats compute_stats(std::span<const MwpRecord> records) {
  DatasetStats stats;
  stats.count = records.size();
  if (records.empty()) return stats;

  double length_sum = 0.0;
  double steps_sum = 0.0;
  std::size_t with_equation = 0;
  for (const auto& rec : records) {
    length_sum += static_cast<double>(whitespace_token_count(rec.question));
    if (!rec.equation) continue;
    auto parsed = parse_math(*rec.equation, corpus_equation_options());
    if (std::holds_alternative<ParseFailure>(parsed)) continue;
    steps_sum +=
        static_cast<double>(std::get<MathAst>(parsed).binary_op_count());
    ++with_equation;
  }
  stats.avg_input_length = length_sum / static_cast<double>(records.size());
  stats.records_without_equation = records.size() - with_equation;
  if (with_equation > 0) {
    stats.avg_reasoning_steps = steps_sum / static_cast<double>(with_equation);
  }
  return stats;
}

PerturbationFailure::PerturbationFailure(std::string record_id, int budget)
    : std::runtime_error("perturbation budget (" + std::to_string(budget) +
                         ") exhausted for record " + record_id),
      record_id_(std::move(record_id)) {}

UnsupportedRecord::UnsupportedRecord(std::string record_id, std::string why)
    : std::runtime_error("record " + record_id + ": " + why),
      record_id_(std::move(record_id)) {}

MwpRecord perturb_numbers(const MwpRecord& record, std::uint64_t rng_seed,
                          std::int64_t range_min, std::int64_t range_max,
                          int budget) {
  if (range_min > range_max) {
    throw std::invalid_argument("perturb_numbers: range_min exceeds range_max");
  }
  if (!record.equation) {
    throw UnsupportedRecord(record.id, "no equation to recompute the answer");
  }
  auto parsed = parse_math(*record.equation, corpus_equation_options());
  if (std::holds_alternative<ParseFailure>(parsed)) {
    throw UnsupportedRecord(record.id, "equation does not parse");
  }
  const MathAst& ast = std::get<MathAst>(parsed);

  const auto spans = extract_number_spans(record.question);
  if (spans.size() != record.numbers.size()) {
    throw UnsupportedRecord(record.id,
                            "question numbers out of sync with number list");
  }

  rng::Rng rng(rng_seed);
  std::vector<Rational> draw(record.numbers.size());
  for (int attempt = 0; attempt < budget; ++attempt) {
    for (auto& v : draw) {
      v = Rational(static_cast<long long>(rng.range(range_min, range_max)));
    }
    auto value = eval_ast(ast, slot_resolver(draw));
    if (!value.ok()) continue;
    if (classify_answer(value.value()) != record.answer_type) continue;

    MwpRecord out;
    out.id = record.id;
    out.question = record.question;
    for (std::size_t i = spans.size(); i-- > 0;) {
      out.question.replace(spans[i].pos, spans[i].len, draw[i].to_string());
    }
    out.numbers = draw;
    out.equation = record.equation;
    out.answer = value.value();
    out.answer_type = record.answer_type;
    return out;
  }
  throw PerturbationFailure(record.id, budget);
}

EvalReport evaluate_predictions(std::span<const GoldAnswer> gold,
                                std::span<const Prediction> preds,
                                OutputFormat format, const Rational& rel_tol) {
  std::map<std::string, const Rational*> answers;
  for (const auto& g : gold) {
    if (!answers.emplace(g.id, &g.answer).second) {
      throw std::invalid_argument("duplicate gold id: " + g.id);
    }
  }

  EvalReport report;
  report.total = preds.size();
  std::map<std::string, bool> seen;
  for (const auto& p : preds) {
    if (!seen.emplace(p.id, true).second) {
      throw std::invalid_argument("duplicate prediction id: " + p.id);
    }
    auto it = answers.find(p.id);
    if (it == answers.end()) {
      throw std::invalid_argument("prediction id not in gold: " + p.id);
    }
    ExecOutcome outcome = [&] {
      switch (format) {
        case OutputFormat::CodeStyle: return run_program_text(p.text);
        case OutputFormat::MathExpr: return eval_math(p.text);
        case OutputFormat::AnswerOnly: return parse_answer_text(p.text);
      }
      return ExecOutcome::fail(FailKind::ParseError, "bad format");
    }();
    if (!outcome.ok()) {
      ++report.failures[outcome.failure()];
      continue;
    }
    if (answers_equal(outcome.value(), *it->second, rel_tol)) {
      ++report.correct;
    } else {
      ++report.wrong_answer;
    }
  }
  if (report.total > 0) {
    report.accuracy = static_cast<double>(report.correct) /
                      static_cast<double>(report.total);
  }
  return report;
}

std::vector<GoldAnswer> gold_answers(std::span<const MwpRecord> records) {
  std::vector<GoldAnswer> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(GoldAnswer{r.id, r.answer});
  return out;
}

std::vector<GoldAnswer> gold_answers(std::span<const MsatExample> examples) {
  std::vector<GoldAnswer> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    auto answer = Rational::from_decimal(e.answer);
    if (!answer) {
      throw std::runtime_error("example " + e.id + ": bad answer text");
    }
    out.push_back(GoldAnswer{e.id, *answer});
  }
  return out;
}

std::string template_inventory_hash(
    std::span<const EquationTemplate> tmpls) {
  std::uint64_t h = 1469598103934665603ull;
  auto feed = [&h](std::string_view s) {
    for (char c : s) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ull;
    }
  };
  for (const auto& t : tmpls) {
    feed(std::to_string(t.id()));
    feed(":");
    for (Op op : t.operators()) {
      const char c = op_char(op);
      feed(std::string_view(&c, 1));
    }
    feed(";");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(buf);
}

MsatExample make_msat_example(const GenConfig& config,
                              std::span<const EquationTemplate> inventory,
                              std::uint64_t index) {
  GeneratedExample gen = generate_one(config, inventory, index);
  const SolutionTree sol = invert(gen.instance);
  if (!verify_solution(gen.instance, sol)) {
    throw std::logic_error("generated solution failed verification at index " +
                           std::to_string(index));
  }
  MsatExample ex;
  ex.id = "msat-" + std::to_string(index);
  ex.input = render_input(gen.instance);
  ex.output_code = to_text(emit_code(sol, gen.instance));
  ex.output_math = emit_math(sol, gen.instance);
  ex.answer = emit_answer_only(sol, gen.instance);
  ex.num_steps = reasoning_steps(gen.tmpl);
  ex.template_id = gen.tmpl.id();
  ex.seed = rng::derive_seed(config.seed, index);
  return ex;
}

std::string msat_example_to_json_line(const MsatExample& ex) {
  ordered_json j;
  j["id"] = ex.id;
  j["input"] = ex.input;
  j["output_code"] = ex.output_code;
  j["output_math"] = ex.output_math;
  j["answer"] = ex.answer;
  j["num_steps"] = ex.num_steps;
  j["template_id"] = ex.template_id;
  j["seed"] = ex.seed;
  return j.dump();
}

MsatExample msat_example_from_json_line(std::string_view line) {
  const json j = json::parse(line);
  MsatExample ex;
  ex.id = require_field(j, "id", "record").get<std::string>();
  ex.input = require_field(j, "input", ex.id).get<std::string>();
  ex.output_code = require_field(j, "output_code", ex.id).get<std::string>();
  ex.output_math = require_field(j, "output_math", ex.id).get<std::string>();
  const auto& answer = require_field(j, "answer", ex.id);
  ex.answer = answer.is_string() ? answer.get<std::string>() : answer.dump();
  ex.num_steps = require_field(j, "num_steps", ex.id).get<int>();
  ex.template_id = require_field(j, "template_id", ex.id).get<int>();
  ex.seed = require_field(j, "seed", ex.id).get<std::uint64_t>();
  return ex;
}

std::string DatasetManifest::to_json_text() const {
  ordered_json j;
  j["format_version"] = format_version;
  j["count"] = count;
  j["split_eval"] = split_eval;
  j["seed"] = config.seed;
  j["max_operators"] = config.max_operators;
  if (config.operator_count_weights.empty()) {
    j["operator_count_weights"] = nullptr;  // uniform
  } else {
    j["operator_count_weights"] = config.operator_count_weights;
  }
  j["value_min"] = config.value_min;
  j["value_max"] = config.value_max;
  j["max_rejections"] = config.max_rejections;
  j["randomize_context_order"] = config.randomize_context_order;
  j["template_inventory_hash"] = inventory_hash;
  j["train_file"] = train_file;
  j["train_count"] = train_count;
  j["eval_file"] = eval_file;
  j["eval_count"] = eval_count;
  j["avg_num_steps"] = avg_num_steps;
  return j.dump(2) + "\n";
}

namespace {

unsigned configured_thread_count() {
  if (const char* env = std::getenv("MSAT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 64) {
      return static_cast<unsigned>(v);
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : std::min(hw, 8u);
}

}  // namespace

DatasetManifest write_msat_dataset(const GenConfig& config,
                                   std::uint64_t count,
                                   std::uint64_t split_eval,
                                   const std::filesystem::path& out_dir) {
  config.validate();
  if (count == 0) {
    throw std::invalid_argument("write_msat_dataset: count must be positive");
  }
  if (split_eval >= count) {
    throw std::invalid_argument("eval split exceeds count");
  }
  std::filesystem::create_directories(out_dir);

  const auto inventory = enumerate_templates(config.max_operators);

  std::vector<std::string> lines(count);
  std::vector<int> steps(count);

  const unsigned threads = static_cast<unsigned>(
      std::min<std::uint64_t>(configured_thread_count(),
                              std::max<std::uint64_t>(count / 256, 1)));
  if (threads <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) {
      MsatExample ex = make_msat_example(config, inventory, i);
      steps[i] = ex.num_steps;
      lines[i] = msat_example_to_json_line(ex);
    }
  } else {
    std::atomic<std::uint64_t> next_block{0};
    std::atomic<bool> abort{false};
    constexpr std::uint64_t kBlock = 512;
    const std::uint64_t n_blocks = (count + kBlock - 1) / kBlock;
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
      try {
        for (;;) {
          const std::uint64_t b = next_block.fetch_add(1);
          if (b >= n_blocks || abort.load()) return;
          const std::uint64_t lo = b * kBlock;
          const std::uint64_t hi = std::min(lo + kBlock, count);
          for (std::uint64_t i = lo; i < hi; ++i) {
            MsatExample ex = make_msat_example(config, inventory, i);
            steps[i] = ex.num_steps;
            lines[i] = msat_example_to_json_line(ex);
          }
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        abort.store(true);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
  }

  DatasetManifest manifest;
  manifest.config = config;
  manifest.count = count;
  manifest.split_eval = split_eval;
  manifest.inventory_hash = template_inventory_hash(inventory);
  manifest.train_count = count - split_eval;
  manifest.eval_count = split_eval;
  double steps_sum = 0.0;
  for (int s : steps) steps_sum += s;
  manifest.avg_num_steps = steps_sum / static_cast<double>(count);

  auto write_lines = [&lines](const std::filesystem::path& path,
                              std::uint64_t lo, std::uint64_t hi) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write file: " + path.string());
    }
    for (std::uint64_t i = lo; i < hi; ++i) {
      out << lines[i] << '\n';
    }
  };
  write_lines(out_dir / manifest.train_file, 0, manifest.train_count);
  write_lines(out_dir / manifest.eval_file, manifest.train_count, count);

  std::ofstream mf(out_dir / "manifest.json", std::ios::binary);
  if (!mf) {
    throw std::runtime_error("cannot write manifest in " + out_dir.string());
  }
  mf << manifest.to_json_text();
  return manifest;
}

std::vector<MsatExample> read_msat_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<MsatExample> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      out.push_back(msat_example_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::vector<Prediction> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      const json j = json::parse(line);
      Prediction p;
      p.id = json_to_id(require_field(j, "id", "prediction"));
      p.text = require_field(j, "prediction", p.id).get<std::string>();
      out.push_back(std::move(p));
    } catch (const std::exception& e) {
      throw std::runtime_error(path.string() + ": line " +
                               std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

VerifyReport verify_msat_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  VerifyReport report;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    ++report.checked;
    MsatExample ex;
    try {
      ex = msat_example_from_json_line(line);
    } catch (const std::exception&) {
      report.failed_ids.push_back("line:" + std::to_string(line_no));
      continue;
    }
    const ExecOutcome code = run_program_text(ex.output_code);
    const ExecOutcome math = eval_math(ex.output_math);
    const auto answer = Rational::from_decimal(ex.answer);
    const bool ok = code.ok() && math.ok() && answer.has_value() &&
                    code.value() == math.value() && math.value() == *answer;
    if (!ok) report.failed_ids.push_back(ex.id);
  }
  return report;
}

void write_mwp_jsonl(std::span<const MwpRecord> records,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write file: " + path.string());
  }
  for (const auto& rec : records) {
    ordered_json j;
    j["id"] = rec.id;
    j["question"] = rec.question;
    auto numbers = json::array();
    for (const auto& n : rec.numbers) numbers.push_back(n.to_string());
    j["numbers"] = numbers;
    if (rec.equation) {
      j["equation"] = *rec.equation;
    }
    j["answer"] = rec.answer.to_string();
    j["answer_type"] = std::string(answer_type_name(rec.answer_type));
    out << j.dump() << '\n';
  }
}

std::vector<std::vector<std::string>> partition_ids(
    std::span<const std::string> ids, int folds, std::uint64_t seed) {
  if (folds < 1) {
    throw std::invalid_argument("partition_ids: folds must be positive");
  }
  std::vector<std::string> shuffled(ids.begin(), ids.end());
  rng::Rng rng(seed);
  rng.shuffle(shuffled);
  std::vector<std::vector<std::string>> out(
      static_cast<std::size_t>(folds));
  for (std::size_t i = 0; i < shuffled.size(); ++i) {
    out[i % static_cast<std::size_t>(folds)].push_back(
        std::move(shuffled[i]));
  }
  return out;
}

}  // namespace msat
