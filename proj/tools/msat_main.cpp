// Command-line surface for the multi-step arithmetic task toolkit.
//
// Subcommands: gen, verify, stats, perturb, eval, exec.
// Exit codes: 0 success, 1 data failure, 2 usage error.
// Diagnostics go to stderr, data to stdout. All randomness is derived from
// the explicit --seed flag, so identical invocations produce identical
// bytes. MSAT_THREADS optionally caps internal parallelism.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "msat/dataset.hpp"
#include "msat/emit.hpp"
#include "msat/interp.hpp"
#include "msat/rng.hpp"

namespace {

using nlohmann::ordered_json;

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    try {
      std::size_t used = 0;
      const double w = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      out.push_back(w);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad weight '" + part + "' in --weights");
    }
  }
  return out;
}

msat::OutputFormat parse_output_format(const std::string& name) {
  if (name == "code") return msat::OutputFormat::CodeStyle;
  if (name == "math") return msat::OutputFormat::MathExpr;
  if (name == "answer") return msat::OutputFormat::AnswerOnly;
  throw std::invalid_argument("unknown prediction format: " + name);
}

struct GenFlags {
  std::uint64_t count = 0;
  std::uint64_t eval = 0;
  int max_ops = 3;
  std::int64_t min_value = 0;
  std::int64_t max_value = 10000;
  int max_rejections = 1'000'000;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string weights;
  bool shuffle_context = false;
};

int cmd_gen(const GenFlags& flags) {
  msat::GenConfig config;
  config.max_operators = flags.max_ops;
  config.value_min = flags.min_value;
  config.value_max = flags.max_value;
  config.max_rejections = flags.max_rejections;
  config.seed = flags.seed;
  config.randomize_context_order = flags.shuffle_context;
  if (!flags.weights.empty()) {
    config.operator_count_weights = parse_weights(flags.weights);
  }
  const auto manifest =
      msat::write_msat_dataset(config, flags.count, flags.eval, flags.out_dir);

  std::cout << (std::filesystem::path(flags.out_dir) / "manifest.json").string()
            << "\n";
  ordered_json summary;
  summary["train_count"] = manifest.train_count;
  summary["eval_count"] = manifest.eval_count;
  summary["avg_num_steps"] = manifest.avg_num_steps;
  summary["template_inventory_hash"] = manifest.inventory_hash;
  std::cout << summary.dump() << "\n";
  return 0;
}

int cmd_verify(const std::vector<std::string>& files) {
  bool any_failed = false;
  for (const auto& file : files) {
    const auto report = msat::verify_msat_file(file);
    std::printf("%s: checked %llu, failed %zu, agreement %.3f%%\n",
                file.c_str(),
                static_cast<unsigned long long>(report.checked),
                report.failed_ids.size(), report.agreement_percent());
    if (report.checked == 0) {
      std::cerr << "warning: " << file << " contains no records\n";
    }
    for (const auto& id : report.failed_ids) {
      std::cerr << file << ": record " << id
                << " failed three-way agreement\n";
      any_failed = true;
    }
  }
  std::cout.flush();
  return any_failed ? 1 : 0;
}

int cmd_stats(const std::string& in, const std::string& format) {
  const auto loaded = msat::load_mwp(in, format);
  for (const auto& issue : loaded.issues) {
    std::cerr << "record " << issue.id << ": " << issue.message << "\n";
  }
  const auto stats = msat::compute_stats(loaded.records);
  ordered_json j;
  j["count"] = stats.count;
  if (stats.avg_input_length) j["avg_input_length"] = *stats.avg_input_length;
  if (stats.avg_reasoning_steps) {
    j["avg_reasoning_steps"] = *stats.avg_reasoning_steps;
  }
  j["records_without_equation"] = stats.records_without_equation;
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_perturb(const std::string& in, const std::string& format,
                const std::string& out, std::uint64_t seed,
                std::int64_t range_min, std::int64_t range_max, int budget) {
  const auto loaded = msat::load_mwp(in, format);
  for (const auto& issue : loaded.issues) {
    std::cerr << "record " << issue.id << ": " << issue.message << "\n";
  }
  std::vector<msat::MwpRecord> perturbed;
  perturbed.reserve(loaded.records.size());
  std::size_t failed = 0;
  for (std::size_t i = 0; i < loaded.records.size(); ++i) {
    const auto record_seed = msat::rng::derive_seed(seed, i);
    try {
      perturbed.push_back(msat::perturb_numbers(
          loaded.records[i], record_seed, range_min, range_max, budget));
    } catch (const std::exception& e) {
      std::cerr << "failed: " << e.what() << "\n";
      ++failed;
    }
  }
  msat::write_mwp_jsonl(perturbed, out);

  ordered_json summary;
  summary["total"] = loaded.records.size();
  summary["perturbed"] = perturbed.size();
  summary["failed"] = failed;
  std::cout << summary.dump() << "\n";
  return failed > 0 ? 1 : 0;
}

int cmd_eval(const std::string& gold_path, const std::string& gold_format,
             const std::string& preds_path, const std::string& pred_format,
             const std::string& rel_tol_text) {
  const auto rel_tol = msat::Rational::from_decimal(rel_tol_text);
  if (!rel_tol || rel_tol->sign() < 0) {
    throw std::invalid_argument("--rel-tol must be a non-negative number");
  }

  std::vector<msat::GoldAnswer> gold;
  if (gold_format == "msat") {
    const auto examples = msat::read_msat_file(gold_path);
    gold = msat::gold_answers(examples);
  } else {
    const auto loaded = msat::load_mwp(gold_path, gold_format);
    gold = msat::gold_answers(loaded.records);
  }
  const auto preds = msat::read_predictions(preds_path);
  const auto report = msat::evaluate_predictions(
      gold, preds, parse_output_format(pred_format), *rel_tol);

  ordered_json j;
  j["total"] = report.total;
  j["correct"] = report.correct;
  if (report.accuracy) j["accuracy"] = *report.accuracy;
  j["wrong_answer"] = report.wrong_answer;
  ordered_json failures = ordered_json::object();
  for (const auto& [kind, count] : report.failures) {
    failures[std::string(msat::fail_kind_name(kind))] = count;
  }
  j["failures"] = failures;
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_exec() {
  std::ostringstream in;
  in << std::cin.rdbuf();
  const auto outcome = msat::run_program_text(in.str());
  if (!outcome.ok()) {
    std::cerr << "error: " << msat::fail_kind_name(outcome.failure()) << ": "
              << outcome.detail() << "\n";
    return 1;
  }
  std::cout << outcome.value().to_string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-step arithmetic task toolkit"};
  app.require_subcommand(1);

  GenFlags gen_flags;
  auto* gen = app.add_subcommand(
      "gen", "generate a synthetic dataset (train/eval split + manifest)");
  gen->add_option("--count", gen_flags.count, "total number of examples")
      ->required();
  gen->add_option("--eval", gen_flags.eval, "examples held out for the eval split");
  gen->add_option("--max-ops", gen_flags.max_ops,
                  "maximum operators per equation (1-8)");
  gen->add_option("--min", gen_flags.min_value, "smallest sampled value");
  gen->add_option("--max", gen_flags.max_value, "largest sampled value");
  gen->add_option("--max-rejections", gen_flags.max_rejections,
                  "sampling attempts per example before giving up");
  gen->add_option("--seed", gen_flags.seed, "root random seed")->required();
  gen->add_option("--out", gen_flags.out_dir, "output directory")->required();
  gen->add_option("--weights", gen_flags.weights,
                  "comma-separated operator-count weights, e.g. 0,0,1");
  gen->add_flag("--shuffle-context", gen_flags.shuffle_context,
                "randomize the question-context order");

  std::vector<std::string> verify_files;
  auto* verify = app.add_subcommand(
      "verify", "re-check exec = eval = answer for every dataset record");
  verify->add_option("--in", verify_files, "dataset file (repeatable)")
      ->required();

  std::string stats_in, stats_format = "jsonl";
  auto* stats = app.add_subcommand("stats", "corpus statistics");
  stats->add_option("--in", stats_in, "corpus file")->required();
  stats->add_option("--format", stats_format,
                    "mawps | svamp | masked | jsonl | msat");

  std::string pt_in, pt_format = "jsonl", pt_out;
  std::uint64_t pt_seed = 0;
  std::int64_t pt_min = 10, pt_max = 10000;
  int pt_budget = 10000;
  auto* perturb = app.add_subcommand(
      "perturb", "replace question numbers with large ones, keeping the answer type");
  perturb->add_option("--in", pt_in, "corpus file")->required();
  perturb->add_option("--format", pt_format,
                      "mawps | svamp | masked | jsonl | msat");
  perturb->add_option("--out", pt_out, "output file (canonical jsonl)")
      ->required();
  perturb->add_option("--seed", pt_seed, "root random seed")->required();
  perturb->add_option("--min", pt_min, "smallest replacement number");
  perturb->add_option("--max", pt_max, "largest replacement number");
  perturb->add_option("--budget", pt_budget,
                      "rejection attempts per record before giving up");

  std::string ev_gold, ev_gold_format = "msat", ev_preds, ev_pred_format,
              ev_rel_tol = "0.0001";
  auto* eval = app.add_subcommand("eval", "score a prediction file");
  eval->add_option("--gold", ev_gold, "gold dataset file")->required();
  eval->add_option("--gold-format", ev_gold_format,
                   "msat | mawps | svamp | masked | jsonl");
  eval->add_option("--preds", ev_preds, "prediction file (jsonl)")->required();
  eval->add_option("--pred-format", ev_pred_format, "code | math | answer")
      ->required();
  eval->add_option("--rel-tol", ev_rel_tol,
                   "relative tolerance for answer comparison");

  auto* exec = app.add_subcommand(
      "exec", "execute one program from stdin and print its value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      if (gen_flags.eval >= gen_flags.count) {
        std::cerr << "error: eval split exceeds count\n";
        return 2;
      }
      return cmd_gen(gen_flags);
    }
    if (verify->parsed()) return cmd_verify(verify_files);
    if (stats->parsed()) return cmd_stats(stats_in, stats_format);
    if (perturb->parsed()) {
      return cmd_perturb(pt_in, pt_format, pt_out, pt_seed, pt_min, pt_max,
                         pt_budget);
    }
    if (eval->parsed()) {
      return cmd_eval(ev_gold, ev_gold_format, ev_preds, ev_pred_format,
                      ev_rel_tol);
    }
    if (exec->parsed()) return cmd_exec();
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
