#pragma once

// Parser and executor for the code-style program format, plus an exact
// infix-expression evaluator. This is the verification and scoring engine:
// everything runs on exact rationals.
//
// Program grammar (bit-exact; no spaces, one statement per line):
//
//   program := line ("\n" line)*
//   line    := VAR "=" rhs
//   rhs     := NUM | VAR OPC VAR
//   VAR     := "N" DIGITS | "M" DIGITS | "Ans"
//   OPC     := "+" | "-" | "*" | "/"
//   NUM     := DIGITS ("." DIGITS)?
//
// Emitted programs always end with the "Ans" assignment. Execution reports
// NO_ANS when a program finishes without binding Ans, so malformed
// predictions still yield a useful failure kind.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "msat/equation.hpp"
#include "msat/rational.hpp"

namespace msat {

struct AssignStmt {
  std::string target;
  Rational value;
  bool operator==(const AssignStmt&) const = default;
};

struct ComputeStmt {
  std::string target;
  std::string lhs;
  Op op;
  std::string rhs;
  bool operator==(const ComputeStmt&) const = default;
};

// "Ans=N0". Never emitted by the generator, but accepted when parsing so
// identity-style predictions still execute.
struct CopyStmt {
  std::string target;
  std::string source;
  bool operator==(const CopyStmt&) const = default;
};

using Statement = std::variant<AssignStmt, ComputeStmt, CopyStmt>;

struct Program {
  std::vector<Statement> statements;
  bool operator==(const Program&) const = default;
};

std::string to_text(const Program& program);

enum class FailKind {
  ParseError,
  UndefinedVar,
  DivByZero,
  NoAns,
  Reassignment,
};

// Wire names used in reports: PARSE_ERROR, UNDEFINED_VAR, ...
std::string_view fail_kind_name(FailKind kind);

class ExecOutcome {
 public:
  static ExecOutcome success(Rational value);
  static ExecOutcome fail(FailKind kind, std::string detail);

  bool ok() const { return value_.has_value(); }
  const Rational& value() const;  // requires ok()
  FailKind failure() const;       // requires !ok()
  const std::string& detail() const { return detail_; }

 private:
  ExecOutcome() = default;
  std::optional<Rational> value_;
  std::optional<FailKind> failure_;
  std::string detail_;
};

struct ParseFailure {
  FailKind kind;
  std::string detail;
};

// Rejects malformed lines (PARSE_ERROR) and duplicate assignment targets
// (REASSIGNMENT). A trailing newline is tolerated; everything else is
// strict.
std::variant<Program, ParseFailure> parse_program(std::string_view text);

// Executes statements in order over a fresh environment and returns the
// value bound to Ans.
ExecOutcome exec_program(const Program& program);

// parse_program + exec_program with parse failures mapped into the outcome.
ExecOutcome run_program_text(std::string_view text);

// --- infix expressions ----------------------------------------------------

// Small expression AST shared by the math-output evaluator and the corpus
// equation tooling: literals, named variables, unary minus and the four
// binary operators.
class MathAst {
 public:
  struct Literal;
  struct Var;
  struct Unary;
  struct Binary;
  struct Node;

  static MathAst literal(Rational value);
  static MathAst var(std::string name);
  static MathAst negate(MathAst child);
  static MathAst binary(Op op, MathAst left, MathAst right);

  template <class Visitor>
  decltype(auto) visit(Visitor&& v) const;

  int binary_op_count() const;
  // Re-renders the tree fully parenthesized, e.g. "(number0-(2*number1))".
  std::string to_string() const;

 private:
  explicit MathAst(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct MathAst::Literal {
  Rational value;
};
struct MathAst::Var {
  std::string name;
};
struct MathAst::Unary {
  MathAst child;
};
struct MathAst::Binary {
  Op op;
  MathAst left;
  MathAst right;
};
struct MathAst::Node {
  std::variant<Literal, Var, Unary, Binary> data;
};

template <class Visitor>
decltype(auto) MathAst::visit(Visitor&& v) const {
  return std::visit(std::forward<Visitor>(v), node_->data);
}

struct MathParseOptions {
  bool allow_variables = false;
  bool allow_unary_minus = false;
  // When true, whitespace between tokens is skipped (corpus equations are
  // often space-separated).
  bool allow_whitespace = true;
};

std::variant<MathAst, ParseFailure> parse_math(std::string_view text,
                                               const MathParseOptions& opts);

using VarResolver =
    std::function<std::optional<Rational>(std::string_view name)>;

ExecOutcome eval_ast(const MathAst& ast, const VarResolver& resolver);

// Parses and evaluates an arithmetic expression over decimal literals with
// the usual precedence (*,/ over +,-; left-assoc). No variables, no unary
// minus.
ExecOutcome eval_math(std::string_view text);

// Parses a bare decimal number, optionally negative; whitespace around it is
// ignored. Used for ANSWER_ONLY predictions.
ExecOutcome parse_answer_text(std::string_view text);

}  // namespace msat
