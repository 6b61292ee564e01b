#include "msat/interp.hpp"

#include <cctype>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace msat {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// VAR := "N" DIGITS | "M" DIGITS | "Ans"
bool is_program_var(std::string_view s) {
  if (s == "Ans") return true;
  if (s.size() < 2) return false;
  if (s[0] != 'N' && s[0] != 'M') return false;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (!is_digit(s[i])) return false;
  }
  return true;
}

bool is_program_num(std::string_view s) {
  std::size_t i = 0;
  if (i >= s.size() || !is_digit(s[i])) return false;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i < s.size() && s[i] == '.') {
    ++i;
    if (i >= s.size() || !is_digit(s[i])) return false;
    while (i < s.size() && is_digit(s[i])) ++i;
  }
  return i == s.size();
}

}  // namespace

std::string to_text(const Program& program) {
  std::string out;
  for (std::size_t i = 0; i < program.statements.size(); ++i) {
    if (i > 0) out += '\n';
    const auto& stmt = program.statements[i];
    if (const auto* a = std::get_if<AssignStmt>(&stmt)) {
      out += a->target;
      out += '=';
      out += a->value.to_string();
    } else if (const auto* cp = std::get_if<CopyStmt>(&stmt)) {
      out += cp->target;
      out += '=';
      out += cp->source;
    } else {
      const auto& c = std::get<ComputeStmt>(stmt);
      out += c.target;
      out += '=';
      out += c.lhs;
      out += op_char(c.op);
      out += c.rhs;
    }
  }
  return out;
}

std::string_view fail_kind_name(FailKind kind) {
  switch (kind) {
    case FailKind::ParseError: return "PARSE_ERROR";
    case FailKind::UndefinedVar: return "UNDEFINED_VAR";
    case FailKind::DivByZero: return "DIV_BY_ZERO";
    case FailKind::NoAns: return "NO_ANS";
    case FailKind::Reassignment: return "REASSIGNMENT";
  }
  return "UNKNOWN";
}

ExecOutcome ExecOutcome::success(Rational value) {
  ExecOutcome o;
  o.value_ = std::move(value);
  return o;
}

ExecOutcome ExecOutcome::fail(FailKind kind, std::string detail) {
  ExecOutcome o;
  o.failure_ = kind;
  o.detail_ = std::move(detail);
  return o;
}

const Rational& ExecOutcome::value() const {
  if (!value_) throw std::logic_error("ExecOutcome: no value");
  return *value_;
}

FailKind ExecOutcome::failure() const {
  if (!failure_) throw std::logic_error("ExecOutcome: no failure");
  return *failure_;
}

std::variant<Program, ParseFailure> parse_program(std::string_view text) {
  // Tolerate trailing newlines / carriage returns at end of input.
  while (!text.empty() &&
         (text.back() == '\n' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (text.empty()) {
    return ParseFailure{FailKind::NoAns, "empty program"};
  }

  Program program;
  std::unordered_set<std::string> targets;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = eol == std::string_view::npos
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return ParseFailure{FailKind::ParseError, where + ": missing '='"};
    }
    std::string target(line.substr(0, eq));
    if (!is_program_var(target)) {
      return ParseFailure{FailKind::ParseError,
                          where + ": bad variable name '" + target + "'"};
    }
    if (!targets.insert(target).second) {
      return ParseFailure{FailKind::Reassignment,
                          where + ": duplicate target '" + target + "'"};
    }
    const std::string_view rhs = line.substr(eq + 1);
    if (rhs.empty()) {
      return ParseFailure{FailKind::ParseError,
                          where + ": empty right-hand side"};
    }
    if (is_program_num(rhs)) {
      auto value = Rational::from_decimal(rhs);
      if (!value) {
        return ParseFailure{FailKind::ParseError,
                            where + ": bad number literal"};
      }
      program.statements.push_back(AssignStmt{std::move(target), *value});
    } else if (is_program_var(rhs)) {
      program.statements.push_back(
          CopyStmt{std::move(target), std::string(rhs)});
    } else {
      // VAR OPC VAR: the operator is the first +-*/ after the opening
      // variable token.
      std::size_t op_pos = std::string_view::npos;
      for (std::size_t i = 1; i < rhs.size(); ++i) {
        if (op_from_char(rhs[i]).has_value()) {
          op_pos = i;
          break;
        }
      }
      if (op_pos == std::string_view::npos) {
        return ParseFailure{FailKind::ParseError,
                            where + ": expected NUM or VAR OP VAR"};
      }
      std::string lhs(rhs.substr(0, op_pos));
      std::string rhs_var(rhs.substr(op_pos + 1));
      if (!is_program_var(lhs) || !is_program_var(rhs_var)) {
        return ParseFailure{FailKind::ParseError,
                            where + ": bad operand in '" +
                                std::string(rhs) + "'"};
      }
      program.statements.push_back(ComputeStmt{
          std::move(target), std::move(lhs), *op_from_char(rhs[op_pos]),
          std::move(rhs_var)});
    }

    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return program;
}

ExecOutcome exec_program(const Program& program) {
  std::unordered_map<std::string, Rational> env;
  auto lookup = [&env](const std::string& name)
      -> std::optional<Rational> {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };

  for (const auto& stmt : program.statements) {
    std::string target;
    Rational value;
    if (const auto* a = std::get_if<AssignStmt>(&stmt)) {
      target = a->target;
      value = a->value;
    } else if (const auto* cp = std::get_if<CopyStmt>(&stmt)) {
      target = cp->target;
      auto src = lookup(cp->source);
      if (!src) {
        return ExecOutcome::fail(FailKind::UndefinedVar,
                                 "undefined variable '" + cp->source + "'");
      }
      value = *src;
    } else {
      const auto& c = std::get<ComputeStmt>(stmt);
      target = c.target;
      auto l = lookup(c.lhs);
      if (!l) {
        return ExecOutcome::fail(FailKind::UndefinedVar,
                                 "undefined variable '" + c.lhs + "'");
      }
      auto r = lookup(c.rhs);
      if (!r) {
        return ExecOutcome::fail(FailKind::UndefinedVar,
                                 "undefined variable '" + c.rhs + "'");
      }
      switch (c.op) {
        case Op::Add: value = *l + *r; break;
        case Op::Sub: value = *l - *r; break;
        case Op::Mul: value = *l * *r; break;
        case Op::Div: {
          auto q = Rational::checked_div(*l, *r);
          if (!q) {
            return ExecOutcome::fail(FailKind::DivByZero,
                                     "division by zero in '" + c.target + "'");
          }
          value = *q;
          break;
        }
      }
    }
    if (!env.emplace(target, std::move(value)).second) {
      return ExecOutcome::fail(FailKind::Reassignment,
                               "variable '" + target + "' assigned twice");
    }
  }

  auto it = env.find("Ans");
  if (it == env.end()) {
    return ExecOutcome::fail(FailKind::NoAns, "program never binds Ans");
  }
  return ExecOutcome::success(it->second);
}

ExecOutcome run_program_text(std::string_view text) {
  auto parsed = parse_program(text);
  if (const auto* failure = std::get_if<ParseFailure>(&parsed)) {
    return ExecOutcome::fail(failure->kind, failure->detail);
  }
  return exec_program(std::get<Program>(parsed));
}

// --- infix expressions ----------------------------------------------------

MathAst MathAst::literal(Rational value) {
  return MathAst(std::make_shared<const Node>(Node{Literal{std::move(value)}}));
}

MathAst MathAst::var(std::string name) {
  return MathAst(std::make_shared<const Node>(Node{Var{std::move(name)}}));
}

MathAst MathAst::negate(MathAst child) {
  return MathAst(std::make_shared<const Node>(Node{Unary{std::move(child)}}));
}

MathAst MathAst::binary(Op op, MathAst left, MathAst right) {
  return MathAst(std::make_shared<const Node>(
      Node{Binary{op, std::move(left), std::move(right)}}));
}

int MathAst::binary_op_count() const {
  return visit([](const auto& node) -> int {
    using T = std::decay_t<decltype(node)>;
    if constexpr (std::is_same_v<T, Literal> || std::is_same_v<T, Var>) {
      return 0;
    } else if constexpr (std::is_same_v<T, Unary>) {
      return node.child.binary_op_count();
    } else {
      return 1 + node.left.binary_op_count() + node.right.binary_op_count();
    }
  });
}

std::string MathAst::to_string() const {
  return visit([](const auto& node) -> std::string {
    using T = std::decay_t<decltype(node)>;
    if constexpr (std::is_same_v<T, Literal>) {
      return node.value.to_string();
    } else if constexpr (std::is_same_v<T, Var>) {
      return node.name;
    } else if constexpr (std::is_same_v<T, Unary>) {
      return "(-" + node.child.to_string() + ")";
    } else {
      return "(" + node.left.to_string() + op_char(node.op) +
             node.right.to_string() + ")";
    }
  });
}

namespace {

class MathParser {
 public:
  MathParser(std::string_view text, const MathParseOptions& opts)
      : text_(text), opts_(opts) {}

  std::variant<MathAst, ParseFailure> parse() {
    auto expr = parse_sum();
    if (failure_) return *failure_;
    skip_ws();
    if (pos_ != text_.size()) {
      return ParseFailure{FailKind::ParseError,
                          "trailing input at offset " + std::to_string(pos_)};
    }
    return std::move(*expr);
  }

 private:
  void skip_ws() {
    if (!opts_.allow_whitespace) return;
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  std::optional<char> peek() {
    skip_ws();
    if (pos_ >= text_.size()) return std::nullopt;
    return text_[pos_];
  }

  std::optional<MathAst> fail(std::string detail) {
    if (!failure_) failure_ = ParseFailure{FailKind::ParseError,
                                           std::move(detail)};
    return std::nullopt;
  }

  std::optional<MathAst> parse_sum() {
    auto left = parse_term();
    if (!left) return std::nullopt;
    while (auto c = peek()) {
      if (*c != '+' && *c != '-') break;
      ++pos_;
      auto right = parse_term();
      if (!right) return std::nullopt;
      left = MathAst::binary(*c == '+' ? Op::Add : Op::Sub, std::move(*left),
                             std::move(*right));
    }
    return left;
  }

  std::optional<MathAst> parse_term() {
    auto left = parse_factor();
    if (!left) return std::nullopt;
    while (auto c = peek()) {
      if (*c != '*' && *c != '/') break;
      ++pos_;
      auto right = parse_factor();
      if (!right) return std::nullopt;
      left = MathAst::binary(*c == '*' ? Op::Mul : Op::Div, std::move(*left),
                             std::move(*right));
    }
    return left;
  }

  std::optional<MathAst> parse_factor() {
    auto c = peek();
    if (!c) return fail("unexpected end of expression");
    if (*c == '(') {
      ++pos_;
      auto inner = parse_sum();
      if (!inner) return std::nullopt;
      if (peek() != ')') return fail("missing ')'");
      ++pos_;
      return inner;
    }
    if (*c == '-' && opts_.allow_unary_minus) {
      ++pos_;
      auto inner = parse_factor();
      if (!inner) return std::nullopt;
      return MathAst::negate(std::move(*inner));
    }
    if (is_digit(*c)) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      if (pos_ < text_.size() && text_[pos_] == '.' &&
          pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1])) {
        ++pos_;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
      }
      auto value = Rational::from_decimal(text_.substr(start, pos_ - start));
      if (!value) return fail("bad number literal");
      return MathAst::literal(std::move(*value));
    }
    if (opts_.allow_variables &&
        (std::isalpha(static_cast<unsigned char>(*c)) || *c == '_')) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      return MathAst::var(std::string(text_.substr(start, pos_ - start)));
    }
    return fail(std::string("unexpected character '") + *c + "'");
  }

  std::string_view text_;
  MathParseOptions opts_;
  std::size_t pos_ = 0;
  std::optional<ParseFailure> failure_;
};

}  // namespace

std::variant<MathAst, ParseFailure> parse_math(std::string_view text,
                                               const MathParseOptions& opts) {
  return MathParser(text, opts).parse();
}

ExecOutcome eval_ast(const MathAst& ast, const VarResolver& resolver) {
  return ast.visit([&resolver](const auto& node) -> ExecOutcome {
    using T = std::decay_t<decltype(node)>;
    if constexpr (std::is_same_v<T, MathAst::Literal>) {
      return ExecOutcome::success(node.value);
    } else if constexpr (std::is_same_v<T, MathAst::Var>) {
      if (resolver) {
        if (auto v = resolver(node.name)) return ExecOutcome::success(*v);
      }
      return ExecOutcome::fail(FailKind::UndefinedVar,
                               "unknown variable '" + node.name + "'");
    } else if constexpr (std::is_same_v<T, MathAst::Unary>) {
      auto inner = eval_ast(node.child, resolver);
      if (!inner.ok()) return inner;
      return ExecOutcome::success(-inner.value());
    } else {
      auto l = eval_ast(node.left, resolver);
      if (!l.ok()) return l;
      auto r = eval_ast(node.right, resolver);
      if (!r.ok()) return r;
      switch (node.op) {
        case Op::Add: return ExecOutcome::success(l.value() + r.value());
        case Op::Sub: return ExecOutcome::success(l.value() - r.value());
        case Op::Mul: return ExecOutcome::success(l.value() * r.value());
        case Op::Div: {
          auto q = Rational::checked_div(l.value(), r.value());
          if (!q) {
            return ExecOutcome::fail(FailKind::DivByZero, "division by zero");
          }
          return ExecOutcome::success(*q);
        }
      }
      return ExecOutcome::fail(FailKind::ParseError, "bad operator");
    }
  });
}

ExecOutcome eval_math(std::string_view text) {
  MathParseOptions opts;
  opts.allow_variables = false;
  opts.allow_unary_minus = false;
  auto parsed = parse_math(text, opts);
  if (const auto* failure = std::get_if<ParseFailure>(&parsed)) {
    return ExecOutcome::fail(failure->kind, failure->detail);
  }
  return eval_ast(std::get<MathAst>(parsed), nullptr);
}

ExecOutcome parse_answer_text(std::string_view text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end &&
         std::isspace(static_cast<unsigned char>(text[begin]))) {
    ++begin;
  }
  while (end > begin &&
         std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  auto value = Rational::from_decimal(text.substr(begin, end - begin));
  if (!value) {
    return ExecOutcome::fail(FailKind::ParseError,
                             "not a number: '" + std::string(text) + "'");
  }
  return ExecOutcome::success(std::move(*value));
}

}  // namespace msat
