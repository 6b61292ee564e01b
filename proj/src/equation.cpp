#include "msat/equation.hpp"

#include <algorithm>
#include <stdexcept>

namespace msat {

char op_char(Op op) {
  switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
  }
  throw std::logic_error("op_char: bad operator");
}

std::optional<Op> op_from_char(char c) {
  switch (c) {
    case '+': return Op::Add;
    case '-': return Op::Sub;
    case '*': return Op::Mul;
    case '/': return Op::Div;
    default: return std::nullopt;
  }
}

Symbol::Symbol(char name) : name_(name) {
  if (name < 'A' || name > 'Z') {
    throw std::invalid_argument("Symbol: name must be a capital letter A-Z");
  }
}

Expr Expr::leaf(Symbol s) {
  return Expr(std::make_shared<const Node>(Node{s}));
}

Expr Expr::branch(Op op, Expr left, Expr right) {
  return Expr(std::make_shared<const Node>(
      Node{Branch{op, std::move(left), std::move(right)}}));
}

bool Expr::is_leaf() const {
  return std::holds_alternative<Symbol>(node_->data);
}

Symbol Expr::symbol() const { return std::get<Symbol>(node_->data); }

Op Expr::op() const { return std::get<Branch>(node_->data).op; }

const Expr& Expr::left() const { return std::get<Branch>(node_->data).left; }

const Expr& Expr::right() const { return std::get<Branch>(node_->data).right; }

int Expr::operator_count() const {
  if (is_leaf()) return 0;
  return 1 + left().operator_count() + right().operator_count();
}

bool Expr::contains(Symbol s) const {
  if (is_leaf()) return symbol() == s;
  return left().contains(s) || right().contains(s);
}

std::vector<Symbol> Expr::leaves_in_order() const {
  std::vector<Symbol> out;
  auto walk = [&out](auto&& self, const Expr& e) -> void {
    if (e.is_leaf()) {
      out.push_back(e.symbol());
      return;
    }
    self(self, e.left());
    self(self, e.right());
  };
  walk(walk, *this);
  return out;
}

bool Expr::operator==(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (is_leaf() != other.is_leaf()) return false;
  if (is_leaf()) return symbol() == other.symbol();
  return op() == other.op() && left() == other.left() &&
         right() == other.right();
}

std::optional<Rational> evaluate(const Expr& expr,
                                 const std::map<Symbol, Rational>& values) {
  if (expr.is_leaf()) {
    auto it = values.find(expr.symbol());
    if (it == values.end()) return std::nullopt;
    return it->second;
  }
  auto l = evaluate(expr.left(), values);
  auto r = evaluate(expr.right(), values);
  if (!l || !r) return std::nullopt;
  switch (expr.op()) {
    case Op::Add: return *l + *r;
    case Op::Sub: return *l - *r;
    case Op::Mul: return *l * *r;
    case Op::Div: return Rational::checked_div(*l, *r);
  }
  return std::nullopt;
}

EquationTemplate::EquationTemplate(int id, std::vector<Op> ops)
    : id_(id), ops_(std::move(ops)) {
  if (ops_.empty()) {
    throw std::invalid_argument("EquationTemplate: needs at least one operator");
  }
}

std::vector<Symbol> Equation::symbols_in_order() const {
  std::vector<Symbol> out = lhs.leaves_in_order();
  out.push_back(result);
  return out;
}

bool Equation::has_symbol(Symbol s) const {
  return result == s || lhs.contains(s);
}

std::uint64_t template_id_offset(int k) {
  // 4 + 4^2 + ... + 4^(k-1) = (4^k - 4) / 3
  std::uint64_t p = 1;
  for (int i = 0; i < k; ++i) p *= kOpCount;
  return (p - 4) / 3;
}

std::vector<EquationTemplate> enumerate_templates(int max_operators) {
  if (max_operators < 1 || max_operators > 8) {
    throw std::invalid_argument(
        "enumerate_templates: max_operators must be in [1, 8]");
  }
  std::vector<EquationTemplate> out;
  int id = 0;
  for (int k = 1; k <= max_operators; ++k) {
    std::uint64_t combos = 1;
    for (int i = 0; i < k; ++i) combos *= kOpCount;
    for (std::uint64_t code = 0; code < combos; ++code) {
      std::vector<Op> ops(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i) {
        const auto shift = 2 * (k - 1 - i);
        ops[static_cast<std::size_t>(i)] =
            static_cast<Op>((code >> shift) & 3);
      }
      out.emplace_back(id++, std::move(ops));
    }
  }
  return out;
}

int reasoning_steps(const EquationTemplate& tmpl) {
  return tmpl.operator_count();
}

Equation bind_symbols(const EquationTemplate& tmpl,
                      std::span<const Symbol> names) {
  const auto expected =
      static_cast<std::size_t>(tmpl.leaf_count()) + 1;
  if (names.size() != expected) {
    throw std::invalid_argument("bind_symbols: expected " +
                                std::to_string(expected) + " names, got " +
                                std::to_string(names.size()));
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) {
      if (names[i] == names[j]) {
        throw std::invalid_argument(
            std::string("bind_symbols: duplicate symbol ") + names[i].name());
      }
    }
  }
  Expr e = Expr::leaf(names[0]);
  const auto& ops = tmpl.operators();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    e = Expr::branch(ops[i], std::move(e), Expr::leaf(names[i + 1]));
  }
  return Equation{tmpl.id(), std::move(e), names.back()};
}

std::string render_expr(const Expr& expr) {
  if (expr.is_leaf()) return std::string(1, expr.symbol().name());
  const Op op = expr.op();
  std::string l = render_expr(expr.left());
  std::string r = render_expr(expr.right());
  const bool paren_left =
      !expr.left().is_leaf() && (op == Op::Mul || op == Op::Div);
  const bool paren_right = !expr.right().is_leaf();
  std::string out;
  if (paren_left) {
    out += '(';
    out += l;
    out += ')';
  } else {
    out += l;
  }
  out += op_char(op);
  if (paren_right) {
    out += '(';
    out += r;
    out += ')';
  } else {
    out += r;
  }
  return out;
}

}  // namespace msat
