#pragma once

// Operators, symbols, expression trees and the equation template inventory.
//
// A template is a left-deep chain of binary operators:
//
//     ((s0 op1 s1) op2 s2) op3 s3 = result
//
// so a template with k operators has k+1 leaf slots plus one result slot.
// Enumeration walks operator sequences in base-4 order (+ < - < * < /),
// grouped by operator count, which makes template ids dense and stable.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "msat/rational.hpp"

namespace msat {

enum class Op : std::uint8_t { Add, Sub, Mul, Div };

inline constexpr int kOpCount = 4;

char op_char(Op op);
std::optional<Op> op_from_char(char c);

// A single capitalized letter A-Z. Within one equation all symbols are
// distinct; bind_symbols enforces that.
class Symbol {
 public:
  explicit Symbol(char name);
  char name() const { return name_; }
  auto operator<=>(const Symbol&) const = default;

 private:
  char name_;
};

// Immutable binary expression tree over symbols. Nodes are shared, so
// copying is cheap and subtrees can be reused when equations are inverted.
class Expr {
 public:
  static Expr leaf(Symbol s);
  static Expr branch(Op op, Expr left, Expr right);

  bool is_leaf() const;
  Symbol symbol() const;  // leaf nodes only
  Op op() const;          // branch nodes only
  const Expr& left() const;
  const Expr& right() const;

  int operator_count() const;
  bool contains(Symbol s) const;
  // Leaves from left to right, in tree order.
  std::vector<Symbol> leaves_in_order() const;

  bool operator==(const Expr& other) const;  // structural equality

  struct Branch;
  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expr::Branch {
  Op op;
  Expr left;
  Expr right;
};

struct Expr::Node {
  std::variant<Symbol, Branch> data;
};

// Evaluates the tree with exact rational arithmetic. Returns nullopt when a
// symbol is missing from `values` or a division by zero occurs.
std::optional<Rational> evaluate(const Expr& expr,
                                 const std::map<Symbol, Rational>& values);

class EquationTemplate {
 public:
  EquationTemplate(int id, std::vector<Op> ops);

  int id() const { return id_; }
  // Chain operators, innermost first.
  const std::vector<Op>& operators() const { return ops_; }
  int operator_count() const { return static_cast<int>(ops_.size()); }
  int leaf_count() const { return operator_count() + 1; }
  // Leaf slots plus the result slot.
  int placeholder_count() const { return leaf_count() + 1; }

 private:
  int id_;
  std::vector<Op> ops_;
};

struct Equation {
  int template_id;
  Expr lhs;
  Symbol result;

  // Leaf symbols left to right, result last.
  std::vector<Symbol> symbols_in_order() const;
  bool has_symbol(Symbol s) const;
};

// All templates with 1..max_operators operators, ids assigned 0,1,... in
// enumeration order. max_operators must be in [1, 8].
std::vector<EquationTemplate> enumerate_templates(int max_operators);

// Number of templates with exactly k operators preceding count k in the
// enumeration, i.e. the id of the first k-operator template.
std::uint64_t template_id_offset(int k);

// Calculation steps needed to solve for any single unknown: the operator
// count.
int reasoning_steps(const EquationTemplate& tmpl);

// Binds leaf slots to names[0..k] left to right and the result slot to
// names[k+1]. Names must be pairwise distinct.
Equation bind_symbols(const EquationTemplate& tmpl,
                      std::span<const Symbol> names);

// Infix rendering used by the task input text: parentheses around any
// non-leaf left operand of * or / and around any non-leaf right operand.
std::string render_expr(const Expr& expr);

}  // namespace msat
