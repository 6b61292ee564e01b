#include "msat/invert.hpp"

#include <stdexcept>

namespace msat {

SolutionTree invert(const Instance& instance) {
  const Equation& eq = instance.equation;
  const Symbol q = instance.question_var;
  if (q == eq.result) {
    return SolutionTree{eq.lhs};
  }
  if (!eq.lhs.contains(q)) {
    throw std::invalid_argument(
        std::string("invert: question variable ") + q.name() +
        " does not occur in the equation");
  }

  // `value` computes the current node's value from known symbols.
  Expr value = Expr::leaf(eq.result);
  const Expr* node = &eq.lhs;
  while (!node->is_leaf()) {
    const Expr& l = node->left();
    const Expr& r = node->right();
    const bool unknown_left = l.contains(q);
    switch (node->op()) {
      case Op::Add:
        // l + r = v  =>  l = v - r ; r = v - l
        value = Expr::branch(Op::Sub, std::move(value),
                             unknown_left ? r : l);
        break;
      case Op::Sub:
        // l - r = v  =>  l = v + r ; r = l - v
        value = unknown_left
                    ? Expr::branch(Op::Add, std::move(value), r)
                    : Expr::branch(Op::Sub, l, std::move(value));
        break;
      case Op::Mul:
        // l * r = v  =>  l = v / r ; r = v / l
        value = Expr::branch(Op::Div, std::move(value),
                             unknown_left ? r : l);
        break;
      case Op::Div:
        // l / r = v  =>  l = v * r ; r = l / v
        value = unknown_left
                    ? Expr::branch(Op::Mul, std::move(value), r)
                    : Expr::branch(Op::Div, l, std::move(value));
        break;
    }
    node = unknown_left ? &l : &r;
  }
  return SolutionTree{std::move(value)};
}

bool verify_solution(const Instance& instance, const SolutionTree& sol) {
  const auto solved = evaluate(sol.expr, instance.values);
  if (!solved) return false;

  auto it = instance.values.find(instance.question_var);
  if (it == instance.values.end()) return false;
  if (*solved != it->second) return false;

  auto substituted = instance.values;
  substituted[instance.question_var] = *solved;
  const auto lhs = evaluate(instance.equation.lhs, substituted);
  if (!lhs) return false;
  auto res = substituted.find(instance.equation.result);
  return res != substituted.end() && *lhs == res->second;
}

}  // namespace msat
