#include "msat/emit.hpp"

#include <cctype>
#include <map>

namespace msat {

namespace {

std::string emit_node(const Expr& expr, const Instance& instance,
                      bool is_root, Program& program,
                      std::map<Symbol, std::string>& assigned, int& next_n,
                      int& next_m) {
  if (expr.is_leaf()) {
    const Symbol s = expr.symbol();
    auto it = assigned.find(s);
    if (it != assigned.end()) return it->second;
    std::string name = "N" + std::to_string(next_n++);
    program.statements.push_back(AssignStmt{name, instance.value_of(s)});
    assigned.emplace(s, name);
    return name;
  }
  std::string lhs = emit_node(expr.left(), instance, false, program, assigned,
                              next_n, next_m);
  std::string rhs = emit_node(expr.right(), instance, false, program, assigned,
                              next_n, next_m);
  std::string name = is_root ? "Ans" : "M" + std::to_string(next_m++);
  program.statements.push_back(
      ComputeStmt{name, std::move(lhs), expr.op(), std::move(rhs)});
  return name;
}

}  // namespace

Program emit_code(const SolutionTree& sol, const Instance& instance) {
  Program program;
  std::map<Symbol, std::string> assigned;
  int next_n = 0;
  int next_m = 0;
  const std::string root = emit_node(sol.expr, instance, true, program,
                                     assigned, next_n, next_m);
  if (root != "Ans") {
    // Single-leaf solution (cannot arise from templates, which always have
    // at least one operator): still expose the value as Ans.
    program.statements.push_back(CopyStmt{"Ans", root});
  }
  return program;
}

std::string emit_math(const SolutionTree& sol, const Instance& instance) {
  auto render = [&instance](auto&& self, const Expr& e) -> std::string {
    if (e.is_leaf()) return instance.value_of(e.symbol()).to_string();
    return "(" + self(self, e.left()) + op_char(e.op()) +
           self(self, e.right()) + ")";
  };
  return render(render, sol.expr);
}

std::string emit_answer_only(const SolutionTree& sol,
                             const Instance& instance) {
  (void)sol;
  return instance.value_of(instance.question_var).to_string();
}

std::vector<std::string> digit_tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string pending;  // current non-digit run
  auto flush = [&] {
    if (!pending.empty()) {
      out.push_back(std::move(pending));
      pending.clear();
    }
  };

  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      flush();
      ++i;
      continue;
    }
    if (std::isdigit(c)) {
      flush();
      out.emplace_back(1, text[i]);
      ++i;
      continue;
    }
    if (text[i] == '.') {
      std::size_t j = i;
      while (j < n && text[j] == '.') ++j;
      const bool next_is_other =
          j < n && !std::isspace(static_cast<unsigned char>(text[j])) &&
          !std::isdigit(static_cast<unsigned char>(text[j]));
      if (!pending.empty() || next_is_other) {
        pending.append(text.substr(i, j - i));
      } else {
        out.emplace_back(text.substr(i, j - i));
      }
      i = j;
      continue;
    }
    pending += text[i];
    ++i;
  }
  flush();
  return out;
}

}  // namespace msat
