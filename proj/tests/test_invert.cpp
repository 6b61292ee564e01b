#include <doctest.h>

#include "msat/invert.hpp"
#include "msat/rng.hpp"
#include "test_util.hpp"

using namespace msat;
using msat_test::oracle_eval;

namespace {

Symbol S(char c) { return Symbol(c); }

std::vector<Symbol> syms(const char* names) {
  std::vector<Symbol> out;
  for (const char* p = names; *p; ++p) out.emplace_back(*p);
  return out;
}

Instance make_instance(const EquationTemplate& tmpl, const char* names,
                       std::initializer_list<long long> values, char question) {
  const auto name_list = syms(names);
  Equation eq = bind_symbols(tmpl, name_list);
  std::map<Symbol, Rational> map;
  auto it = values.begin();
  for (Symbol s : name_list) map.emplace(s, Rational(*it++));
  std::vector<Symbol> context;
  for (Symbol s : eq.symbols_in_order()) {
    if (s != S(question)) context.push_back(s);
  }
  return Instance{std::move(eq), std::move(map), S(question), 0,
                  std::move(context)};
}

}  // namespace

TEST_CASE("inverting A+B=C for B gives C-A") {
  const EquationTemplate add(0, {Op::Add});
  const Instance inst = make_instance(add, "ABC", {1, 2, 3}, 'B');
  const SolutionTree sol = invert(inst);
  CHECK(sol.expr ==
        Expr::branch(Op::Sub, Expr::leaf(S('C')), Expr::leaf(S('A'))));
  CHECK(*evaluate(sol.expr, inst.values) == Rational(2));
  CHECK(verify_solution(inst, sol));
}

TEST_CASE("question variable on the result side returns the tree unchanged") {
  const EquationTemplate add(0, {Op::Add});
  const Instance inst = make_instance(add, "ABC", {1, 2, 3}, 'C');
  const SolutionTree sol = invert(inst);
  CHECK(sol.expr == inst.equation.lhs);
  CHECK(verify_solution(inst, sol));
}

TEST_CASE("inverting A/B=C for B gives A/C") {
  const EquationTemplate div(3, {Op::Div});
  const Instance inst = make_instance(div, "ABC", {6, 2, 3}, 'B');
  const SolutionTree sol = invert(inst);
  CHECK(sol.expr ==
        Expr::branch(Op::Div, Expr::leaf(S('A')), Expr::leaf(S('C'))));
  CHECK(*evaluate(sol.expr, inst.values) == Rational(2));
  // substitution oracle: B=2 back into A/B=C gives 6/2 = 3 = C
  CHECK(verify_solution(inst, sol));
}

TEST_CASE("all four inverse rules, both operand sides") {
  // l - r = v, unknown right: r = l - v
  const EquationTemplate sub(1, {Op::Sub});
  const Instance s = make_instance(sub, "ABC", {9, 4, 5}, 'B');
  CHECK(invert(s).expr ==
        Expr::branch(Op::Sub, Expr::leaf(S('A')), Expr::leaf(S('C'))));
  CHECK(verify_solution(s, invert(s)));

  // l - r = v, unknown left: l = v + r
  const Instance s2 = make_instance(sub, "ABC", {9, 4, 5}, 'A');
  CHECK(invert(s2).expr ==
        Expr::branch(Op::Add, Expr::leaf(S('C')), Expr::leaf(S('B'))));
  CHECK(verify_solution(s2, invert(s2)));

  // l * r = v, unknown left: l = v / r
  const EquationTemplate mul(2, {Op::Mul});
  const Instance m = make_instance(mul, "ABC", {3, 7, 21}, 'A');
  CHECK(invert(m).expr ==
        Expr::branch(Op::Div, Expr::leaf(S('C')), Expr::leaf(S('B'))));
  CHECK(verify_solution(m, invert(m)));

  // l / r = v, unknown left: l = v * r
  const EquationTemplate div(3, {Op::Div});
  const Instance d = make_instance(div, "ABC", {6, 2, 3}, 'A');
  CHECK(invert(d).expr ==
        Expr::branch(Op::Mul, Expr::leaf(S('C')), Expr::leaf(S('B'))));
  CHECK(verify_solution(d, invert(d)));
}

TEST_CASE("verify_solution rejects a wrong tree") {
  const EquationTemplate add(0, {Op::Add});
  const Instance inst = make_instance(add, "ABC", {1, 2, 3}, 'B');
  const SolutionTree wrong{
      Expr::branch(Op::Add, Expr::leaf(S('C')), Expr::leaf(S('A')))};
  CHECK_FALSE(verify_solution(inst, wrong));  // 4 != 2
}

TEST_CASE("verify_solution returns false on evaluation failure") {
  const EquationTemplate mul(2, {Op::Mul});
  // A*B=C with A=0,B=0,C=0; solving for A would divide by B=0
  const Instance inst = make_instance(mul, "ABC", {0, 0, 0}, 'A');
  const SolutionTree sol = invert(inst);
  CHECK_FALSE(verify_solution(inst, sol));
}

TEST_CASE("invert rejects a question variable outside the equation") {
  const EquationTemplate add(0, {Op::Add});
  Instance inst = make_instance(add, "ABC", {1, 2, 3}, 'B');
  inst.question_var = S('Z');
  CHECK_THROWS_AS(invert(inst), std::invalid_argument);
}

TEST_CASE("invert is pure") {
  const EquationTemplate tmpl(50, {Op::Mul, Op::Add, Op::Div});
  GenConfig config;
  const Instance inst = instantiate(tmpl, syms("ABCDE"), config, 99);
  CHECK(invert(inst).expr == invert(inst).expr);
}

TEST_CASE("exhaustive inversion check over all templates and positions") {
  // brute-force oracle: every template at depth <= 3, every question
  // variable, randomized instantiations; checks both verify_solution and a
  // test-local substitution oracle
  GenConfig config;
  const auto templates = enumerate_templates(3);
  std::uint64_t cases = 0;
  const auto alphabet = syms("ABCDEFGHIJ");
  for (const auto& tmpl : templates) {
    const std::vector<Symbol> names(
        alphabet.begin(), alphabet.begin() + tmpl.leaf_count() + 1);
    for (int trial = 0; trial < 25; ++trial) {
      const auto seed = rng::derive_seed(
          7777, static_cast<std::uint64_t>(tmpl.id()) * 1000 +
                    static_cast<std::uint64_t>(trial));
      Instance inst = instantiate(tmpl, names, config, seed);
      for (Symbol q : inst.equation.symbols_in_order()) {
        inst.question_var = q;
        const SolutionTree sol = invert(inst);
        ++cases;
        REQUIRE(verify_solution(inst, sol));

        // independent oracle: evaluate the solution locally and substitute
        const auto solved = oracle_eval(sol.expr, inst.values);
        REQUIRE(solved.has_value());
        REQUIRE(*solved == inst.value_of(q));
        auto substituted = inst.values;
        substituted[q] = *solved;
        const auto lhs = oracle_eval(inst.equation.lhs, substituted);
        REQUIRE(lhs.has_value());
        REQUIRE(*lhs == substituted.at(inst.equation.result));

        // structure: no simplification, so operator counts match, and the
        // question variable never appears as a leaf
        CHECK(sol.expr.operator_count() == tmpl.operator_count());
        if (q != inst.equation.result) {
          CHECK_FALSE(sol.expr.contains(q));
        }
      }
    }
  }
  std::uint64_t expected = 0;
  for (const auto& t : templates) {
    expected += 25u * static_cast<std::uint64_t>(t.leaf_count() + 1);
  }
  CHECK(cases == expected);
  CHECK(expected == 9900);  // (4*3 + 16*4 + 64*5) * 25
}
