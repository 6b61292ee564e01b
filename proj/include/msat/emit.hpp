#pragma once

// Serializes solution trees into the three output formats (code-style
// program, math expression, answer only) and provides the digit-level
// tokenizer.

#include <string>
#include <string_view>
#include <vector>

#include "msat/interp.hpp"
#include "msat/invert.hpp"

namespace msat {

enum class OutputFormat { CodeStyle, MathExpr, AnswerOnly };

// Post-order traversal of the solution tree. Leaf values become N0, N1, ...
// assignments at first use (a repeated symbol reuses its variable);
// intermediate results become M0, M1, ...; the root computes Ans.
Program emit_code(const SolutionTree& sol, const Instance& instance);

// Fully parenthesized infix expression with numeric literals substituted for
// symbols, e.g. "((20-2)/6)".
std::string emit_math(const SolutionTree& sol, const Instance& instance);

// Decimal rendering of the question variable's value.
std::string emit_answer_only(const SolutionTree& sol,
                             const Instance& instance);

// Splits every maximal digit run into single-digit tokens; a "." between two
// digits becomes its own token; other maximal non-space runs stay whole
// (a "." adjacent to a non-digit sticks to that run). Whitespace separates
// tokens and is dropped.
std::vector<std::string> digit_tokenize(std::string_view text);

}  // namespace msat
