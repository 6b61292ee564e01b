#pragma once

// Samples numeric values for an equation so the equality holds over the
// naturals, picks the question variable, and renders the task input text.
//
// Input text grammar (bit-exact):
//
//   input    := (assign " ")* equation " " question
//   assign   := NAME "=" INT "."
//   equation := expr "=" NAME "."
//   question := NAME "?"
//   OP := "+" | "-" | "*" | "/" ; NAME := [A-Z] ; INT := [0-9]+
//
// Example: "A=1. C=3. A+B=C. B?"

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "msat/equation.hpp"
#include "msat/rational.hpp"

namespace msat {

struct GenConfig {
  int max_operators = 3;
  // Weight of drawing an equation with k operators is
  // operator_count_weights[k-1]; empty means uniform over 1..max_operators.
  std::vector<double> operator_count_weights;
  std::int64_t value_min = 0;
  std::int64_t value_max = 10000;
  int max_rejections = 1'000'000;
  std::uint64_t seed = 0;
  // Shuffle the question-context order instead of listing symbols in tree
  // order with the result last.
  bool randomize_context_order = false;

  void validate() const;  // throws std::invalid_argument
};

class SamplingFailure : public std::runtime_error {
 public:
  SamplingFailure(int template_id, int attempts);
  int template_id() const { return template_id_; }

 private:
  int template_id_;
};

struct Instance {
  Equation equation;
  std::map<Symbol, Rational> values;
  Symbol question_var;
  std::uint64_t seed;
  // Non-question symbols in the order they are listed in the input text.
  std::vector<Symbol> context_order;

  const Rational& value_of(Symbol s) const;
};

// Deterministic in (template, names, config, stream_seed). Draws integer
// leaves left to right, each uniform over the sub-range of
// [value_min, value_max] that keeps the current node value a non-negative
// integer <= value_max (for division, uniform over the in-range divisors).
// Operands of * and / are kept nonzero so the equation stays solvable for
// every choice of question variable. The question variable is then picked
// uniformly over all symbols. Infeasible prefixes are redrawn;
// SamplingFailure after max_rejections dead ends.
Instance instantiate(const EquationTemplate& tmpl,
                     std::span<const Symbol> names, const GenConfig& config,
                     std::uint64_t stream_seed);

std::string render_input(const Instance& instance);

struct GeneratedExample {
  Instance instance;
  EquationTemplate tmpl;
  std::uint64_t index;
};

// Builds example `index` of the stream defined by `config`. The template is
// drawn by operator-count weight, then uniformly within that count; symbol
// names are drawn without replacement from A-Z. Pure in (config, index).
GeneratedExample generate_one(const GenConfig& config,
                              std::span<const EquationTemplate> inventory,
                              std::uint64_t index);

// Yields exactly `count` examples, in index order.
void generate_batch(const GenConfig& config, std::uint64_t count,
                    const std::function<void(GeneratedExample&&)>& sink);
std::vector<GeneratedExample> generate_batch(const GenConfig& config,
                                             std::uint64_t count);

}  // namespace msat
