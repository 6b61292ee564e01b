#pragma once

// Tree inversion: from an instantiated equation and its question variable,
// derive the expression tree that computes the question variable from the
// known symbols. Off-path subtrees are carried over untouched, so the
// solution's operator count always equals the equation's.

#include "msat/instantiate.hpp"

namespace msat {

struct SolutionTree {
  Expr expr;
};

// Walks from the result down to the question variable, applying the
// algebraic inverse at each node. If the question variable is the result
// symbol the left-hand tree is returned unchanged. Throws
// std::invalid_argument when the question variable does not occur in the
// equation.
SolutionTree invert(const Instance& instance);

// True iff exact evaluation of `sol` equals the question variable's value
// and substituting that value back into the equation satisfies it. Returns
// false on evaluation failure (e.g. division by zero).
bool verify_solution(const Instance& instance, const SolutionTree& sol);

}  // namespace msat
