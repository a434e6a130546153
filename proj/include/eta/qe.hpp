// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "eta/formula.hpp"
#include "eta/linear.hpp"

namespace eta::qe {

struct Options {
    // Aborts DNF expansion with ResourceLimit beyond this many disjuncts.
    std::size_t max_disjuncts = 10000;
};

// Same solution set, no atom implied by the others; infeasible input gives {false}.
Conjunction remove_redundant(const Conjunction& c);

// Fourier-Motzkin projection along v (equalities are substituted first).
Conjunction eliminate_exists_conj(const Conjunction& c, const Variable& v);

// Eliminates vars one at a time in the given order, simplifying between steps.
Conjunction project(const Conjunction& c, const std::vector<Variable>& vars);

// Quantifier-free equivalent; innermost quantifiers first, forall via exact negation.
Formula eliminate(const Formula& f, const Options& options = {});

// Disjunctive normal form of a quantifier-free formula with LP-infeasible and
// subsumed disjuncts pruned during lazy distribution.
Dnf to_dnf(const Formula& f, const Options& options = {});

// Satisfiability of a quantifier-free formula by lazy case splitting with LP pruning.
bool satisfiable(const Formula& f, Assignment* model = nullptr);

} // namespace eta::qe
