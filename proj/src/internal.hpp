// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "eta/automata.hpp"
#include "eta/formula.hpp"
#include "eta/interval.hpp"
#include "eta/qe.hpp"

namespace eta::detail {

void require_valid(const Seta& seta);

// Atoms bounding a term within an interval.
void add_within(Conjunction& c, const LinearTerm& t, const Interval& i);

// Quantifier-free form of
//   lower <= a <= b <= upper  &  forall w in [a;b]. step(w, a, b, ...)
// where `step` says that one lap from w can be forced to end within [a;b].
Formula iteration_formula(const Conjunction& step, const Variable& w, const LinearTerm& lower,
                          const std::optional<LinearTerm>& upper, const qe::Options& options);

// step(w0, a, b, ...) for a binary or parametric relation over (w0, w1, ...).
Conjunction binary_step(const Conjunction& relation);

// step(w, a, b, ...) for a ternary or quaternary relation over (w|w0, a, b, ...).
Conjunction ternary_step(const Conjunction& relation);

// [min a; max b] over a quantifier-free formula; empty when unsatisfiable.
Interval interval_hull(const Formula& f, const qe::Options& options);

// Macro-transitions of the simple cycle rotated to start at `state`.
std::vector<std::size_t> rotate_cycle(const Seta& seta, const Cycle& cycle, std::size_t state);

} // namespace eta::detail
