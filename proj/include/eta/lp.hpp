// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "eta/linear.hpp"

namespace eta {

enum class LpStatus { optimal, infeasible, unbounded };
enum class Direction { minimize, maximize };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Rational value;
    Assignment witness;

    [[nodiscard]] bool feasible() const { return status != LpStatus::infeasible; }
};

namespace lp {

// Exact feasibility; strict atoms are honoured. The witness satisfies every atom.
LpResult feasible(std::span<const Atom> constraints);

// Exact optimum over the closure of the constraint set (strict atoms are read as
// non-strict, which yields the supremum). Unbounded objectives are reported as such.
LpResult optimize(std::span<const Atom> constraints, const LinearTerm& objective, Direction dir);

// True iff the constraints imply the atom.
bool implies(std::span<const Atom> constraints, const Atom& atom);

} // namespace lp
} // namespace eta
