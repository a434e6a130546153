// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eta/automata.hpp"
#include "eta/formula.hpp"
#include "eta/interval.hpp"
#include "eta/qe.hpp"

namespace eta {

enum class RelationKind {
    binary,      // (w0, w1) under E
    ternary,     // (w0, a, b) under E: every outcome from w0 stays in E and ends in [a;b]
    quaternary,  // (w, a, b, U) under [L;U]
    parametric,  // (w0, w1, U) under [L;U]
};

namespace vars {
inline const Variable w0{"w0", VarSort::energy};
inline const Variable w1{"w1", VarSort::energy};
inline const Variable w{"w", VarSort::energy};
inline const Variable a{"a", VarSort::bound};
inline const Variable b{"b", VarSort::bound};
inline const Variable U{"U", VarSort::bound};
} // namespace vars

struct EnergyRelation {
    RelationKind kind = RelationKind::binary;
    Conjunction constraints;
    // E for binary and ternary relations; only the lower end matters otherwise.
    Interval energy;

    [[nodiscard]] Formula matrix() const { return Formula::of(constraints); }
    [[nodiscard]] std::string to_string() const { return eta::to_string(constraints); }
};

// Lower and upper energy at every check-point of the path: entry, after each
// delay, after each update. Rates and updates use their imprecision bounds.
std::vector<std::pair<LinearTerm, LinearTerm>> energy_envelope(const EnergyTimedPath& path,
                                                               const std::vector<Variable>& delays,
                                                               const LinearTerm& start);

EnergyRelation build_binary(const EnergyTimedPath& path, const Interval& energy);
EnergyRelation identity_relation(const Interval& energy);
EnergyRelation build_ternary(const EnergyTimedPath& path, const Interval& energy);
EnergyRelation build_quaternary(const EnergyTimedPath& path, const Rational& lower);
EnergyRelation build_parametric(const EnergyTimedPath& path, const Rational& lower);

EnergyRelation compose(const EnergyRelation& first, const EnergyRelation& second);
EnergyRelation power(const EnergyRelation& r, int n);

enum class ImageDirection { forward, backward };

Interval apply(const EnergyRelation& r, const Interval& i, ImageDirection dir = ImageDirection::forward);

// Post-fixpoint condition of a binary relation on the interval [a;b]:
// a <= b, [a;b] within E, and every w0 in [a;b] has a successor in [a;b].
Formula post_fixpoint_formula(const EnergyRelation& r);

// The greatest interval S with S within R^-1(S); empty when there is none.
Interval greatest_fixpoint(const EnergyRelation& r, const qe::Options& options = {});

// Least value of a variable (or greatest with maximize) over a quantifier-free
// formula; nullopt when unsatisfiable, an unbounded side is reported as such.
struct Extremum {
    bool feasible = false;
    bool unbounded = false;
    Rational value;
    Assignment witness;
};
Extremum extremum(const Formula& f, const LinearTerm& objective, bool maximize, const qe::Options& options = {});

} // namespace eta
