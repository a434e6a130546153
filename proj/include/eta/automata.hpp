// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eta/linear.hpp"

namespace eta {

enum class ClockRel { le, eq, ge };

struct ClockAtom {
    std::string clock;
    ClockRel rel = ClockRel::le;
    Rational bound;

    friend bool operator==(const ClockAtom&, const ClockAtom&) = default;
};

using ClockConstraint = std::vector<ClockAtom>;

std::string to_string(const ClockConstraint& c);
// Parses "x <= 2 & y = 1"; an empty or "true" string gives the empty constraint.
ClockConstraint parse_clock_constraint(std::string_view text);

struct EtpState {
    std::string id;
    Rational rate;
    Rational eps;
    ClockConstraint invariant;
    // Marks the states whose entry and exit times form the strategy variables.
    bool controlled = false;
};

struct EtpTransition {
    ClockConstraint guard;
    Rational update;
    Rational delta;
    std::vector<std::string> resets;
};

struct EnergyTimedPath {
    std::vector<EtpState> states;
    std::vector<EtpTransition> transitions;
    std::vector<std::string> clocks;

    [[nodiscard]] std::size_t delays() const { return transitions.size(); }
    [[nodiscard]] bool uncertain() const;
};

struct MacroTransition {
    std::string from;
    std::string to;
    EnergyTimedPath path;
};

struct Seta {
    std::vector<std::string> clocks;
    std::vector<std::string> macro_states;
    std::string initial;
    std::vector<MacroTransition> transitions;

    [[nodiscard]] std::optional<std::size_t> index_of(std::string_view macro_state) const;
    [[nodiscard]] bool uncertain() const;
};

struct Diagnostic {
    std::string where;
    std::string message;
};

std::vector<Diagnostic> validate(const Seta& seta);
std::vector<Diagnostic> validate(const EnergyTimedPath& path, const std::string& where = "path");

// Delay variables d0..d{n-1}, one per non-final state, with an optional prefix.
std::vector<Variable> delay_variables(const EnergyTimedPath& path, std::string_view prefix = "");

// Clock guards and invariants as linear constraints on the delays (clocks start at 0).
Conjunction timing_constraints(const EnergyTimedPath& path, const std::vector<Variable>& delays);

// A simple cycle as the list of macro-transition indices it follows, starting at
// the transition leaving its smallest macro-state index.
using Cycle = std::vector<std::size_t>;

std::vector<Cycle> simple_cycles(const Seta& seta);

struct Flatness {
    bool flat = false;
    bool depth_one = false;
};

Flatness is_flat(const Seta& seta);

struct RestrictionReport {
    bool holds = false;
    // Least total delay over all paths.
    Rational min_duration;
    // Least guaranteed spread 2*(sum eps_k*d_k + sum delta_k) accumulated by one path.
    Rational min_spread;
    std::string message;
};

RestrictionReport check_restriction_R(const Seta& seta);

// Concatenation of the paths along a cycle (or any chain of transitions).
EnergyTimedPath concatenate(const Seta& seta, const std::vector<std::size_t>& transitions);

} // namespace eta
