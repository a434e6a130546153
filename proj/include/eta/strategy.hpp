// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eta/automata.hpp"
#include "eta/formula.hpp"
#include "eta/interval.hpp"
#include "eta/qe.hpp"

namespace eta {

struct PermissiveStrategy {
    EnergyTimedPath cycle;
    Interval energy;
    // Levels the lap must end in; starting levels range over `start`.
    Interval stable;
    Interval start;
    // Quantifier-free constraint over w0 and the switch times (empty when not eliminated).
    Formula constraint;
    std::vector<Variable> times;
    // The same constraint before delay elimination, over w0 and the delays.
    Conjunction delay_constraint;
    std::vector<Variable> delays;
};

struct SwitchTime {
    Rational on;
    Rational off;
};

struct ConcreteStrategy {
    Rational w0;
    std::vector<Rational> delays;
    // Entry and exit time of every controlled state, from cycle start.
    std::vector<SwitchTime> switch_times;
    // Cycle mean of the upper envelope (the nominal mean without imprecision).
    Rational predicted_mean;
    Rational nominal_mean;
};

// Switch-time variables: t_on_i / t_off_i per controlled state, else t_i per transition.
std::vector<Variable> switch_time_variables(const EnergyTimedPath& cycle);

// Every assignment of the constraint keeps all outcomes within `energy` and ends the
// lap within `stable`; w0 ranges over `stable`. Without `eliminate` only the delay
// form is filled in.
PermissiveStrategy permissive_strategy(const EnergyTimedPath& cycle, const Interval& energy, const Interval& stable,
                                       bool eliminate = true);

// Laps from any w0 within `start` that stay within `energy` and end within `target`.
PermissiveStrategy transfer_strategy(const EnergyTimedPath& cycle, const Interval& energy, const Interval& start,
                                     const Interval& target, bool eliminate = false);

// The self-loop of a depth-1 flat SETA with a single cycle.
PermissiveStrategy permissive_strategy(const Seta& seta, const Interval& energy, const Interval& stable);

// Switch times of concrete delays.
std::vector<Rational> switch_times_of(const EnergyTimedPath& cycle, const std::vector<Rational>& delays);

enum class Envelope { lower, nominal, upper };

// Time integral of the level over one lap for the given delays.
Rational cycle_integral(const EnergyTimedPath& cycle, const std::vector<Rational>& delays, const Rational& w0,
                        Envelope which);

struct OptimizerOptions {
    std::size_t starts = 32;
    std::size_t max_iterations = 400;
    std::uint64_t seed = 20170101;
};

// Minimises the lap mean of the upper envelope over the permitted delays at w0.
ConcreteStrategy optimal_strategy(const PermissiveStrategy& ps, const Rational& w0,
                                  const OptimizerOptions& options = {});

struct MeanSummary {
    Rational worst_mean;
    Rational worst_w0;
    std::size_t grid_points = 0;
};

// Maximum over the 1/`denominator` grid of the stable interval (both ends included)
// of the per-level optimal mean.
MeanSummary worst_case_mean(const PermissiveStrategy& ps, long denominator = 100,
                            const OptimizerOptions& options = {});

// Grid of levels used by worst_case_mean.
std::vector<Rational> level_grid(const Interval& stable, long denominator);

} // namespace eta
