// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eta/automata.hpp"
#include "eta/interval.hpp"
#include "eta/qe.hpp"

namespace eta {

struct Task {
    std::size_t macro_state = 0;
    Interval interval;
    // true: follow the cycle through the macro-state (c); false: skip it.
    bool follow_cycle = true;

    friend bool operator==(const Task&, const Task&) = default;
};

struct InfiniteRunOptions {
    qe::Options qe;
    // Cap on laps of one cycle during unfolding.
    std::size_t max_unfold = 1000;
    // Cap on processed tasks.
    std::size_t max_tasks = 100000;
};

struct InfiniteRunResult {
    bool exists = false;
    // Witness: the cycle (macro-transition indices starting at the entry state),
    // the energy interval on entry, and the cycle's greatest fixpoint.
    Cycle cycle;
    std::size_t entry_state = 0;
    Interval entry;
    Interval fixpoint;
    // Tasks in the order they were picked.
    std::vector<Task> picked;
};

// Algorithm 1 on a flat SETA without imprecision, FIFO waiting list.
InfiniteRunResult decide_infinite_run(const Seta& seta, const std::string& initial, const Interval& initial_energy,
                                      const Interval& energy, const InfiniteRunOptions& options = {});

struct UncertainOptions {
    qe::Options qe;
    // Upper limit on the interval count N; lowering N can only lose solutions.
    std::optional<std::size_t> max_intervals;
};

struct UncertainResult {
    bool exists = false;
    std::size_t intervals = 0;
    std::size_t required_intervals = 0;
    bool truncated = false;
    Rational min_duration;
    Rational min_spread;
    // Per macro-state intervals of a satisfying assignment.
    std::vector<std::vector<Interval>> witness;
};

// Safe-strategy existence under imprecision via the N-interval characterisation.
UncertainResult decide_infinite_run_uncertain(const Seta& seta, const std::string& initial, const Rational& w0,
                                              const Interval& energy, const UncertainOptions& options = {});

// Least a with some [a;b] and U admitting infinite iteration of the cycle under
// [L;U]; nullopt when the cycle cannot be iterated under any U.
std::optional<Rational> minimal_cycle_entry(const EnergyTimedPath& cycle, const Rational& lower,
                                            const qe::Options& options = {});

struct Label {
    bool top = false;
    Rational level;
};

struct UpperBoundReport {
    bool exists = false;
    // Labels indexed by macro-state; nullopt where unreachable.
    std::vector<std::optional<Label>> labels;
    // Least entry level per simple cycle; nullopt when not iterable.
    std::vector<std::optional<Rational>> cycle_entry;
};

UpperBoundReport upper_bound_analysis(const Seta& seta, const Rational& w0, const Rational& lower,
                                      const qe::Options& options = {});

bool upper_bound_exists(const Seta& seta, const Rational& w0, const Rational& lower,
                        const qe::Options& options = {});

struct UpperBoundResult {
    bool exists = false;
    Rational bound;
    Interval stable;
    // Macro-transitions from the initial state to the cycle, then the cycle.
    std::vector<std::size_t> prefix;
    std::size_t cycle = 0;
};

// Least U such that an infinite [L;U]-constrained run exists from (initial, w0) on a
// depth-1 flat SETA, with the greatest stable interval of the chosen cycle at U.
UpperBoundResult minimal_upper_bound(const Seta& seta, const Rational& lower, const Rational& w0,
                                     const qe::Options& options = {});

// Greatest interval [a;b] with every level in it admitting a robust lap of the
// cycle that ends inside [a;b], under [L;U].
Interval stable_interval(const EnergyTimedPath& cycle, const Interval& energy, const qe::Options& options = {});

} // namespace eta
