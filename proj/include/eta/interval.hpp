// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "eta/rational.hpp"

namespace eta {

// Closed rational interval; a missing end is infinite. The empty interval is a
// distinguished value.
class Interval {
  public:
    Interval() : empty_(true) {}
    Interval(std::optional<Rational> lo, std::optional<Rational> hi);
    Interval(const Rational& lo, const Rational& hi) : Interval(std::optional(lo), std::optional(hi)) {}

    static Interval empty() { return {}; }
    static Interval point(const Rational& v) { return {v, v}; }
    static Interval at_least(const Rational& lo) { return {std::optional(lo), std::nullopt}; }
    static Interval at_most(const Rational& hi) { return {std::nullopt, std::optional(hi)}; }
    static Interval reals() { return {std::nullopt, std::nullopt}; }

    [[nodiscard]] bool is_empty() const { return empty_; }
    [[nodiscard]] const std::optional<Rational>& lo() const { return lo_; }
    [[nodiscard]] const std::optional<Rational>& hi() const { return hi_; }
    [[nodiscard]] bool bounded() const { return !empty_ && lo_ && hi_; }
    // Requires a bounded interval.
    [[nodiscard]] Rational width() const;

    [[nodiscard]] bool contains(const Rational& v) const;
    [[nodiscard]] bool contains(const Interval& o) const;
    [[nodiscard]] Interval intersect(const Interval& o) const;
    [[nodiscard]] Interval hull(const Interval& o) const;
    [[nodiscard]] bool meets(const Interval& o) const { return !intersect(o).is_empty(); }

    // "[a; b]", "[a; +inf)", "empty"
    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Interval& a, const Interval& b);

  private:
    std::optional<Rational> lo_;
    std::optional<Rational> hi_;
    bool empty_ = false;
};

} // namespace eta
