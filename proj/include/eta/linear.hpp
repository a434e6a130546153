// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eta/rational.hpp"

namespace eta {

enum class VarSort { delay, energy, bound, auxiliary };

// Variables are identified by name; the sort is informational.
struct Variable {
    std::string name;
    VarSort sort = VarSort::auxiliary;

    Variable() = default;
    Variable(std::string n, VarSort s = VarSort::auxiliary) : name(std::move(n)), sort(s) {}
    Variable(const char* n, VarSort s = VarSort::auxiliary) : name(n), sort(s) {}

    friend bool operator==(const Variable& a, const Variable& b) { return a.name == b.name; }
    friend bool operator<(const Variable& a, const Variable& b) { return a.name < b.name; }
};

using Assignment = std::map<std::string, Rational, std::less<>>;

// sum(coef * var) + constant; coefficients sorted by name, never zero.
class LinearTerm {
  public:
    using Entry = std::pair<Variable, Rational>;

    LinearTerm() = default;
    LinearTerm(const Rational& c) : constant_(c) {}
    LinearTerm(int c) : constant_(c) {}
    LinearTerm(const Variable& v, const Rational& coef = Rational(1));

    [[nodiscard]] const std::vector<Entry>& entries() const { return entries_; }
    [[nodiscard]] const Rational& constant() const { return constant_; }
    [[nodiscard]] Rational coefficient(std::string_view name) const;
    [[nodiscard]] bool is_constant() const { return entries_.empty(); }
    [[nodiscard]] bool mentions(std::string_view name) const;
    [[nodiscard]] std::vector<Variable> variables() const;

    // Replaces `name` by `value`.
    [[nodiscard]] LinearTerm substitute(std::string_view name, const LinearTerm& value) const;
    [[nodiscard]] LinearTerm rename(std::string_view from, const Variable& to) const;
    // Throws InputError naming the first unassigned variable.
    [[nodiscard]] Rational evaluate(const Assignment& point) const;

    LinearTerm& operator+=(const LinearTerm& o);
    LinearTerm& operator-=(const LinearTerm& o);
    LinearTerm& operator*=(const Rational& k);

    friend LinearTerm operator+(LinearTerm a, const LinearTerm& b) { return a += b; }
    friend LinearTerm operator-(LinearTerm a, const LinearTerm& b) { return a -= b; }
    friend LinearTerm operator*(LinearTerm a, const Rational& k) { return a *= k; }
    friend LinearTerm operator*(const Rational& k, LinearTerm a) { return a *= k; }
    LinearTerm operator-() const { return *this * Rational(-1); }

    friend bool operator==(const LinearTerm& a, const LinearTerm& b) {
        return a.constant_ == b.constant_ && a.entries_ == b.entries_;
    }

    [[nodiscard]] std::string to_string() const;

  private:
    std::vector<Entry> entries_;
    Rational constant_;
};

bool operator==(const LinearTerm::Entry& a, const LinearTerm::Entry& b);

// term <= 0, term < 0, or term = 0. Strict atoms only arise internally from exact negation.
enum class Rel { le, lt, eq };

class Atom {
  public:
    Atom(LinearTerm term, Rel rel);

    static Atom le(const LinearTerm& lhs, const LinearTerm& rhs) { return {lhs - rhs, Rel::le}; }
    static Atom lt(const LinearTerm& lhs, const LinearTerm& rhs) { return {lhs - rhs, Rel::lt}; }
    static Atom ge(const LinearTerm& lhs, const LinearTerm& rhs) { return {rhs - lhs, Rel::le}; }
    static Atom eq(const LinearTerm& lhs, const LinearTerm& rhs) { return {lhs - rhs, Rel::eq}; }
    static Atom falsum() { return {LinearTerm(1), Rel::le}; }
    static Atom verum() { return {LinearTerm(0), Rel::le}; }

    [[nodiscard]] const LinearTerm& term() const { return term_; }
    [[nodiscard]] Rel rel() const { return rel_; }
    [[nodiscard]] bool is_strict() const { return rel_ == Rel::lt; }
    [[nodiscard]] bool is_ground() const { return term_.is_constant(); }
    // Only meaningful for ground atoms.
    [[nodiscard]] bool ground_value() const;
    [[nodiscard]] bool evaluate(const Assignment& point) const;
    [[nodiscard]] Atom substitute(std::string_view name, const LinearTerm& value) const;
    [[nodiscard]] Atom rename(std::string_view from, const Variable& to) const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const Atom& a, const Atom& b) { return a.rel_ == b.rel_ && a.term_ == b.term_; }
    friend bool operator<(const Atom& a, const Atom& b);

  private:
    void canonicalize();

    LinearTerm term_;
    Rel rel_;
};

using Conjunction = std::vector<Atom>;
using Dnf = std::vector<Conjunction>;

std::string to_string(const Conjunction& c);
bool evaluate(const Conjunction& c, const Assignment& point);
// Sorted, duplicate-free, ground-true atoms dropped; a false ground atom collapses to {falsum}.
Conjunction canonical(Conjunction c);
bool is_false(const Conjunction& c);

} // namespace eta
