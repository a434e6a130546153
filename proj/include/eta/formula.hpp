// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "eta/interval.hpp"
#include "eta/linear.hpp"

namespace eta {

// Immutable first-order formula over linear real arithmetic. Construction flattens
// nested connectives, folds constants, and renames bound variables that would clash
// with free variables of sibling subformulas.
class Formula {
  public:
    enum class Kind { truth, falsity, atom, conj, disj, neg, exists, forall };

    Formula();
    Formula(const Atom& a);

    static Formula top();
    static Formula bottom();
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);
    static Formula negation(const Formula& f);
    static Formula exists(const Variable& v, const Formula& body);
    static Formula forall(const Variable& v, const Formula& body);
    static Formula of(const Conjunction& c);
    static Formula of(const Dnf& d);

    [[nodiscard]] Kind kind() const;
    [[nodiscard]] bool is_true() const { return kind() == Kind::truth; }
    [[nodiscard]] bool is_false() const { return kind() == Kind::falsity; }
    [[nodiscard]] const Atom& atom() const;
    [[nodiscard]] const std::vector<Formula>& children() const;
    [[nodiscard]] const Variable& bound() const;
    [[nodiscard]] const Formula& body() const;

    // Sorted names.
    [[nodiscard]] const std::vector<std::string>& free_vars() const;
    [[nodiscard]] const std::vector<std::string>& bound_vars() const;
    [[nodiscard]] bool is_free(std::string_view name) const;
    [[nodiscard]] bool is_quantifier_free() const;

    // Capture-avoiding substitution of a free variable.
    [[nodiscard]] Formula substitute(std::string_view name, const LinearTerm& value) const;
    [[nodiscard]] Formula rename(std::string_view from, const Variable& to) const {
        return substitute(from, LinearTerm(to));
    }

    [[nodiscard]] std::string to_string() const;

    friend Formula operator&&(const Formula& a, const Formula& b) { return conj({a, b}); }
    friend Formula operator||(const Formula& a, const Formula& b) { return disj({a, b}); }
    friend Formula operator!(const Formula& a) { return negation(a); }

    struct Node;

  private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Formula make(Kind k, std::vector<Formula> children);
    static Formula make_quantifier(Kind k, const Variable& v, const Formula& body);
    [[nodiscard]] Formula rename_bound(std::string_view from, const std::string& to) const;

    std::shared_ptr<const Node> node_;
};

// Exact complement of an atom as a disjunction (two atoms for equalities).
std::vector<Atom> negate_atom(const Atom& a);
// Negation normal form; negations are absorbed into atoms.
Formula nnf(const Formula& f);

// Quantifier-free only; throws InputError on unassigned variables or quantifiers.
bool evaluate(const Formula& f, const Assignment& point);

// Disjunction of conjunctions equivalent to f. Quantifier-free parts are expanded
// lazily with LP pruning; quantifiers are kept over their own disjunct.
Formula normalize(const Formula& f);

// Solution set of a conjunction whose only free variable is v.
Interval interval_of(const Formula& f, const Variable& v);
Interval interval_of(const Conjunction& c, std::string_view v);

struct ParseOptions {
    bool allow_strict = false;
};

Formula parse_formula(std::string_view text, const ParseOptions& options = {});
LinearTerm parse_term(std::string_view text);

} // namespace eta
