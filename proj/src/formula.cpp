// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/formula.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "eta/errors.hpp"
#include "eta/qe.hpp"

namespace eta {

struct Formula::Node {
    Kind kind = Kind::truth;
    std::optional<Atom> atom;
    std::vector<Formula> children;
    Variable var;
    std::vector<std::string> free;
    std::vector<std::string> bound;
    bool qf = true;
};

namespace {

using Names = std::vector<std::string>;

Names merge(const Names& a, const Names& b) {
    Names out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

bool contains(const Names& names, std::string_view n) {
    return std::binary_search(names.begin(), names.end(), n, std::less<>());
}

std::string fresh_name(const std::string& base, const std::set<std::string, std::less<>>& taken) {
    for (int k = 1;; ++k) {
        std::string candidate = base + "_" + std::to_string(k);
        if (!taken.contains(candidate)) {
            return candidate;
        }
    }
}

const std::shared_ptr<const Formula::Node>& constant_node(bool value);

} // namespace

Formula::Formula() : node_(constant_node(true)) {}

Formula::Formula(const Atom& a) {
    if (a.is_ground()) {
        node_ = constant_node(a.ground_value());
        return;
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::atom;
    n->atom = a;
    for (const auto& [v, c] : a.term().entries()) {
        n->free.push_back(v.name);
    }
    node_ = std::move(n);
}

namespace {

const std::shared_ptr<const Formula::Node>& constant_node(bool value) {
    static const std::shared_ptr<const Formula::Node> t = [] {
        auto n = std::make_shared<Formula::Node>();
        n->kind = Formula::Kind::truth;
        return n;
    }();
    static const std::shared_ptr<const Formula::Node> f = [] {
        auto n = std::make_shared<Formula::Node>();
        n->kind = Formula::Kind::falsity;
        return n;
    }();
    return value ? t : f;
}

} // namespace

Formula Formula::top() { return Formula(constant_node(true)); }
Formula Formula::bottom() { return Formula(constant_node(false)); }

Formula::Kind Formula::kind() const { return node_->kind; }

const Atom& Formula::atom() const {
    if (!node_->atom) {
        throw std::logic_error("formula is not an atom");
    }
    return *node_->atom;
}

const std::vector<Formula>& Formula::children() const { return node_->children; }
const Variable& Formula::bound() const { return node_->var; }
const Formula& Formula::body() const { return node_->children.front(); }
const std::vector<std::string>& Formula::free_vars() const { return node_->free; }
const std::vector<std::string>& Formula::bound_vars() const { return node_->bound; }
bool Formula::is_free(std::string_view name) const { return contains(node_->free, name); }
bool Formula::is_quantifier_free() const { return node_->qf; }

Formula Formula::make(Kind k, std::vector<Formula> children) {
    const bool is_and = k == Kind::conj;
    std::vector<Formula> flat;
    for (auto& c : children) {
        if (c.kind() == k) {
            for (const auto& g : c.children()) {
                flat.push_back(g);
            }
        } else if (c.kind() == (is_and ? Kind::truth : Kind::falsity)) {
            continue;
        } else if (c.kind() == (is_and ? Kind::falsity : Kind::truth)) {
            return is_and ? bottom() : top();
        } else {
            flat.push_back(std::move(c));
        }
    }
    // drop repeated atoms
    std::vector<Formula> uniq;
    std::vector<Atom> seen;
    for (auto& c : flat) {
        if (c.kind() == Kind::atom) {
            if (std::find(seen.begin(), seen.end(), c.atom()) != seen.end()) {
                continue;
            }
            seen.push_back(c.atom());
        }
        uniq.push_back(std::move(c));
    }
    if (uniq.empty()) {
        return is_and ? top() : bottom();
    }
    if (uniq.size() == 1) {
        return uniq.front();
    }
    // Bound variables of one child must not be free in a sibling.
    bool clash = false;
    for (std::size_t i = 0; i < uniq.size() && !clash; ++i) {
        for (const auto& b : uniq[i].bound_vars()) {
            for (std::size_t j = 0; j < uniq.size(); ++j) {
                if (j != i && uniq[j].is_free(b)) {
                    clash = true;
                }
            }
        }
    }
    if (clash) {
        std::set<std::string, std::less<>> taken;
        for (const auto& c : uniq) {
            taken.insert(c.free_vars().begin(), c.free_vars().end());
            taken.insert(c.bound_vars().begin(), c.bound_vars().end());
        }
        for (std::size_t i = 0; i < uniq.size(); ++i) {
            const Names bound = uniq[i].bound_vars();
            for (const auto& b : bound) {
                bool used = false;
                for (std::size_t j = 0; j < uniq.size(); ++j) {
                    used = used || (j != i && uniq[j].is_free(b));
                }
                if (used) {
                    std::string fresh = fresh_name(b, taken);
                    taken.insert(fresh);
                    uniq[i] = uniq[i].rename_bound(b, fresh);
                }
            }
        }
    }
    auto n = std::make_shared<Node>();
    n->kind = k;
    for (const auto& c : uniq) {
        n->free = merge(n->free, c.free_vars());
        n->bound = merge(n->bound, c.bound_vars());
        n->qf = n->qf && c.is_quantifier_free();
    }
    n->children = std::move(uniq);
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::conj(std::vector<Formula> parts) { return make(Kind::conj, std::move(parts)); }
Formula Formula::disj(std::vector<Formula> parts) { return make(Kind::disj, std::move(parts)); }

Formula Formula::negation(const Formula& f) {
    switch (f.kind()) {
    case Kind::truth: return bottom();
    case Kind::falsity: return top();
    case Kind::neg: return f.body();
    default: break;
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::neg;
    n->free = f.free_vars();
    n->bound = f.bound_vars();
    n->qf = f.is_quantifier_free();
    n->children = {f};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::make_quantifier(Kind k, const Variable& v, const Formula& body) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->var = v;
    n->free = body.free_vars();
    n->free.erase(std::remove(n->free.begin(), n->free.end(), v.name), n->free.end());
    n->bound = merge(body.bound_vars(), Names{v.name});
    n->qf = false;
    n->children = {body};
    return Formula(std::shared_ptr<const Node>(std::move(n)));
}

Formula Formula::exists(const Variable& v, const Formula& body) {
    if (!body.is_free(v.name)) {
        return body;
    }
    return make_quantifier(Kind::exists, v, body);
}

Formula Formula::forall(const Variable& v, const Formula& body) {
    if (!body.is_free(v.name)) {
        return body;
    }
    return make_quantifier(Kind::forall, v, body);
}

Formula Formula::of(const Conjunction& c) {
    std::vector<Formula> parts;
    parts.reserve(c.size());
    for (const auto& a : c) {
        parts.emplace_back(a);
    }
    return conj(std::move(parts));
}

Formula Formula::of(const Dnf& d) {
    std::vector<Formula> parts;
    parts.reserve(d.size());
    for (const auto& c : d) {
        parts.push_back(of(c));
    }
    return disj(std::move(parts));
}

Formula Formula::rename_bound(std::string_view from, const std::string& to) const {
    if (!contains(bound_vars(), from)) {
        return *this;
    }
    switch (kind()) {
    case Kind::conj:
    case Kind::disj: {
        std::vector<Formula> parts;
        for (const auto& c : children()) {
            parts.push_back(c.rename_bound(from, to));
        }
        return make(kind(), std::move(parts));
    }
    case Kind::neg: return negation(body().rename_bound(from, to));
    case Kind::exists:
    case Kind::forall: {
        Formula b = body().rename_bound(from, to);
        Variable v = bound();
        if (v.name == from) {
            b = b.substitute(from, LinearTerm(Variable(to, v.sort)));
            v.name = to;
        }
        return kind() == Kind::exists ? exists(v, b) : forall(v, b);
    }
    default: return *this;
    }
}

Formula Formula::substitute(std::string_view name, const LinearTerm& value) const {
    if (!is_free(name)) {
        return *this;
    }
    switch (kind()) {
    case Kind::atom: return Formula(atom().substitute(name, value));
    case Kind::conj:
    case Kind::disj: {
        std::vector<Formula> parts;
        for (const auto& c : children()) {
            parts.push_back(c.substitute(name, value));
        }
        return make(kind(), std::move(parts));
    }
    case Kind::neg: return negation(body().substitute(name, value));
    case Kind::exists:
    case Kind::forall: {
        Variable v = bound();
        Formula b = body();
        if (value.mentions(v.name)) {
            std::set<std::string, std::less<>> taken(free_vars().begin(), free_vars().end());
            taken.insert(bound_vars().begin(), bound_vars().end());
            for (const auto& [tv, c] : value.entries()) {
                taken.insert(tv.name);
            }
            const std::string fresh = fresh_name(v.name, taken);
            b = b.substitute(v.name, LinearTerm(Variable(fresh, v.sort)));
            v.name = fresh;
        }
        b = b.substitute(name, value);
        return kind() == Kind::exists ? exists(v, b) : forall(v, b);
    }
    default: return *this;
    }
}

std::vector<Atom> negate_atom(const Atom& a) {
    switch (a.rel()) {
    case Rel::le: return {Atom(-a.term(), Rel::lt)};
    case Rel::lt: return {Atom(-a.term(), Rel::le)};
    case Rel::eq: return {Atom(a.term(), Rel::lt), Atom(-a.term(), Rel::lt)};
    }
    return {};
}

namespace {

Formula nnf_impl(const Formula& f, bool negated) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::truth: return negated ? Formula::bottom() : Formula::top();
    case K::falsity: return negated ? Formula::top() : Formula::bottom();
    case K::atom: {
        if (!negated) {
            return f;
        }
        std::vector<Formula> parts;
        for (const auto& a : negate_atom(f.atom())) {
            parts.emplace_back(a);
        }
        return Formula::disj(std::move(parts));
    }
    case K::conj:
    case K::disj: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) {
            parts.push_back(nnf_impl(c, negated));
        }
        const bool as_and = (f.kind() == K::conj) != negated;
        return as_and ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case K::neg: return nnf_impl(f.body(), !negated);
    case K::exists:
    case K::forall: {
        Formula b = nnf_impl(f.body(), negated);
        const bool as_exists = (f.kind() == K::exists) != negated;
        return as_exists ? Formula::exists(f.bound(), b) : Formula::forall(f.bound(), b);
    }
    }
    return f;
}

} // namespace

Formula nnf(const Formula& f) { return nnf_impl(f, false); }

bool evaluate(const Formula& f, const Assignment& point) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::truth: return true;
    case K::falsity: return false;
    case K::atom: return f.atom().evaluate(point);
    case K::conj: {
        // check assignment completeness before short-circuiting
        for (const auto& n : f.free_vars()) {
            if (!point.contains(n)) {
                throw InputError("unassigned variable '" + n + "'");
            }
        }
        return std::all_of(f.children().begin(), f.children().end(),
                           [&](const Formula& c) { return evaluate(c, point); });
    }
    case K::disj: {
        for (const auto& n : f.free_vars()) {
            if (!point.contains(n)) {
                throw InputError("unassigned variable '" + n + "'");
            }
        }
        return std::any_of(f.children().begin(), f.children().end(),
                           [&](const Formula& c) { return evaluate(c, point); });
    }
    case K::neg: return !evaluate(f.body(), point);
    case K::exists:
    case K::forall: throw InputError("evaluate requires a quantifier-free formula");
    }
    return false;
}

namespace {

// DNF with quantified subformulas treated as opaque literals.
std::vector<std::vector<Formula>> opaque_dnf(const Formula& f) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::truth: return {{}};
    case K::falsity: return {};
    case K::disj: {
        std::vector<std::vector<Formula>> out;
        for (const auto& c : f.children()) {
            auto d = opaque_dnf(c);
            out.insert(out.end(), d.begin(), d.end());
        }
        return out;
    }
    case K::conj: {
        std::vector<std::vector<Formula>> acc{{}};
        for (const auto& c : f.children()) {
            auto d = opaque_dnf(c);
            std::vector<std::vector<Formula>> next;
            for (const auto& a : acc) {
                for (const auto& b : d) {
                    auto merged = a;
                    merged.insert(merged.end(), b.begin(), b.end());
                    next.push_back(std::move(merged));
                }
            }
            acc = std::move(next);
        }
        return acc;
    }
    case K::exists:
    case K::forall: {
        Formula body = normalize(f.body());
        if (f.kind() == K::exists && body.kind() == K::disj) {
            std::vector<std::vector<Formula>> out;
            for (const auto& c : body.children()) {
                out.push_back({Formula::exists(f.bound(), c)});
            }
            return out;
        }
        return {{f.kind() == K::exists ? Formula::exists(f.bound(), body) : Formula::forall(f.bound(), body)}};
    }
    default: return {{f}};
    }
}

} // namespace

Formula normalize(const Formula& f) {
    if (f.is_quantifier_free()) {
        return Formula::of(qe::to_dnf(f));
    }
    std::vector<Formula> disjuncts;
    for (auto& c : opaque_dnf(nnf(f))) {
        disjuncts.push_back(Formula::conj(std::move(c)));
    }
    return Formula::disj(std::move(disjuncts));
}

Interval interval_of(const Conjunction& c, std::string_view v) {
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    bool lo_strict = false;
    bool hi_strict = false;
    auto tighten_lo = [&](const Rational& x, bool strict) {
        if (!lo || *lo < x || (*lo == x && strict)) {
            lo = x;
            lo_strict = strict;
        }
    };
    auto tighten_hi = [&](const Rational& x, bool strict) {
        if (!hi || x < *hi || (*hi == x && strict)) {
            hi = x;
            hi_strict = strict;
        }
    };
    for (const auto& a : c) {
        if (a.is_ground()) {
            if (!a.ground_value()) {
                return Interval::empty();
            }
            continue;
        }
        const auto& entries = a.term().entries();
        if (entries.size() != 1 || entries.front().first.name != v) {
            throw InputError("interval_of: atom '" + a.to_string() + "' mentions a variable other than " +
                             std::string(v));
        }
        const Rational& k = entries.front().second;
        const Rational bound = -a.term().constant() / k;
        const bool strict = a.is_strict();
        if (a.rel() == Rel::eq) {
            tighten_lo(bound, false);
            tighten_hi(bound, false);
        } else if (k.sign() > 0) {
            tighten_hi(bound, strict);
        } else {
            tighten_lo(bound, strict);
        }
    }
    if (lo && hi && (*hi < *lo || (*hi == *lo && (lo_strict || hi_strict)))) {
        return Interval::empty();
    }
    if (lo_strict || hi_strict) {
        throw PreconditionError("interval_of: solution set is not closed");
    }
    return {lo, hi};
}

Interval interval_of(const Formula& f, const Variable& v) {
    for (const auto& n : f.free_vars()) {
        if (n != v.name) {
            throw InputError("interval_of: formula has free variable '" + n + "' besides " + v.name);
        }
    }
    Conjunction c;
    switch (f.kind()) {
    case Formula::Kind::truth: return Interval::reals();
    case Formula::Kind::falsity: return Interval::empty();
    case Formula::Kind::atom: c.push_back(f.atom()); break;
    case Formula::Kind::conj:
        for (const auto& ch : f.children()) {
            if (ch.kind() != Formula::Kind::atom) {
                throw InputError("interval_of: formula is not a conjunction of atoms");
            }
            c.push_back(ch.atom());
        }
        break;
    default: throw InputError("interval_of: formula is not a conjunction of atoms");
    }
    return interval_of(c, v.name);
}

} // namespace eta
