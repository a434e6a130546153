// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/linear.hpp"

#include <algorithm>

#include "eta/errors.hpp"

namespace eta {

bool operator==(const LinearTerm::Entry& a, const LinearTerm::Entry& b) {
    return a.first.name == b.first.name && a.second == b.second;
}

LinearTerm::LinearTerm(const Variable& v, const Rational& coef) {
    if (!coef.is_zero()) {
        entries_.emplace_back(v, coef);
    }
}

Rational LinearTerm::coefficient(std::string_view name) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), name,
                               [](const Entry& e, std::string_view n) { return e.first.name < n; });
    if (it != entries_.end() && it->first.name == name) {
        return it->second;
    }
    return Rational(0);
}

bool LinearTerm::mentions(std::string_view name) const { return !coefficient(name).is_zero(); }

std::vector<Variable> LinearTerm::variables() const {
    std::vector<Variable> out;
    out.reserve(entries_.size());
    for (const auto& [v, c] : entries_) {
        out.push_back(v);
    }
    return out;
}

LinearTerm& LinearTerm::operator+=(const LinearTerm& o) {
    std::vector<Entry> merged;
    merged.reserve(entries_.size() + o.entries_.size());
    auto a = entries_.begin();
    auto b = o.entries_.begin();
    while (a != entries_.end() || b != o.entries_.end()) {
        if (b == o.entries_.end() || (a != entries_.end() && a->first.name < b->first.name)) {
            merged.push_back(std::move(*a++));
        } else if (a == entries_.end() || b->first.name < a->first.name) {
            merged.push_back(*b++);
        } else {
            Rational c = a->second + b->second;
            if (!c.is_zero()) {
                merged.emplace_back(std::move(a->first), std::move(c));
            }
            ++a;
            ++b;
        }
    }
    entries_ = std::move(merged);
    constant_ += o.constant_;
    return *this;
}

LinearTerm& LinearTerm::operator-=(const LinearTerm& o) { return *this += -o; }

LinearTerm& LinearTerm::operator*=(const Rational& k) {
    if (k.is_zero()) {
        entries_.clear();
        constant_ = Rational(0);
        return *this;
    }
    for (auto& e : entries_) {
        e.second *= k;
    }
    constant_ *= k;
    return *this;
}

LinearTerm LinearTerm::substitute(std::string_view name, const LinearTerm& value) const {
    const Rational c = coefficient(name);
    if (c.is_zero()) {
        return *this;
    }
    LinearTerm rest = *this - LinearTerm(Variable(std::string(name)), c);
    return rest + value * c;
}

LinearTerm LinearTerm::rename(std::string_view from, const Variable& to) const {
    return substitute(from, LinearTerm(to));
}

Rational LinearTerm::evaluate(const Assignment& point) const {
    Rational sum = constant_;
    for (const auto& [v, c] : entries_) {
        auto it = point.find(v.name);
        if (it == point.end()) {
            throw InputError("unassigned variable '" + v.name + "'");
        }
        sum += c * it->second;
    }
    return sum;
}

std::string LinearTerm::to_string() const {
    std::string out;
    for (const auto& [v, c] : entries_) {
        const Rational a = c.abs();
        if (out.empty()) {
            if (c.sign() < 0) {
                out += "-";
            }
        } else {
            out += c.sign() < 0 ? " - " : " + ";
        }
        if (a != Rational(1)) {
            out += a.to_string() + "*";
        }
        out += v.name;
    }
    if (out.empty()) {
        return constant_.to_string();
    }
    if (!constant_.is_zero()) {
        out += constant_.sign() < 0 ? " - " : " + ";
        out += constant_.abs().to_string();
    }
    return out;
}

Atom::Atom(LinearTerm term, Rel rel) : term_(std::move(term)), rel_(rel) { canonicalize(); }

void Atom::canonicalize() {
    if (term_.is_constant()) {
        const bool value = ground_value();
        term_ = LinearTerm(value ? 0 : 1);
        rel_ = Rel::le;
        return;
    }
    // Scale so the variable coefficients form a primitive integer vector.
    mpz_class l = 1;
    for (const auto& [v, c] : term_.entries()) {
        mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.raw().get_den_mpz_t());
    }
    mpz_class g = 0;
    for (const auto& [v, c] : term_.entries()) {
        mpz_class n = c.raw().get_num() * (l / c.raw().get_den());
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
    }
    Rational k(mpq_class(l, g));
    if (rel_ == Rel::eq && term_.entries().front().second.sign() < 0) {
        k = -k;
    }
    if (k != Rational(1)) {
        term_ *= k;
    }
}

bool Atom::ground_value() const {
    const int s = term_.constant().sign();
    switch (rel_) {
    case Rel::le: return s <= 0;
    case Rel::lt: return s < 0;
    case Rel::eq: return s == 0;
    }
    return false;
}

bool Atom::evaluate(const Assignment& point) const {
    const int s = term_.evaluate(point).sign();
    switch (rel_) {
    case Rel::le: return s <= 0;
    case Rel::lt: return s < 0;
    case Rel::eq: return s == 0;
    }
    return false;
}

Atom Atom::substitute(std::string_view name, const LinearTerm& value) const {
    if (!term_.mentions(name)) {
        return *this;
    }
    return {term_.substitute(name, value), rel_};
}

Atom Atom::rename(std::string_view from, const Variable& to) const {
    return substitute(from, LinearTerm(to));
}

std::string Atom::to_string() const {
    if (is_ground()) {
        return ground_value() ? "true" : "false";
    }
    LinearTerm lhs = term_ - LinearTerm(term_.constant());
    if (rel_ != Rel::eq && lhs.entries().front().second.sign() < 0) {
        const char* op = rel_ == Rel::le ? " >= " : " > ";
        return (-lhs).to_string() + op + term_.constant().to_string();
    }
    const char* op = rel_ == Rel::le ? " <= " : (rel_ == Rel::lt ? " < " : " = ");
    return lhs.to_string() + op + (-term_.constant()).to_string();
}

bool operator<(const Atom& a, const Atom& b) {
    const auto& ea = a.term_.entries();
    const auto& eb = b.term_.entries();
    const std::size_t n = std::min(ea.size(), eb.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (ea[i].first.name != eb[i].first.name) {
            return ea[i].first.name < eb[i].first.name;
        }
        if (ea[i].second != eb[i].second) {
            return ea[i].second < eb[i].second;
        }
    }
    if (ea.size() != eb.size()) {
        return ea.size() < eb.size();
    }
    if (a.rel_ != b.rel_) {
        return a.rel_ < b.rel_;
    }
    return a.term_.constant() < b.term_.constant();
}

std::string to_string(const Conjunction& c) {
    if (c.empty()) {
        return "true";
    }
    std::string out;
    for (const auto& a : c) {
        if (!out.empty()) {
            out += " & ";
        }
        out += a.to_string();
    }
    return out;
}

bool evaluate(const Conjunction& c, const Assignment& point) {
    return std::all_of(c.begin(), c.end(), [&](const Atom& a) { return a.evaluate(point); });
}

Conjunction canonical(Conjunction c) {
    Conjunction out;
    out.reserve(c.size());
    for (auto& a : c) {
        if (a.is_ground()) {
            if (!a.ground_value()) {
                return {Atom::falsum()};
            }
            continue;
        }
        out.push_back(std::move(a));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_false(const Conjunction& c) {
    return std::any_of(c.begin(), c.end(), [](const Atom& a) { return a.is_ground() && !a.ground_value(); });
}

} // namespace eta
