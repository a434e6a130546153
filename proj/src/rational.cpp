// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "eta/errors.hpp"

namespace eta {

Rational::Rational(long num, long den) {
    if (den == 0) {
        throw InputError("rational with zero denominator");
    }
    v_ = mpq_class(num, den);
    v_.canonicalize();
}

namespace {

std::optional<mpq_class> parse_decimal(std::string_view s) {
    if (s.empty()) {
        return std::nullopt;
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    std::string digits;
    int frac_digits = 0;
    bool seen_dot = false;
    bool any = false;
    for (; i < s.size(); ++i) {
        const char c = s[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any = true;
            if (seen_dot) {
                ++frac_digits;
            }
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any) {
        return std::nullopt;
    }
    long exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') {
            return std::nullopt;
        }
        ++i;
        bool eneg = false;
        if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
            eneg = s[i] == '-';
            ++i;
        }
        if (i == s.size()) {
            return std::nullopt;
        }
        for (; i < s.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(s[i])) || exponent > 100000) {
                return std::nullopt;
            }
            exponent = exponent * 10 + (s[i] - '0');
        }
        if (eneg) {
            exponent = -exponent;
        }
    }
    mpz_class num(digits, 10);
    mpz_class den = 1;
    const long shift = exponent - frac_digits;
    mpz_class pow;
    mpz_ui_pow_ui(pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    if (shift < 0) {
        den = pow;
    } else {
        num *= pow;
    }
    mpq_class q(num, den);
    q.canonicalize();
    if (neg) {
        q = -q;
    }
    return q;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

} // namespace

std::optional<Rational> Rational::try_parse(std::string_view text) {
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        auto q = parse_decimal(text);
        if (!q) {
            return std::nullopt;
        }
        return Rational(*q);
    }
    auto n = parse_decimal(trim(text.substr(0, slash)));
    auto d = parse_decimal(trim(text.substr(slash + 1)));
    if (!n || !d || sgn(*d) == 0) {
        return std::nullopt;
    }
    return Rational(mpq_class(*n / *d));
}

Rational Rational::parse(std::string_view text) {
    auto r = try_parse(text);
    if (!r) {
        throw InputError("invalid rational literal '" + std::string(text) + "'");
    }
    return *r;
}

Rational Rational::from_double(double v) {
    if (!std::isfinite(v)) {
        throw InputError("non-finite value");
    }
    return Rational(mpq_class(v));
}

Rational& Rational::operator/=(const Rational& o) {
    if (o.is_zero()) {
        throw std::domain_error("division by zero");
    }
    v_ /= o.v_;
    return *this;
}

Rational Rational::abs() const { return Rational(mpq_class(::abs(v_))); }

Rational Rational::floor() const {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return Rational(mpq_class(r));
}

Rational Rational::ceil() const {
    mpz_class r;
    mpz_cdiv_q(r.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
    return Rational(mpq_class(r));
}

std::string Rational::to_fraction() const {
    if (is_integer()) {
        return v_.get_num().get_str();
    }
    return v_.get_num().get_str() + "/" + v_.get_den().get_str();
}

std::string Rational::to_string() const {
    if (is_integer()) {
        return v_.get_num().get_str();
    }
    mpz_class den = v_.get_den();
    int twos = 0;
    int fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        ++fives;
    }
    if (den != 1) {
        return to_fraction();
    }
    const int digits = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class scaled = ::abs(v_.get_num()) * (scale / v_.get_den());
    std::string s = scaled.get_str();
    if (static_cast<int>(s.size()) <= digits) {
        s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    return (sign() < 0 ? "-" : "") + s;
}

std::string Rational::to_decimal(int digits) const {
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpq_class scaled = ::abs(v_) * scale;
    // round half away from zero
    mpz_class twice = (scaled.get_num() * 2 + scaled.get_den());
    mpz_class den2 = scaled.get_den() * 2;
    mpz_class rounded;
    mpz_fdiv_q(rounded.get_mpz_t(), twice.get_mpz_t(), den2.get_mpz_t());
    std::string s = rounded.get_str();
    if (digits > 0) {
        if (static_cast<int>(s.size()) <= digits) {
            s.insert(0, static_cast<std::size_t>(digits) - s.size() + 1, '0');
        }
        s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    }
    const bool negative = sign() < 0 && rounded != 0;
    return (negative ? "-" : "") + s;
}

Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

} // namespace eta
