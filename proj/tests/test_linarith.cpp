// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "eta/errors.hpp"
#include "eta/formula.hpp"
#include "support.hpp"

using namespace eta;

namespace {

Formula f(const char* s) { return parse_formula(s); }

} // namespace

TEST_CASE("decimal literals parse exactly") {
    CHECK(Rational::parse("1.2") == Rational(6, 5));
    CHECK(Rational::parse("5.84") == Rational(146, 25));
    CHECK(Rational::parse("-3/4") == Rational(-3, 4));
    CHECK(Rational::parse("1e-3") == Rational(1, 1000));
    CHECK(Rational::parse(" 7 ") == Rational(7));
    CHECK_FALSE(Rational::try_parse("1/0"));
    CHECK_FALSE(Rational::try_parse("abc"));
    CHECK_THROWS_AS(Rational::parse("1.2.3"), InputError);
}

TEST_CASE("rationals print as decimals when finite") {
    CHECK(Rational(467, 80).to_string() == "5.8375");
    CHECK(Rational(5, 3).to_string() == "5/3");
    CHECK(Rational(-1, 20).to_string() == "-0.05");
    CHECK(Rational(12).to_string() == "12");
    CHECK(Rational(467, 80).to_decimal(2) == "5.84");
    CHECK(Rational(-1, 200).to_decimal(2) == "-0.01");
    CHECK(Rational(1, 300).to_decimal(2) == "0.00");
}

TEST_CASE("rational arithmetic is exact") {
    testing::Gen g(1);
    for (int i = 0; i < 500; ++i) {
        const Rational a = g.rational(-1000, 1000) / Rational(g.integer(1, 97));
        Rational b = g.rational(-1000, 1000) / Rational(g.integer(1, 89));
        CHECK((a + b) - b == a);
        if (!b.is_zero()) {
            CHECK((a * b) / b == a);
        }
    }
}

TEST_CASE("evaluate") {
    CHECK(evaluate(f("w <= 3"), {{"w", Rational(3)}}));
    CHECK(evaluate(f("w <= 3 & !(w <= 1)"), {{"w", Rational(2)}}));
    CHECK(evaluate(f("5/3 <= w & w <= 6"), {{"w", Rational(5, 3)}}));
    CHECK_FALSE(evaluate(f("5/3 <= w & w <= 6"), {{"w", Rational(3, 2)}}));
    try {
        (void)evaluate(f("w <= 3 & v >= 0"), {{"w", Rational(1)}});
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("'v'") != std::string::npos);
    }
    CHECK_THROWS_AS(evaluate(f("E x. x <= w"), {{"w", Rational(1)}}), InputError);
}

TEST_CASE("parser and printer") {
    CHECK_THROWS_AS(f("x < 1"), InputError);
    CHECK_THROWS_AS(f("x * y <= 1"), InputError);
    CHECK_THROWS_AS(f("x <= "), InputError);
    CHECK(f("(x + 1) <= 2").to_string() == "x <= 1");
    CHECK(f("0 <= w <= 6").to_string() == "w >= 0 & w <= 6");
    CHECK(f("x >= 1.5").to_string() == "x >= 1.5");
    const Formula q = f("E x. (x <= y & 0 <= x) | A z. z - y <= 2");
    CHECK(q.free_vars() == std::vector<std::string>{"y"});
    CHECK(parse_formula(q.to_string()).to_string() == q.to_string());
    ParseOptions strict;
    strict.allow_strict = true;
    CHECK(parse_formula("x < 1", strict).to_string() == "x < 1");
}

TEST_CASE("printed formulas round trip") {
    testing::Gen g(7);
    ParseOptions strict;
    strict.allow_strict = true;
    const std::vector<std::string> vars{"x", "y", "z"};
    for (int i = 0; i < 200; ++i) {
        Formula a = g.qf(vars, 3);
        Formula b = parse_formula(a.to_string(), strict);
        for (int k = 0; k < 5; ++k) {
            auto p = g.point(vars);
            CHECK(evaluate(a, p) == evaluate(b, p));
        }
    }
}

TEST_CASE("alpha renaming keeps bound and free variables apart") {
    Formula inner = Formula::exists(Variable("x"), f("x <= y"));
    Formula both = Formula::conj({inner, f("x >= 2")});
    CHECK(both.free_vars() == std::vector<std::string>{"x", "y"});
    for (const auto& b : both.bound_vars()) {
        CHECK(b != "x");
    }
    Formula sub = Formula::exists(Variable("x"), f("x <= y")).substitute("y", LinearTerm(Variable("x")));
    CHECK(sub.free_vars() == std::vector<std::string>{"x"});
}

TEST_CASE("normalize examples") {
    Formula n = normalize(f("!(x <= 1 | y <= 2)"));
    CHECK(n.kind() == Formula::Kind::conj);
    CHECK(evaluate(n, {{"x", Rational(2)}, {"y", Rational(3)}}));
    CHECK_FALSE(evaluate(n, {{"x", Rational(1)}, {"y", Rational(3)}}));
    Formula d = normalize(f("(x <= 0 | y <= 0) & z <= 0"));
    REQUIRE(d.kind() == Formula::Kind::disj);
    CHECK(d.children().size() == 2);
    CHECK(normalize(Formula::conj({Formula::top(), f("x <= 1")})).to_string() == "x <= 1");
}

TEST_CASE("normalize preserves satisfaction") {
    testing::Gen g(11);
    const std::vector<std::string> vars{"x", "y", "z"};
    int disagreements = 0;
    for (int i = 0; i < 500; ++i) {
        Formula a = g.qf(vars, 4);
        Formula n = normalize(a);
        for (int k = 0; k < 20; ++k) {
            auto p = g.point(vars);
            if (evaluate(a, p) != evaluate(n, p)) {
                ++disagreements;
            }
        }
    }
    CHECK(disagreements == 0);
}

TEST_CASE("interval_of") {
    CHECK(interval_of(f("5/3 <= w & w <= 6"), Variable("w")) == Interval(Rational(5, 3), Rational(6)));
    CHECK(interval_of(f("w <= -1 & 0 <= w"), Variable("w")).is_empty());
    CHECK(interval_of(f("0 <= w"), Variable("w")) == Interval::at_least(Rational(0)));
    CHECK_THROWS_AS(interval_of(f("0 <= w & v <= 1"), Variable("w")), InputError);
}

TEST_CASE("interval_of matches pointwise membership") {
    testing::Gen g(5);
    for (int i = 0; i < 200; ++i) {
        Conjunction c;
        const int k = g.integer(1, 3);
        for (int j = 0; j < k; ++j) {
            Atom a = g.atom({"w"}, 1);
            if (a.rel() == Rel::eq && g.coin(0.7)) {
                a = Atom(a.term(), Rel::le);
            }
            c.push_back(a);
        }
        const Formula fc = Formula::of(c);
        const Interval iv = interval_of(fc, Variable("w"));
        const Rational step(1, 1000);
        if (iv.is_empty()) {
            for (int s = -20; s <= 20; ++s) {
                CHECK_FALSE(evaluate(fc, {{"w", Rational(s, 4)}}));
            }
            continue;
        }
        if (iv.lo()) {
            CHECK(evaluate(fc, {{"w", *iv.lo()}}));
            CHECK_FALSE(evaluate(fc, {{"w", *iv.lo() - step}}));
        }
        if (iv.hi()) {
            CHECK(evaluate(fc, {{"w", *iv.hi()}}));
            CHECK_FALSE(evaluate(fc, {{"w", *iv.hi() + step}}));
        }
    }
}

TEST_CASE("interval operations") {
    const Interval a(Rational(0), Rational(3));
    const Interval b(Rational(2), Rational(5));
    CHECK(a.intersect(b) == Interval(Rational(2), Rational(3)));
    CHECK(a.hull(b) == Interval(Rational(0), Rational(5)));
    CHECK(a.intersect(Interval(Rational(4), Rational(5))).is_empty());
    CHECK(Interval(Rational(5), Rational(3)).is_empty());
    CHECK(Interval::at_least(Rational(0)).to_string() == "[0; +inf)");
    CHECK(Interval(Rational(5, 3), Rational(6)).to_string() == "[5/3; 6]");
}
