// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "eta/formula.hpp"
#include "eta/lp.hpp"
#include "support.hpp"

using namespace eta;

namespace {

Conjunction conj(const char* s) {
    ParseOptions o;
    o.allow_strict = true;
    const Formula f = parse_formula(s, o);
    Conjunction c;
    if (f.kind() == Formula::Kind::atom) {
        return {f.atom()};
    }
    for (const auto& ch : f.children()) {
        c.push_back(ch.atom());
    }
    return c;
}

} // namespace

TEST_CASE("lp optimum with exact witness") {
    const Conjunction c = conj("x + y <= 4 & x + 3*y <= 6 & x >= 0 & y >= 0");
    const auto r = lp::optimize(c, parse_term("3*x + 2*y"), Direction::maximize);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == Rational(12));
    CHECK(evaluate(c, r.witness));
    const auto m = lp::optimize(c, parse_term("x - 2*y"), Direction::minimize);
    REQUIRE(m.status == LpStatus::optimal);
    CHECK(m.value == Rational(-4));
}

TEST_CASE("lp fractional optimum") {
    const Conjunction c = conj("2*x + 3*y <= 7 & 5*x - y <= 3 & x >= 0 & y >= 0");
    const auto r = lp::optimize(c, parse_term("x + y"), Direction::maximize);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == Rational(45, 17));
    CHECK(r.witness.at("x") == Rational(16, 17));
    CHECK(r.witness.at("y") == Rational(29, 17));
}

TEST_CASE("lp detects infeasible and unbounded problems") {
    CHECK(lp::feasible(conj("x >= 5 & x <= 3")).status == LpStatus::infeasible);
    CHECK(lp::optimize(conj("x >= 0"), parse_term("x"), Direction::maximize).status == LpStatus::unbounded);
    CHECK(lp::optimize(conj("x - y = 0"), parse_term("x - y"), Direction::maximize).value == Rational(0));
}

TEST_CASE("strict atoms") {
    CHECK_FALSE(lp::feasible(conj("x < 1 & x > 1")).feasible());
    CHECK_FALSE(lp::feasible(conj("x < 1 & x >= 1")).feasible());
    const auto r = lp::feasible(conj("x > 1 & x < 2 & y = x"));
    REQUIRE(r.feasible());
    CHECK(evaluate(conj("x > 1 & x < 2 & y = x"), r.witness));
    const auto s = lp::optimize(conj("x < 3"), parse_term("x"), Direction::maximize);
    CHECK(s.value == Rational(3));
}

TEST_CASE("implies") {
    const Conjunction c = conj("x <= 1 & y <= 2");
    CHECK(lp::implies(c, Atom::le(parse_term("x + y"), LinearTerm(Rational(3)))));
    CHECK_FALSE(lp::implies(c, Atom::le(parse_term("x + y"), LinearTerm(Rational(2)))));
    CHECK(lp::implies(conj("x >= 1 & x <= 1"), Atom::eq(parse_term("x"), LinearTerm(Rational(1)))));
}

TEST_CASE("optimum satisfies weak duality against random feasible points") {
    testing::Gen g(3);
    const std::vector<std::string> vars{"x", "y", "z"};
    for (int i = 0; i < 100; ++i) {
        Conjunction c;
        for (const auto& v : vars) {
            c.push_back(Atom::le(LinearTerm(Variable(v)), LinearTerm(Rational(5))));
            c.push_back(Atom::ge(LinearTerm(Variable(v)), LinearTerm(Rational(-5))));
        }
        for (int k = 0; k < 4; ++k) {
            c.push_back(g.atom(vars, 3));
        }
        LinearTerm obj;
        for (const auto& v : vars) {
            obj += LinearTerm(Variable(v), Rational(g.integer(-3, 3)));
        }
        const auto r = lp::optimize(c, obj, Direction::maximize);
        if (r.status == LpStatus::infeasible) {
            for (int k = 0; k < 50; ++k) {
                CHECK_FALSE(evaluate(c, g.point(vars)));
            }
            continue;
        }
        REQUIRE(r.status == LpStatus::optimal);
        Assignment w = r.witness;
        for (const auto& v : vars) {
            w.try_emplace(v, Rational(0));
        }
        CHECK(evaluate(c, w));
        CHECK(obj.evaluate(w) == r.value);
        for (int k = 0; k < 50; ++k) {
            const auto p = g.point(vars);
            if (evaluate(c, p)) {
                CHECK(obj.evaluate(p) <= r.value);
            }
        }
    }
}
