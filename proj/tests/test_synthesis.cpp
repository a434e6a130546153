// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include "eta/errors.hpp"
#include "eta/hydac.hpp"
#include "eta/lp.hpp"
#include "eta/model_io.hpp"
#include "eta/relations.hpp"
#include "eta/strategy.hpp"
#include "eta/synthesis.hpp"
#include "support.hpp"

using namespace eta;
using namespace eta::testing;

namespace {

const Interval E06(Rational(0), Rational(6));

const Seta& fig3() {
    static const Seta s = load_model(ETA_MODELS_DIR "/fig3.yaml").seta;
    return s;
}

Interval pt(const Rational& x) { return Interval::point(x); }

// Random points of a polytope: convex combinations of LP vertices for random objectives.
std::vector<Assignment> polytope_points(const Conjunction& c, const std::vector<Variable>& vars, Gen& g,
                                        std::size_t count) {
    std::vector<Assignment> vertices;
    for (int k = 0; k < 12; ++k) {
        LinearTerm obj;
        for (const auto& v : vars) {
            obj += LinearTerm(v, Rational(g.integer(-10, 10)));
        }
        const auto r = lp::optimize(c, obj, Direction::maximize);
        if (r.status == LpStatus::optimal) {
            vertices.push_back(r.witness);
        }
    }
    std::vector<Assignment> out;
    if (vertices.empty()) {
        return out;
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<Rational> wts;
        Rational total;
        for (std::size_t k = 0; k < vertices.size(); ++k) {
            wts.emplace_back(g.integer(0, 5));
            total += wts.back();
        }
        if (total.is_zero()) {
            wts[0] = Rational(1);
            total = Rational(1);
        }
        Assignment p;
        for (const auto& v : vars) {
            Rational x;
            for (std::size_t k = 0; k < vertices.size(); ++k) {
                auto it = vertices[k].find(v.name);
                if (it != vertices[k].end()) {
                    x += wts[k] * it->second;
                }
            }
            p[v.name] = x / total;
        }
        out.push_back(std::move(p));
    }
    return out;
}

Conjunction atoms_of(const Formula& f) {
    if (f.kind() == Formula::Kind::atom) {
        return {f.atom()};
    }
    REQUIRE(f.kind() == Formula::Kind::conj);
    Conjunction c;
    for (const auto& ch : f.children()) {
        REQUIRE(ch.kind() == Formula::Kind::atom);
        c.push_back(ch.atom());
    }
    return c;
}

// Upper-envelope lap mean by direct integration of the segments.
Rational lap_mean(const EnergyTimedPath& p, const std::vector<Rational>& d, const Rational& w0) {
    Rational level = w0;
    Rational area;
    Rational time;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const Rational r = p.states[k].rate + p.states[k].eps;
        area += level * d[k] + r * d[k] * d[k] / Rational(2);
        level += r * d[k] + p.transitions[k].update + p.transitions[k].delta;
        time += d[k];
    }
    return area / time;
}

} // namespace

TEST_CASE("infinite run on the example SETA") {
    const auto r = decide_infinite_run(fig3(), "s0", pt(Rational(0)), E06);
    REQUIRE(r.exists);
    CHECK(fig3().macro_states[r.entry_state] == "s2");
    CHECK(r.entry == pt(Rational(5)));
    CHECK(r.fixpoint == Interval(Rational(5, 3), Rational(6)));
    REQUIRE(r.cycle.size() == 1);
    CHECK(fig3().transitions[r.cycle[0]].from == "s2");
    CHECK(fig3().transitions[r.cycle[0]].to == "s2");
    REQUIRE(r.picked.size() >= 4);
    CHECK(r.picked[2].macro_state == *fig3().index_of("s1"));
    CHECK(r.picked[2].interval == pt(Rational(4)));
    CHECK(r.picked[3].macro_state == *fig3().index_of("s2"));
    CHECK(r.picked[3].interval == Interval(Rational(0), Rational(1)));
}

TEST_CASE("infinite run: acyclic graph has none") {
    Seta s = fig3();
    std::erase_if(s.transitions, [](const MacroTransition& t) { return t.from == t.to; });
    CHECK_FALSE(decide_infinite_run(s, "s0", pt(Rational(0)), E06).exists);
}

TEST_CASE("infinite run: losing self-loop is rejected after finitely many laps") {
    // w drops by 3 and regains 2 per lap, so w0 >= 3 and w1 = w0 - 1
    const Seta s = loop_seta({{Rational(0), Rational(-3)}, {Rational(0), Rational(2)}});
    const auto r = decide_infinite_run(s, "m", pt(Rational(6)), E06);
    CHECK_FALSE(r.exists);
    const auto& p = s.transitions[0].path;
    int n = 0;
    while (laps_feasible(p, pt(Rational(6)), E06, E06, n + 1)) {
        ++n;
    }
    CHECK(n == 4);
    Interval i = pt(Rational(6));
    const auto rel = build_binary(p, E06);
    for (int k = 0; k < n; ++k) {
        i = apply(rel, i);
        CHECK_FALSE(i.is_empty());
    }
    CHECK(apply(rel, i).is_empty());
}

TEST_CASE("infinite run rejects non-flat and uncertain input") {
    Seta s = loop_seta({{Rational(1), Rational(-1)}});
    s.transitions.push_back(s.transitions.front());
    s.transitions.back().path.transitions[0].update = Rational(-2);
    REQUIRE(validate(s).empty());
    REQUIRE_FALSE(is_flat(s).flat);
    CHECK_THROWS_AS(decide_infinite_run(s, "m", pt(Rational(0)), E06), PreconditionError);
    CHECK_THROWS_AS(decide_infinite_run(build_hydac({.epsilon = Rational(1, 10)}), "m0", pt(Rational(5)),
                                        Interval(Rational(49, 10), Rational(8))),
                    PreconditionError);
}

TEST_CASE("infinite run agrees with the grid lasso oracle on random flat SETAs") {
    Gen g(515);
    int agreed_true = 0;
    int tested = 0;
    while (tested < 50) {
        const Seta s = random_flat_seta(g);
        if (!validate(s).empty() || !is_flat(s).flat || s.transitions.empty()) {
            continue;
        }
        ++tested;
        const Interval i0 = pt(Rational(g.integer(0, 12), 2));
        const bool oracle = grid_infinite_run(s, i0, E06, Rational(1, 2));
        const auto r = decide_infinite_run(s, s.initial, i0, E06);
        if (oracle) {
            CHECK(r.exists);
            ++agreed_true;
        }
        if (r.exists) {
            REQUIRE_FALSE(r.fixpoint.is_empty());
            CHECK(r.entry.meets(r.fixpoint));
            CHECK(E06.contains(r.fixpoint));
            const auto chain = cycle_chain(s, r.cycle);
            for (const auto& x : {*r.fixpoint.lo(), *r.fixpoint.hi()}) {
                CHECK(chain_feasible(chain, pt(x), r.fixpoint, E06));
            }
        }
    }
    CHECK(agreed_true >= 10);
}

TEST_CASE("termination: intervals outside the fixpoint empty out") {
    Gen g(99);
    int cases = 0;
    for (int k = 0; k < 40; ++k) {
        std::vector<std::pair<Rational, Rational>> steps;
        const int n = g.integer(1, 2);
        for (int i = 0; i < n; ++i) {
            steps.emplace_back(Rational(g.integer(-6, 6), 2), Rational(g.integer(-6, 6), 2));
        }
        const Seta s = loop_seta(steps);
        const auto& p = s.transitions[0].path;
        const auto rel = build_binary(p, E06);
        const Interval nu = greatest_fixpoint(rel);
        for (int w = 0; w <= 12; ++w) {
            const Interval i = pt(Rational(w, 2));
            if (i.meets(nu)) {
                continue;
            }
            ++cases;
            Interval img = i;
            int laps = 0;
            while (!img.is_empty() && laps < 200) {
                img = apply(rel, img);
                ++laps;
                CHECK(img.is_empty() == !laps_feasible(p, i, E06, E06, laps));
            }
            CHECK(img.is_empty());
            CHECK_FALSE(decide_infinite_run(s, "m", i, E06).exists);
        }
    }
    CHECK(cases > 50);
}

TEST_CASE("upper bound existence and cycle entry levels") {
    CHECK(upper_bound_exists(fig3(), Rational(0), Rational(0)));
    // strict loss of one unit per lap under [0; +inf)
    const Seta loss = loop_seta({{Rational(-1), Rational(0)}});
    CHECK_FALSE(upper_bound_exists(loss, Rational(3), Rational(0)));
    const auto report = upper_bound_analysis(fig3(), Rational(0), Rational(0));
    CHECK(report.exists);

    // a_min of the s2 loop: limit of the fixpoint lower ends as U grows
    const EnergyTimedPath* p22 = nullptr;
    for (const auto& t : fig3().transitions) {
        if (t.from == "s2" && t.to == "s2") {
            p22 = &t.path;
        }
    }
    REQUIRE(p22 != nullptr);
    const auto amin = minimal_cycle_entry(*p22, Rational(0));
    REQUIRE(amin);
    std::optional<Rational> sweep;
    for (int u = 0; u <= 40; ++u) {
        const Interval nu = greatest_fixpoint(build_binary(*p22, Interval(Rational(0), Rational(u, 2))));
        if (!nu.is_empty() && (!sweep || *nu.lo() < *sweep)) {
            sweep = *nu.lo();
        }
    }
    REQUIRE(sweep);
    CHECK(*amin == *sweep);
    CHECK(*amin == Rational(5, 3));
}

TEST_CASE("minimal upper bound of an energy-preserving cycle") {
    const Seta flat = loop_seta({{Rational(0), Rational(0)}});
    for (const auto& [l, w0] : {std::pair{Rational(1), Rational(3)}, std::pair{Rational(2), Rational(2)}}) {
        const auto r = minimal_upper_bound(flat, l, w0);
        REQUIRE(r.exists);
        CHECK(r.bound == max(l, w0));
    }
}

TEST_CASE("minimal upper bound matches bisection with the decision procedure") {
    const Seta h1 = build_hydac({});
    const Rational l(49, 10);
    const auto r = minimal_upper_bound(h1, l, l);
    REQUIRE(r.exists);
    Rational lo = l;
    Rational hi(8);
    REQUIRE(decide_infinite_run(h1, "m0", pt(l), Interval(l, hi)).exists);
    while (hi - lo > Rational(1, 1000)) {
        const Rational mid = (lo + hi) / Rational(2);
        if (decide_infinite_run(h1, "m0", pt(l), Interval(l, mid)).exists) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    CHECK(lo <= r.bound);
    CHECK(r.bound <= hi);
    CHECK(decide_infinite_run(h1, "m0", pt(l), Interval(l, r.bound)).exists);
}

TEST_CASE("minimal upper bound is monotone in L and epsilon") {
    std::optional<Rational> last;
    for (const auto& l : {Rational(49, 10), Rational(5), Rational(26, 5)}) {
        const auto r = minimal_upper_bound(build_hydac({}), l, l);
        REQUIRE(r.exists);
        if (last) {
            CHECK(*last <= r.bound);
        }
        last = r.bound;
    }
    last.reset();
    for (const auto& e : {Rational(0), Rational(1, 20), Rational(1, 10)}) {
        const auto r = minimal_upper_bound(build_hydac({.epsilon = e}), Rational(49, 10), Rational(49, 10));
        REQUIRE(r.exists);
        if (last) {
            CHECK(*last <= r.bound);
        }
        last = r.bound;
    }
}

TEST_CASE("uncertain decision around the H2 bound") {
    const Seta h2e = build_hydac({.variant = HydacVariant::h2, .epsilon = Rational(1, 10)});
    const Rational l(49, 10);
    CHECK_FALSE(decide_infinite_run_uncertain(h2e, "m0", Rational(6), Interval(l, Rational(89, 10))).exists);
    CHECK(decide_infinite_run_uncertain(h2e, "m0", Rational(6), Interval(l, Rational(91, 10))).exists);
    // narrower than one guaranteed spread
    CHECK_FALSE(decide_infinite_run_uncertain(h2e, "m0", Rational(5), Interval(l, Rational(5))).exists);
}

TEST_CASE("permissive strategy edge cases") {
    const Seta h1 = build_hydac({});
    const auto& cycle = h1.transitions[0].path;
    const auto bad = permissive_strategy(cycle, Interval(Rational(6), Rational(5)), Interval(Rational(6), Rational(6)));
    CHECK(bad.constraint.is_false());

    HydacConfig idle;
    idle.machine_rates.assign(10, Rational(0));
    const Seta zs = build_hydac(idle);
    const auto& zc = zs.transitions[0].path;
    const Interval e(Rational(49, 10), Rational(10));
    const auto ps = permissive_strategy(zc, e, e);
    for (const auto& w0 : {Rational(49, 10), Rational(7), Rational(10)}) {
        Assignment a{{"w0", w0}};
        for (std::size_t i = 0; i < ps.times.size(); i += 2) {
            const Rational t(static_cast<long>(2 * (i / 2)));
            a[ps.times[i].name] = t;
            a[ps.times[i + 1].name] = t;
        }
        CHECK(evaluate(ps.constraint, a));
        const auto cs = optimal_strategy(ps, w0);
        CHECK(cs.predicted_mean == w0);
        for (const auto& st : cs.switch_times) {
            CHECK(st.on == st.off);
        }
    }
    CHECK_THROWS_AS(optimal_strategy(ps, Rational(11)), PreconditionError);
}

TEST_CASE("permissive strategy points are safe under adversarial rates") {
    const HydacConfig cfg{.epsilon = Rational(1, 10)};
    const Seta h1e = build_hydac(cfg);
    const auto& cycle = h1e.transitions[0].path;
    const Rational l(49, 10);
    const Rational u(3509, 490);
    const Interval stable(l, u);
    const auto ps = permissive_strategy(cycle, Interval(l, u), stable);
    const Rational w0(716, 100);
    Conjunction c;
    for (const auto& a : atoms_of(ps.constraint)) {
        c.push_back(a.substitute("w0", LinearTerm(w0)));
    }
    Gen g(716);
    const auto points = polytope_points(c, ps.times, g, 100);
    REQUIRE(points.size() == 100);
    std::mt19937_64 rng(1);
    for (const auto& p : points) {
        // the switch times fix every delay of the slot structure
        Conjunction timing = timing_constraints(cycle, ps.delays);
        const auto times = switch_time_variables(cycle);
        std::size_t j = 0;
        LinearTerm clock;
        for (std::size_t k = 0; k < ps.delays.size(); ++k) {
            if (cycle.states[k].controlled) {
                timing.push_back(Atom::eq(clock, LinearTerm(p.at(times[j].name))));
                timing.push_back(Atom::eq(clock + LinearTerm(ps.delays[k]), LinearTerm(p.at(times[j + 1].name))));
                j += 2;
            }
            clock += LinearTerm(ps.delays[k]);
        }
        const auto r = lp::feasible(timing);
        REQUIRE(r.feasible());
        std::vector<Rational> d;
        for (const auto& v : ps.delays) {
            d.push_back(r.witness.count(v.name) ? r.witness.at(v.name) : Rational(0));
        }
        for (int k = 0; k < 10; ++k) {
            const auto o = sampled_lap(cycle, d, w0, rng);
            CHECK(o.lowest >= l);
            CHECK(o.highest <= u);
            CHECK(stable.contains(o.end));
        }
    }
}

TEST_CASE("optimal strategy beats random feasible schedules") {
    const Seta h1 = build_hydac({});
    const auto& cycle = h1.transitions[0].path;
    const Rational l(49, 10);
    const Rational u(467, 80);
    const auto ps = permissive_strategy(cycle, Interval(l, u), Interval(l, u), false);
    const Rational w0(27, 5);
    const auto cs = optimal_strategy(ps, w0);
    CHECK(cs.predicted_mean == lap_mean(cycle, cs.delays, w0));
    Conjunction c;
    for (const auto& a : ps.delay_constraint) {
        c.push_back(a.substitute("w0", LinearTerm(w0)));
    }
    Gen g(200);
    const auto points = polytope_points(c, ps.delays, g, 200);
    REQUIRE(points.size() == 200);
    for (const auto& p : points) {
        std::vector<Rational> d;
        for (const auto& v : ps.delays) {
            d.push_back(p.at(v.name));
        }
        CHECK(cs.predicted_mean <= lap_mean(cycle, d, w0));
    }
}
