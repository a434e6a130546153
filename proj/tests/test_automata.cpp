// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <set>

#include "eta/automata.hpp"
#include "eta/errors.hpp"
#include "eta/hydac.hpp"
#include "eta/lp.hpp"
#include "eta/model_io.hpp"
#include "support.hpp"

using namespace eta;

namespace {

Seta fig3() { return load_model(ETA_MODELS_DIR "/fig3.yaml").seta; }

EnergyTimedPath loop_path(const std::string& m, const ClockConstraint& guard) {
    EnergyTimedPath p;
    p.clocks = {"x"};
    EtpState s;
    s.id = m;
    p.states = {s, s};
    EtpTransition t;
    t.guard = guard;
    t.resets = {"x"};
    p.transitions = {t};
    return p;
}

Seta graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    Seta s;
    s.clocks = {"x"};
    for (std::size_t i = 0; i < n; ++i) {
        s.macro_states.push_back("m" + std::to_string(i));
    }
    s.initial = "m0";
    for (const auto& [a, b] : edges) {
        EnergyTimedPath p = loop_path(s.macro_states[a], {{"x", ClockRel::eq, Rational(1)}});
        p.states.back().id = s.macro_states[b];
        s.transitions.push_back({s.macro_states[a], s.macro_states[b], p});
    }
    return s;
}

// A set of edges is a simple cycle iff it is connected and every touched node has in = out = 1.
std::vector<int> cycles_per_node_bruteforce(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& e) {
    std::vector<int> count(n, 0);
    const std::size_t m = e.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
        std::vector<int> in(n, 0);
        std::vector<int> out(n, 0);
        std::size_t start = n;
        for (std::size_t i = 0; i < m; ++i) {
            if ((mask >> i) & 1U) {
                ++out[e[i].first];
                ++in[e[i].second];
                start = e[i].first;
            }
        }
        bool ok = true;
        for (std::size_t v = 0; v < n; ++v) {
            if (in[v] != out[v] || in[v] > 1) {
                ok = false;
            }
        }
        if (!ok) {
            continue;
        }
        std::size_t steps = 0;
        std::size_t at = start;
        do {
            for (std::size_t i = 0; i < m; ++i) {
                if (((mask >> i) & 1U) && e[i].first == at) {
                    at = e[i].second;
                    break;
                }
            }
            ++steps;
        } while (at != start && steps <= m);
        if (steps != static_cast<std::size_t>(__builtin_popcountll(mask))) {
            continue;
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (in[v] == 1) {
                ++count[v];
            }
        }
    }
    return count;
}

} // namespace

TEST_CASE("example model validates and is flat") {
    const Seta s = fig3();
    CHECK(validate(s).empty());
    const Flatness f = is_flat(s);
    CHECK(f.flat);
    CHECK_FALSE(f.depth_one);
    CHECK(simple_cycles(s).size() == 2);
}

TEST_CASE("HYDAC is a single self-loop") {
    for (auto v : {HydacVariant::h1, HydacVariant::h2}) {
        HydacConfig cfg;
        cfg.variant = v;
        const Seta s = build_hydac(cfg);
        CHECK(validate(s).empty());
        const Flatness f = is_flat(s);
        CHECK(f.flat);
        CHECK(f.depth_one);
    }
}

TEST_CASE("two self-loops on one macro-state are not flat") {
    const Seta s = graph(1, {{0, 0}, {0, 0}});
    CHECK_FALSE(is_flat(s).flat);
}

TEST_CASE("validation diagnostics") {
    Seta s = graph(2, {{0, 1}});
    s.transitions[0].path.transitions[0].guard = {{"y", ClockRel::eq, Rational(1)}};
    auto d = validate(s);
    REQUIRE_FALSE(d.empty());
    CHECK(d.front().message.find("'y'") != std::string::npos);
    Seta t = graph(2, {{0, 1}});
    t.transitions[0].path = EnergyTimedPath{};
    d = validate(t);
    REQUIRE_FALSE(d.empty());
    CHECK(d.front().message.find("missing") != std::string::npos);
    Seta u = graph(1, {{0, 0}});
    u.transitions[0].path.transitions[0].guard = {{"x", ClockRel::ge, Rational(0)}};
    u.transitions[0].path.states[0].invariant.clear();
    d = validate(u);
    REQUIRE_FALSE(d.empty());
    CHECK(d.front().message.find("unbounded") != std::string::npos);
}

TEST_CASE("flatness agrees with brute-force cycle enumeration") {
    testing::Gen g(8);
    for (int i = 0; i < 300; ++i) {
        const std::size_t n = static_cast<std::size_t>(g.integer(1, 8));
        std::vector<std::pair<std::size_t, std::size_t>> e;
        const int m = g.integer(0, 10);
        for (int k = 0; k < m; ++k) {
            e.emplace_back(g.integer(0, static_cast<int>(n) - 1), g.integer(0, static_cast<int>(n) - 1));
        }
        const auto counts = cycles_per_node_bruteforce(n, e);
        const bool flat = std::all_of(counts.begin(), counts.end(), [](int c) { return c <= 1; });
        const Seta s = graph(n, e);
        CHECK(is_flat(s).flat == flat);
        std::size_t total = 0;
        for (const auto& c : simple_cycles(s)) {
            std::set<std::size_t> nodes;
            for (auto t : c) {
                nodes.insert(*s.index_of(s.transitions[t].from));
            }
            CHECK(nodes.size() == c.size());
            total += c.size();
        }
        std::size_t want = 0;
        for (auto c : counts) {
            want += static_cast<std::size_t>(c);
        }
        CHECK(total == want);
    }
}

TEST_CASE("restriction R minimal durations") {
    const auto r = check_restriction_R(fig3());
    CHECK(r.holds);
    CHECK(r.min_duration == Rational(1));
    HydacConfig cfg;
    cfg.epsilon = Rational(1, 10);
    const auto h = check_restriction_R(build_hydac(cfg));
    CHECK(h.holds);
    CHECK(h.min_duration == Rational(20));
    CHECK(h.min_spread == Rational(2));
    Seta z = graph(1, {{0, 0}});
    z.transitions[0].path.transitions[0].guard = {{"x", ClockRel::ge, Rational(0)}};
    const auto f = check_restriction_R(z);
    CHECK_FALSE(f.holds);
    CHECK(f.message.find("zero time") != std::string::npos);
}

TEST_CASE("restriction R duration is a lower bound that is attained") {
    const Seta s = fig3();
    const Rational dmin = check_restriction_R(s).min_duration;
    bool attained = false;
    testing::Gen g(4);
    for (const auto& t : s.transitions) {
        const auto d = delay_variables(t.path);
        const Conjunction timing = timing_constraints(t.path, d);
        LinearTerm total;
        for (const auto& v : d) {
            total += LinearTerm(v);
        }
        for (int k = 0; k < 20; ++k) {
            LinearTerm obj;
            for (const auto& v : d) {
                obj += LinearTerm(v, Rational(g.integer(-3, 3)));
            }
            const auto r = lp::optimize(timing, obj, Direction::maximize);
            REQUIRE(r.status == LpStatus::optimal);
            Assignment w = r.witness;
            for (const auto& v : d) {
                w.try_emplace(v.name, Rational(0));
            }
            CHECK(total.evaluate(w) >= dmin);
            attained = attained || total.evaluate(w) == dmin;
        }
    }
    CHECK(attained);
}

TEST_CASE("HYDAC builder structure") {
    HydacConfig cfg;
    const Seta h1 = build_hydac(cfg);
    const auto& p = h1.transitions[0].path;
    int pumps = 0;
    for (std::size_t i = 0; i < p.states.size(); ++i) {
        if (p.states[i].controlled) {
            ++pumps;
            CHECK(p.states[i].rate == Rational(11, 5) + p.states[i - 1].rate);
        }
    }
    CHECK(pumps == 10);
    cfg.variant = HydacVariant::h2;
    const Seta h2 = build_hydac(cfg);
    const auto& q = h2.transitions[0].path;
    std::vector<std::string> ids;
    for (const auto& s : q.states) {
        if (s.controlled) {
            ids.push_back(s.id);
        }
    }
    CHECK(ids == std::vector<std::string>{"p2", "p4", "p6", "p8", "p10"});
    cfg.variant = HydacVariant::h1;
    cfg.epsilon = Rational(1, 10);
    cfg.zero_rate_noise = ZeroRateNoise::one_sided;
    const Seta one_sided = build_hydac(cfg);
    const auto& u = one_sided.transitions[0].path;
    CHECK(u.states[0].rate - u.states[0].eps == Rational(-1, 10));
    CHECK(u.states[0].rate + u.states[0].eps == Rational(0));
    CHECK(u.states[3].id == "s2");
    CHECK(u.states[3].rate - u.states[3].eps == Rational(-13, 10));
    CHECK(u.states[3].rate + u.states[3].eps == Rational(-11, 10));
    cfg.zero_rate_noise = ZeroRateNoise::exact;
    const Seta exact = build_hydac(cfg);
    const auto& v = exact.transitions[0].path;
    CHECK(v.states[0].eps == Rational(0));
    CHECK(v.states[3].eps == Rational(1, 10));
}

TEST_CASE("model files round trip") {
    const Model m = load_model(ETA_MODELS_DIR "/fig3.yaml");
    REQUIRE(m.energy);
    CHECK(*m.energy == Interval(Rational(0), Rational(6)));
    const Model again = parse_model(dump_model(m));
    CHECK(dump_model(again) == dump_model(m));
    CHECK(again.seta.transitions.size() == 5);
    HydacConfig cfg;
    Model h;
    h.seta = build_hydac(cfg);
    CHECK(dump_model(parse_model(dump_model(h))) == dump_model(h));
}

TEST_CASE("model errors are line anchored") {
    const std::string bad = "clocks: [x]\n"
                            "macro_states: [a]\n"
                            "initial: a\n"
                            "transitions:\n"
                            "  - from: a\n"
                            "    to: a\n"
                            "    path:\n"
                            "      states:\n"
                            "        - {id: a, rate: 1.2.3}\n"
                            "        - {id: a}\n"
                            "      edges:\n"
                            "        - {guard: x = 1, resets: [x]}\n";
    try {
        (void)parse_model(bad, "bad.yaml");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).rfind("bad.yaml:9:", 0) == 0);
    }
    CHECK_THROWS_AS(parse_model("macro_states: [a]\ninitial: b\ntransitions: []\n"), InputError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.yaml"), InputError);
    CHECK(parse_model("preset: h2\nepsilon: 0.1\n").hydac->variant == HydacVariant::h2);
}
