// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "eta/hydac.hpp"
#include "eta/model_io.hpp"
#include "eta/relations.hpp"
#include "eta/simulate.hpp"
#include "eta/strategy.hpp"
#include "eta/synthesis.hpp"
#include "oracles.hpp"

using namespace eta;
using namespace eta::testing;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << (detail.tellp() > 0 ? "; " : "") << "FAILED " << what;
        }
    }
    void note(const std::string& what) { detail << (detail.tellp() > 0 ? "; " : "") << what; }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x, int digits = 2) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

bool within(double got, double want, double tol) {
    return std::abs(got - want) <= tol;
}

bool relative(double got, double want, double tol) {
    return std::abs(got - want) <= tol * std::abs(want);
}

struct Variant {
    const char* label;
    HydacVariant variant;
    Rational eps;
};

const Variant kVariants[] = {
    {"H1", HydacVariant::h1, Rational(0)},
    {"H2", HydacVariant::h2, Rational(0)},
    {"H1(eps)", HydacVariant::h1, Rational(1, 10)},
    {"H2(eps)", HydacVariant::h2, Rational(1, 10)},
};

HydacConfig config_of(const Variant& v) {
    HydacConfig cfg;
    cfg.variant = v.variant;
    cfg.epsilon = v.eps;
    return cfg;
}

const HydacSynthesis& synthesis(const Variant& v) {
    static std::map<std::string, HydacSynthesis> cache;
    auto it = cache.find(v.label);
    if (it == cache.end()) {
        it = cache.emplace(v.label, synthesize_hydac(config_of(v), Rational(49, 10))).first;
    }
    return it->second;
}

Interval iv(int lo, int hi) {
    return {Rational(lo), Rational(hi)};
}

const EnergyTimedPath& path_of(const Seta& s, const char* from, const char* to) {
    for (const auto& t : s.transitions) {
        if (t.from == from && t.to == to) {
            return t.path;
        }
    }
    throw std::logic_error(std::string("no path ") + from + " -> " + to);
}

void example_exactness(Outcome& o, const std::string& models) {
    const auto t0 = Clock::now();
    const Seta s = load_model(models + "/fig3.yaml").seta;
    const Interval e = iv(0, 6);
    const auto r11 = build_binary(path_of(s, "s1", "s1"), e);
    const auto r22 = build_binary(path_of(s, "s2", "s2"), e);
    o.require(greatest_fixpoint(r22) == Interval(Rational(5, 3), Rational(6)), "nu(s2 cycle) = [5/3; 6]");
    o.require(greatest_fixpoint(r11).is_empty(), "nu(s1 cycle) empty");
    const Interval a1 = apply(r11, iv(4, 4));
    const Interval a2 = apply(r11, a1);
    o.require(a1 == iv(0, 3), "R([4;4]) = [0;3]");
    o.require(a2 == iv(2, 2), "R^2([4;4]) = [2;2]");
    o.require(apply(r11, a2).is_empty(), "R^3([4;4]) empty");
    const Interval b1 = apply(r22, iv(0, 1));
    o.require(b1 == iv(0, 0), "R([0;1]) = [0;0]");
    o.require(apply(r22, b1).is_empty(), "R^2([0;1]) empty");
    const auto run = decide_infinite_run(s, "s0", iv(0, 0), e);
    o.require(run.exists, "tt");
    o.require(run.exists && run.entry == iv(5, 5) && s.macro_states[run.entry_state] == "s2", "entry s2 [5;5]");
    const double dt = seconds_since(t0);
    o.require(dt < 1.0, "runtime < 1 s");
    o.note("nu = " + greatest_fixpoint(r22).to_string() + ", entry " + run.entry.to_string() + ", " + fmt(dt, 3) + " s");
}

void table1_bounds(Outcome& o) {
    const auto t0 = Clock::now();
    const double want_u[] = {5.84, 7.9, 7.16, 9.1};
    const double want_a[] = {4.9, 4.9, 5.1, 5.1};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& v = kVariants[k];
        const auto& syn = synthesis(v);
        const double u = syn.upper.to_double();
        const double a = syn.stable.lo()->to_double();
        const double b = syn.stable.hi()->to_double();
        o.require(within(u, want_u[k], 0.01), std::string(v.label) + " U");
        o.require(within(a, want_a[k], 0.01), std::string(v.label) + " stable lower end " + fmt(a, 4) + " vs " +
                                                  fmt(want_a[k], 1));
        o.require(within(b, want_u[k], 0.01), std::string(v.label) + " stable upper end");
        o.note(std::string(v.label) + " U=" + fmt(u, 4) + " [" + fmt(a, 4) + ";" + fmt(b, 4) + "]");
    }
    const double dt = seconds_since(t0);
    o.require(dt <= 600.0, "runtime <= 10 min");
    o.note(fmt(dt, 1) + " s");
}

void table1_means(Outcome& o) {
    const double want[] = {5.43, 6.12, 6.15, 7.24};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& v = kVariants[k];
        const auto m = worst_case_mean(synthesis(v).strategy, 100);
        const double got = m.worst_mean.to_double();
        o.require(relative(got, want[k], 0.05), std::string(v.label) + " mean");
        o.note(std::string(v.label) + " " + fmt(got) + " vs " + fmt(want[k]));
    }
}

void table2_runs(Outcome& o) {
    const double want[] = {1081.77, 1158.90, 1200.21, 1323.42};
    for (std::size_t k = 0; k < 4; ++k) {
        const auto& v = kVariants[k];
        const auto& syn = synthesis(v);
        StrategyController ctl(syn.strategy.cycle, Interval(syn.lower, syn.upper), syn.stable);
        const auto t = simulate(syn.config, ctl.schedule(), Rational(83, 10), Rational(200));
        const double got = t.accumulated_volume.to_double();
        o.require(!t.violation.has_value(), std::string(v.label) + " no violation");
        o.require(relative(got, want[k], 0.05), std::string(v.label) + " volume " + fmt(got) + " vs " +
                                                    fmt(want[k]) + " (" +
                                                    fmt(100.0 * (got - want[k]) / want[k], 1) + "%)");
        if (v.eps.sign() > 0) {
            o.require(got < 1489.0, std::string(v.label) + " beats 1489");
        }
        o.note(std::string(v.label) + " " + fmt(got));
    }
}

void safety(Outcome& o) {
    std::mt19937_64 rng(5);
    std::size_t runs = 0;
    for (const auto& v : kVariants) {
        const auto& syn = synthesis(v);
        const Interval energy(syn.lower, syn.upper);
        const auto grid = level_grid(syn.stable, 10);
        std::map<Rational, ConcreteStrategy> plans;
        std::size_t bad = 0;
        for (std::size_t i = 0; i < 1000; ++i) {
            const Rational& w0 = grid[std::uniform_int_distribution<std::size_t>(0, grid.size() - 1)(rng)];
            auto it = plans.find(w0);
            if (it == plans.end()) {
                it = plans.emplace(w0, optimal_strategy(syn.strategy, w0)).first;
            }
            const auto& delays = it->second.delays;
            const auto lap = sampled_lap(syn.strategy.cycle, delays, w0, rng);
            const auto t = simulate(
                syn.strategy.cycle, [&](const Rational&, std::size_t) { return delays; }, w0,
                syn.config.cycle_length(), energy, {SimulationMode::adversarial, i});
            const bool ok = energy.contains(lap.lowest) && energy.contains(lap.highest) &&
                            syn.stable.contains(lap.end) && !t.violation &&
                            syn.stable.contains(t.breakpoints.back().level_nominal);
            bad += ok ? 0 : 1;
            ++runs;
        }
        o.require(bad == 0, std::string(v.label) + " " + std::to_string(bad) + " violations");
    }
    o.note(std::to_string(runs) + " sampled cycles, 0 violations tolerated");
}

void qe_soundness(Outcome& o) {
    Gen g(2024);
    const std::vector<std::string> vars{"u", "v", "w", "x", "y", "z"};
    std::size_t disagreements = 0;
    std::size_t points = 0;
    for (int i = 0; i < 200; ++i) {
        int q = 0;
        const Formula phi = random_quantified(g, vars, 3, q);
        const Formula out = qe::eliminate(phi);
        if (!out.is_quantifier_free()) {
            ++disagreements;
            continue;
        }
        const auto fv = phi.free_vars();
        for (int k = 0; k < 50; ++k) {
            const Assignment p = g.point(vars);
            Assignment pf;
            for (const auto& n : fv) {
                pf[n] = p.at(n);
            }
            disagreements += evaluate(out, pf) == oracle_holds(phi, pf) ? 0 : 1;
            ++points;
        }
    }
    o.require(disagreements == 0, std::to_string(disagreements) + " disagreements");
    o.note("200 formulas, " + std::to_string(points) + " points");
}

void algorithm_oracle(Outcome& o) {
    Gen g(515);
    const Interval e = iv(0, 6);
    int tested = 0;
    int oracle_true = 0;
    int contradictions = 0;
    while (tested < 50) {
        const Seta s = random_flat_seta(g);
        if (!validate(s).empty() || !is_flat(s).flat || s.transitions.empty()) {
            continue;
        }
        ++tested;
        const Interval i0 = Interval::point(Rational(g.integer(0, 12), 2));
        const bool oracle = grid_infinite_run(s, i0, e, Rational(1, 2));
        const auto r = decide_infinite_run(s, s.initial, i0, e);
        oracle_true += oracle ? 1 : 0;
        if (oracle && !r.exists) {
            ++contradictions;
        }
        if (r.exists) {
            const auto chain = cycle_chain(s, r.cycle);
            bool ok = !r.fixpoint.is_empty() && r.entry.meets(r.fixpoint) && e.contains(r.fixpoint);
            for (const auto& x : {*r.fixpoint.lo(), *r.fixpoint.hi()}) {
                ok = ok && chain_feasible(chain, Interval::point(x), r.fixpoint, e);
            }
            contradictions += ok ? 0 : 1;
        }
    }
    o.require(contradictions == 0, std::to_string(contradictions) + " contradictions");
    o.note("50 SETAs, oracle true on " + std::to_string(oracle_true));
}

void termination(Outcome& o, const std::string& models) {
    Gen g(99);
    const Interval e = iv(0, 6);
    int cases = 0;
    int max_laps = 0;
    const auto check = [&](const Seta& s, const EnergyTimedPath& p, const std::string& state, const Interval& i) {
        const auto rel = build_binary(p, e);
        const Interval nu = greatest_fixpoint(rel);
        if (i.meets(nu)) {
            return;
        }
        ++cases;
        Interval img = i;
        int laps = 0;
        while (!img.is_empty() && laps < 1000) {
            img = apply(rel, img);
            ++laps;
            o.require(img.is_empty() == !laps_feasible(p, i, e, e, laps), "image agrees with the unrolled LP");
        }
        o.require(img.is_empty(), "iteration empties");
        max_laps = std::max(max_laps, laps);
        InfiniteRunOptions opts;
        opts.max_unfold = 10000;
        o.require(!decide_infinite_run(s, state, i, e, opts).exists, "Algorithm 1 halts with ff");
    };
    const Seta fig3 = load_model(models + "/fig3.yaml").seta;
    const auto single = [&](const char* state) {
        Seta s;
        s.clocks = fig3.clocks;
        s.macro_states = {state};
        s.initial = state;
        s.transitions.push_back({state, state, path_of(fig3, state, state)});
        return s;
    };
    const Seta only11 = single("s1");
    check(only11, only11.transitions[0].path, "s1", iv(4, 4));
    const Seta only22 = single("s2");
    check(only22, only22.transitions[0].path, "s2", iv(0, 1));
    for (int k = 0; k < 40; ++k) {
        std::vector<std::pair<Rational, Rational>> steps;
        const int n = g.integer(1, 2);
        for (int i = 0; i < n; ++i) {
            steps.emplace_back(Rational(g.integer(-6, 6), 2), Rational(g.integer(-6, 6), 2));
        }
        const Seta s = loop_seta(steps);
        for (int w = 0; w <= 12; ++w) {
            check(s, s.transitions[0].path, "m", Interval::point(Rational(w, 2)));
        }
    }
    o.note(std::to_string(cases) + " cycle/interval pairs, at most " + std::to_string(max_laps) + " laps");
}

void compositional_qe(Outcome& o) {
    const auto t0 = Clock::now();
    std::size_t variables = 0;
    for (const auto* label : {"H1(eps)", "H2(eps)"}) {
        const auto& v = label[1] == '1' ? kVariants[2] : kVariants[3];
        const auto cycle = hydac_cycle(config_of(v));
        const auto r = build_quaternary(cycle, Rational(49, 10));
        variables = std::max(variables, cycle.transitions.size() + 4);
        o.require(!r.constraints.empty(), std::string(label) + " relation");
    }
    const double dt = seconds_since(t0);
    o.require(dt < 60.0, "under 60 s");
    o.note(std::to_string(variables) + " variables, " + fmt(dt, 1) + " s");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance runner"};
    bool strict = false;
    std::string models = ETA_MODELS_DIR;
    app.add_flag("--strict", strict, "Exit non-zero when a criterion fails");
    app.add_option("--models", models, "Directory holding fig3.yaml");
    CLI11_PARSE(app, argc, argv);

    const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
        {"example exactness", [&](Outcome& o) { example_exactness(o, models); }},
        {"table 1 bounds", table1_bounds},
        {"table 1 means", table1_means},
        {"table 2 simulations", table2_runs},
        {"strategy safety", safety},
        {"QE soundness", qe_soundness},
        {"infinite-run oracle", algorithm_oracle},
        {"termination", [&](Outcome& o) { termination(o, models); }},
        {"compositional QE", compositional_qe},
    };
    int passed = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            fn(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        passed += o.pass ? 1 : 0;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << index << ". " << name << " (" << fmt(seconds_since(t0), 1)
                  << " s): " << o.detail.str() << std::endl;
    }
    std::cout << "acceptance: " << passed << "/" << index << " passed" << std::endl;
    return strict && passed != index ? 1 : 0;
}
