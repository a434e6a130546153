// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "eta/errors.hpp"
#include "eta/hydac.hpp"
#include "eta/simulate.hpp"
#include "eta/strategy.hpp"
#include "support.hpp"

using namespace eta;

namespace {

const Rational kPump(11, 5);

struct Synth {
    HydacSynthesis s;
    EnergyTimedPath cycle;
};

const Synth& synth(HydacVariant v, const Rational& eps) {
    static std::map<std::pair<int, Rational>, Synth> cache;
    const auto key = std::make_pair(static_cast<int>(v), eps);
    auto it = cache.find(key);
    if (it == cache.end()) {
        HydacConfig cfg;
        cfg.variant = v;
        cfg.epsilon = eps;
        auto s = synthesize_hydac(cfg, Rational(49, 10));
        it = cache.emplace(key, Synth{s, hydac_cycle(cfg)}).first;
    }
    return it->second;
}

// Level of one lap computed from the machine rates and absolute pump intervals.
struct OracleLap {
    Rational end;
    Rational lowest;
    Rational highest;
    Rational integral;
    Rational pump_on;
};

OracleLap oracle_lap(const HydacConfig& cfg, const std::vector<SwitchTime>& pumps, const Rational& w0) {
    std::set<Rational> cuts;
    for (std::size_t k = 0; k <= cfg.machine_rates.size(); ++k) {
        cuts.insert(cfg.slot * Rational(static_cast<long>(k)));
    }
    for (const auto& p : pumps) {
        cuts.insert(p.on);
        cuts.insert(p.off);
    }
    OracleLap out{w0, w0, w0, Rational(0), Rational(0)};
    Rational prev = *cuts.begin();
    for (auto it = std::next(cuts.begin()); it != cuts.end(); ++it) {
        const Rational d = *it - prev;
        const Rational mid = prev + d / Rational(2);
        const auto slot = static_cast<std::size_t>((prev / cfg.slot).floor().to_double());
        Rational rate = cfg.machine_rates[slot];
        const bool on = std::any_of(pumps.begin(), pumps.end(), [&](const SwitchTime& p) { return p.on < mid && mid < p.off; });
        if (on) {
            rate += kPump;
            out.pump_on += d;
        }
        const Rational next = out.end + rate * d;
        out.integral += (out.end + next) / Rational(2) * d;
        out.end = next;
        out.lowest = std::min(out.lowest, next);
        out.highest = std::max(out.highest, next);
        prev = *it;
    }
    return out;
}

Rational level_at(const Trajectory& t, const Rational& time) {
    const auto& b = t.breakpoints;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        if (b[i].time <= time && time <= b[i + 1].time) {
            if (b[i + 1].time == b[i].time) {
                return b[i].level_nominal;
            }
            const Rational f = (time - b[i].time) / (b[i + 1].time - b[i].time);
            return b[i].level_nominal + f * (b[i + 1].level_nominal - b[i].level_nominal);
        }
    }
    return b.back().level_nominal;
}

Rational pump_time(const Trajectory& t, const Rational& from, const Rational& to) {
    Rational on;
    const auto& b = t.breakpoints;
    for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        if (b[i].pump_on) {
            const Rational lo = std::max(b[i].time, from);
            const Rational hi = std::min(b[i + 1].time, to);
            if (lo < hi) {
                on += hi - lo;
            }
        }
    }
    return on;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

} // namespace

TEST_CASE("pump always off from 8.3 runs dry during slot 5") {
    const HydacConfig cfg;
    const auto cycle = hydac_cycle(cfg);
    const auto idle = idle_delays(cycle);
    const auto t = simulate(
        cfg, [&](const Rational&, std::size_t) { return idle; }, Rational(83, 10), Rational(20));
    REQUIRE(t.violation);
    CHECK(t.violation->time == Rational(53, 6));
    CHECK(t.violation->bound == Rational(49, 10));

    const auto o = oracle_lap(cfg, {}, Rational(83, 10));
    CHECK(o.end == Rational(83, 10) - Rational(71, 5));
    // Level 5.9 at t = 8, falling at 1.2 l/s.
    CHECK(Rational(59, 10) - Rational(6, 5) * (t.violation->time - Rational(8)) == Rational(49, 10));
    CHECK(t.breakpoints.back().level_nominal == o.end);
}

TEST_CASE("zero consumption with the pump off keeps the level constant") {
    HydacConfig cfg;
    cfg.machine_rates.assign(10, Rational(0));
    const auto idle = idle_delays(hydac_cycle(cfg));
    const Rational w0(7);
    const auto t = simulate(
        cfg, [&](const Rational&, std::size_t) { return idle; }, w0, Rational(100));
    CHECK_FALSE(t.violation);
    CHECK(t.mean_level == w0);
    CHECK(t.accumulated_volume == w0 * Rational(100));
    CHECK(t.pump_on_time.is_zero());
    CHECK(t.laps == 5);
    for (const auto& b : t.breakpoints) {
        CHECK(b.level_min == w0);
        CHECK(b.level_nominal == w0);
        CHECK(b.level_max == w0);
    }
    const auto summary = report(t, ReportFormat::summary);
    CHECK(summary.find("mean = 7.00\n") != std::string::npos);
    CHECK(summary.find("no violation") != std::string::npos);
}

TEST_CASE("simulation rejects a duration that is not a whole number of cycles") {
    const HydacConfig cfg;
    const auto idle = idle_delays(hydac_cycle(cfg));
    const Schedule s = [&](const Rational&, std::size_t) { return idle; };
    CHECK_THROWS_AS(simulate(cfg, s, Rational(8), Rational(30)), PreconditionError);
    CHECK_NOTHROW(simulate(cfg, s, Rational(8), Rational(0)));
}

TEST_CASE("H1 lap agrees with the slot-by-slot oracle") {
    const auto& h = synth(HydacVariant::h1, Rational(0));
    const HydacConfig& cfg = h.s.config;
    for (const Rational w0 : {Rational(49, 10), Rational(53, 10), Rational(467, 80)}) {
        const auto cs = optimal_strategy(h.s.strategy, w0);
        const auto t = simulate(
            cfg, [&](const Rational&, std::size_t) { return cs.delays; }, w0, Rational(20));
        const auto o = oracle_lap(cfg, cs.switch_times, w0);
        CHECK(t.breakpoints.back().level_nominal == o.end);
        CHECK(t.accumulated_volume == o.integral);
        CHECK(t.pump_on_time == o.pump_on);
        CHECK(cs.predicted_mean == o.integral / Rational(20));
        CHECK_FALSE(t.violation);
        CHECK(o.lowest >= h.s.lower);
        CHECK(o.highest <= h.s.upper);
        CHECK(h.s.stable.contains(o.end));

        // One breakpoint per slot boundary and per pump switch.
        std::set<Rational> times;
        for (const auto& b : t.breakpoints) {
            times.insert(b.time);
        }
        CHECK(t.breakpoints.size() >= 10);
        for (long k = 0; k <= 10; ++k) {
            CHECK(times.count(Rational(2 * k)) == 1);
        }
        for (const auto& p : cs.switch_times) {
            if (p.on < p.off) {
                CHECK(times.count(p.on) == 1);
                CHECK(times.count(p.off) == 1);
            }
        }
    }
}

TEST_CASE("nominal laps balance pump inflow against consumption") {
    const auto& h = synth(HydacVariant::h1, Rational(0));
    OptimizerOptions opts;
    opts.starts = 8;
    StrategyController ctl(h.cycle, Interval(h.s.lower, h.s.upper), h.s.stable, opts);
    const auto t = simulate(h.s.config, ctl.schedule(), Rational(5), Rational(100));
    REQUIRE_FALSE(t.violation);
    for (long k = 0; k < 5; ++k) {
        const Rational a(20 * k);
        const Rational b(20 * (k + 1));
        CHECK(level_at(t, b) - level_at(t, a) == kPump * pump_time(t, a, b) - Rational(71, 5));
    }
    CHECK(t.pump_on_time == pump_time(t, Rational(0), Rational(100)));
    CHECK(t.mean_level * Rational(100) == t.accumulated_volume);
}

TEST_CASE("steady pump duty over 50 cycles is 14.2/2.2 s per cycle") {
    const auto& h = synth(HydacVariant::h1, Rational(0));
    OptimizerOptions opts;
    opts.starts = 8;
    StrategyController ctl(h.cycle, Interval(h.s.lower, h.s.upper), h.s.stable, opts);
    const auto t = simulate(h.s.config, ctl.schedule(), Rational(53, 10), Rational(1000));
    REQUIRE_FALSE(t.violation);
    CHECK(t.laps == 50);
    const double duty = (t.pump_on_time / Rational(50)).to_double();
    const double expected = 14.2 / 2.2;
    CHECK(std::abs(duty - expected) / expected < 0.01);
}

TEST_CASE("H1 200 s run from 8.3 matches the reported volume") {
    const auto& h = synth(HydacVariant::h1, Rational(0));
    StrategyController ctl(h.cycle, Interval(h.s.lower, h.s.upper), h.s.stable);
    const auto t = simulate(h.s.config, ctl.schedule(), Rational(83, 10), Rational(200));
    CHECK_FALSE(t.violation);
    CHECK(t.laps == 10);
    CHECK(t.accumulated_volume.to_double() == Catch::Approx(1081.77).epsilon(0.05));
    CHECK(t.mean_level.to_double() == Catch::Approx(5.41).epsilon(0.05));
    CHECK(t.mean_level * Rational(200) == t.accumulated_volume);

    const auto summary = lines_of(report(t, ReportFormat::summary));
    REQUIRE(summary.size() == 4);
    CHECK(summary[0] == "duration = 200.00");
    CHECK(summary[1] == "accumulated volume = " + t.accumulated_volume.to_decimal(2));
    CHECK(summary[2] == "mean = " + t.mean_level.to_decimal(2));
    CHECK(summary[3] == "no violation");

    const auto csv = lines_of(report(t, ReportFormat::csv));
    CHECK(csv.front() == "time,level_min,level_nominal,level_max,pump_on");
    CHECK(csv.size() == t.breakpoints.size() + 1);
    CHECK(csv[1] == "0.000000,8.300000,8.300000,8.300000,0");
}

TEST_CASE("envelope columns contain the sampled trajectory") {
    const auto& h = synth(HydacVariant::h1, Rational(1, 10));
    OptimizerOptions opts;
    opts.starts = 8;
    StrategyController ctl(h.cycle, Interval(h.s.lower, h.s.upper), h.s.stable, opts);
    const Rational w0(6);
    const auto env = simulate(h.s.config, ctl.schedule(), w0, Rational(20), {SimulationMode::envelope, 0});
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto adv = simulate(h.s.config, ctl.schedule(), w0, Rational(60), {SimulationMode::adversarial, seed});
        for (const auto& b : adv.breakpoints) {
            CHECK(b.level_min <= b.level_nominal);
            CHECK(b.level_nominal <= b.level_max);
        }
        // First lap: same start, same schedule, so the envelope run bounds it pointwise.
        for (std::size_t i = 0; i < env.breakpoints.size(); ++i) {
            const auto& e = env.breakpoints[i];
            const auto it = std::find_if(adv.breakpoints.begin(), adv.breakpoints.end(),
                                         [&](const Breakpoint& b) { return b.time == e.time; });
            REQUIRE(it != adv.breakpoints.end());
            CHECK(e.level_min <= it->level_nominal);
            CHECK(it->level_nominal <= e.level_max);
        }
    }
    const auto nominal = simulate(h.s.config, ctl.schedule(), w0, Rational(20));
    for (const auto& b : env.breakpoints) {
        CHECK(b.level_min <= level_at(nominal, b.time));
        CHECK(level_at(nominal, b.time) <= b.level_max);
    }
}

TEST_CASE("H1(eps) strategies stay safe under sampled rates") {
    const auto& h = synth(HydacVariant::h1, Rational(1, 10));
    const Interval energy(h.s.lower, h.s.upper);
    std::mt19937_64 rng(99);
    OptimizerOptions opts;
    opts.starts = 8;
    for (const Rational w0 : {*h.s.stable.lo(), Rational(6), *h.s.stable.hi()}) {
        const auto cs = optimal_strategy(h.s.strategy, w0, opts);
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const auto lap = eta::testing::sampled_lap(h.cycle, cs.delays, w0, rng);
            CHECK(energy.contains(lap.lowest));
            CHECK(energy.contains(lap.highest));
            CHECK(h.s.stable.contains(lap.end));
            const auto t = simulate(
                h.s.config, [&](const Rational&, std::size_t) { return cs.delays; }, w0, Rational(20),
                {SimulationMode::adversarial, seed});
            CHECK_FALSE(t.violation);
            CHECK(h.s.stable.contains(t.breakpoints.back().level_nominal));
        }
    }
}
