// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/simulate.hpp"

#include <random>
#include <sstream>

#include "eta/errors.hpp"
#include "eta/lp.hpp"
#include "eta/synthesis.hpp"

namespace eta {

namespace {

struct Sampler {
    std::mt19937_64 rng;
    std::uniform_int_distribution<long> pick{0, 1000};

    // A point of the 1/1000 grid of [x - e; x + e].
    Rational draw(const Rational& x, const Rational& e) {
        if (e.is_zero()) {
            return x;
        }
        return x - e + Rational(2) * e * Rational(pick(rng), 1000);
    }
};

class Recorder {
  public:
    Recorder(Trajectory& t, const Interval& bounds) : t_(t), bounds_(bounds) {}

    void point(const Rational& time, const Rational& lo, const Rational& nom, const Rational& hi, bool pump) {
        auto& bp = t_.breakpoints;
        if (!bp.empty() && bp.back().time == time && bp.back().level_min == lo && bp.back().level_nominal == nom &&
            bp.back().level_max == hi) {
            bp.back().pump_on = pump;
        } else {
            bp.push_back({time, lo, nom, hi, pump});
        }
        for (const Rational* x : {&lo, &nom, &hi}) {
            check_point(time, *x);
        }
    }

    void segment(const Rational& time, const Rational& d, const Rational (&from)[3], const Rational (&to)[3]) {
        for (int k = 0; k < 3; ++k) {
            check_point(time, from[k]);
            if (bounds_.lo() && to[k] < *bounds_.lo() && from[k] >= *bounds_.lo()) {
                hit(time + d * (from[k] - *bounds_.lo()) / (from[k] - to[k]), *bounds_.lo());
            }
            if (bounds_.hi() && to[k] > *bounds_.hi() && from[k] <= *bounds_.hi()) {
                hit(time + d * (*bounds_.hi() - from[k]) / (to[k] - from[k]), *bounds_.hi());
            }
        }
    }

  private:
    void check_point(const Rational& time, const Rational& x) {
        if (bounds_.lo() && x < *bounds_.lo()) {
            hit(time, *bounds_.lo());
        } else if (bounds_.hi() && x > *bounds_.hi()) {
            hit(time, *bounds_.hi());
        }
    }

    void hit(const Rational& time, const Rational& bound) {
        if (!t_.violation || time < t_.violation->time) {
            t_.violation = Violation{time, bound};
        }
    }

    Trajectory& t_;
    Interval bounds_;
};

} // namespace

Trajectory simulate(const EnergyTimedPath& cycle, const Schedule& schedule, const Rational& w0,
                    const Rational& duration, const Interval& bounds, const SimulationOptions& options) {
    const auto diags = validate(cycle, "cycle");
    if (!diags.empty()) {
        throw InputError(diags.front().where + ": " + diags.front().message);
    }
    if (duration.sign() < 0) {
        throw PreconditionError("simulation duration must be non-negative");
    }
    const auto dvars = delay_variables(cycle);
    const Conjunction timing = timing_constraints(cycle, dvars);
    Sampler sampler{std::mt19937_64(options.seed)};
    const bool spread = options.mode != SimulationMode::nominal;

    Trajectory t;
    t.duration = duration;
    Recorder rec(t, bounds);
    Rational now;
    Rational level = w0;
    rec.point(now, level, level, level, false);
    while (now < duration) {
        const auto delays = schedule(level, t.laps);
        if (delays.size() != dvars.size()) {
            throw PreconditionError("schedule returned " + std::to_string(delays.size()) + " delays for a path with " +
                                    std::to_string(dvars.size()) + " states");
        }
        Assignment a;
        Rational lap_length;
        for (std::size_t k = 0; k < delays.size(); ++k) {
            a[dvars[k].name] = delays[k];
            lap_length += delays[k];
        }
        if (!evaluate(timing, a)) {
            throw PreconditionError("schedule violates the timing constraints of the cycle");
        }
        if (lap_length.is_zero()) {
            throw PreconditionError("schedule returned a zero-duration lap");
        }
        ++t.laps;
        Rational lo = level;
        Rational hi = level;
        for (std::size_t k = 0; k < delays.size() && now < duration; ++k) {
            const auto& st = cycle.states[k];
            const auto& tr = cycle.transitions[k];
            Rational d = delays[k];
            if (now + d > duration) {
                d = duration - now;
            }
            const bool pump = st.controlled && d.sign() > 0;
            if (d.sign() > 0) {
                const Rational eps = spread ? st.eps : Rational(0);
                const Rational rate =
                    options.mode == SimulationMode::adversarial ? sampler.draw(st.rate, st.eps) : st.rate;
                rec.point(now, lo, level, hi, pump);
                const Rational from[3] = {lo, level, hi};
                const Rational to[3] = {lo + (st.rate - eps) * d, level + rate * d, hi + (st.rate + eps) * d};
                rec.segment(now, d, from, to);
                t.accumulated_volume += level * d + rate * d * d / Rational(2);
                if (pump) {
                    t.pump_on_time += d;
                }
                lo = to[0];
                level = to[1];
                hi = to[2];
                now += d;
            }
            if (d != delays[k]) {
                break;
            }
            const Rational delta = spread ? tr.delta : Rational(0);
            const Rational update =
                options.mode == SimulationMode::adversarial ? sampler.draw(tr.update, tr.delta) : tr.update;
            if (!tr.update.is_zero() || !delta.is_zero()) {
                rec.point(now, lo, level, hi, false);
                lo += tr.update - delta;
                level += update;
                hi += tr.update + delta;
            }
        }
        rec.point(now, lo, level, hi, false);
    }
    t.mean_level = duration.is_zero() ? w0 : t.accumulated_volume / duration;
    return t;
}

EnergyTimedPath hydac_cycle(const HydacConfig& cfg) {
    return build_hydac(cfg).transitions.front().path;
}

Trajectory simulate(const HydacConfig& cfg, const Schedule& schedule, const Rational& w0, const Rational& duration,
                    const SimulationOptions& options) {
    const Rational q = duration / cfg.cycle_length();
    if (duration.sign() < 0 || !q.is_integer()) {
        throw PreconditionError("duration must be a multiple of the " + cfg.cycle_length().to_string() +
                                " s cycle");
    }
    return simulate(hydac_cycle(cfg), schedule, w0, duration, Interval(cfg.v_min, cfg.v_max), options);
}

std::vector<Rational> idle_delays(const EnergyTimedPath& cycle) {
    const auto d = delay_variables(cycle);
    Conjunction c = timing_constraints(cycle, d);
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (cycle.states[k].controlled) {
            c.push_back(Atom::eq(LinearTerm(d[k]), LinearTerm(Rational(0))));
        }
    }
    const auto r = lp::feasible(canonical(std::move(c)));
    if (!r.feasible()) {
        throw PreconditionError("the cycle cannot run with every controlled state skipped");
    }
    std::vector<Rational> out;
    for (const auto& v : d) {
        auto it = r.witness.find(v.name);
        out.push_back(it == r.witness.end() ? Rational(0) : it->second);
    }
    return out;
}

std::string report(const Trajectory& traj, ReportFormat format) {
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << "time,level_min,level_nominal,level_max,pump_on\n";
        for (const auto& b : traj.breakpoints) {
            out << b.time.to_decimal(6) << ',' << b.level_min.to_decimal(6) << ',' << b.level_nominal.to_decimal(6)
                << ',' << b.level_max.to_decimal(6) << ',' << (b.pump_on ? 1 : 0) << '\n';
        }
        return out.str();
    }
    out << "duration = " << traj.duration.to_decimal(2) << '\n';
    out << "accumulated volume = " << traj.accumulated_volume.to_decimal(2) << '\n';
    out << "mean = " << traj.mean_level.to_decimal(2) << '\n';
    if (traj.violation) {
        out << "violation of " << traj.violation->bound.to_decimal(2) << " at t = " << traj.violation->time.to_decimal(4)
            << '\n';
    } else {
        out << "no violation\n";
    }
    return out.str();
}

StrategyController::StrategyController(EnergyTimedPath cycle, Interval energy, Interval stable,
                                       OptimizerOptions options)
    : cycle_(std::move(cycle)), energy_(std::move(energy)), stable_(std::move(stable)), options_(options) {
    steady_ = permissive_strategy(cycle_, energy_, stable_, false);
}

std::vector<Rational> StrategyController::operator()(const Rational& level, std::size_t) {
    auto it = cache_.find(level);
    if (it == cache_.end()) {
        it = cache_.emplace(level, plan(level)).first;
    }
    return it->second;
}

Schedule StrategyController::schedule() {
    return [this](const Rational& level, std::size_t lap) { return (*this)(level, lap); };
}

std::vector<Rational> StrategyController::plan(const Rational& level) {
    if (stable_.contains(level)) {
        return optimal_strategy(steady_, level, options_).delays;
    }
    const Interval here = Interval::point(level);
    Interval wide = energy_;
    if (energy_.hi() && level > *energy_.hi()) {
        wide = Interval(energy_.lo(), level);
    }
    try {
        return optimal_strategy(transfer_strategy(cycle_, wide, here, stable_), level, options_).delays;
    } catch (const PreconditionError&) {
    }
    if (!energy_.lo() || level < *energy_.lo()) {
        throw PreconditionError("no recovery lap from level " + level.to_string());
    }
    const Interval target(energy_.lo(), level);
    return optimal_strategy(transfer_strategy(cycle_, wide, here, target), level, options_).delays;
}

HydacSynthesis synthesize_hydac(const HydacConfig& cfg, const Rational& lower) {
    const Seta seta = build_hydac(cfg);
    const auto ub = minimal_upper_bound(seta, lower, lower);
    if (!ub.exists) {
        throw PreconditionError("no safe upper bound for " + cfg.name() + " with lower bound " + lower.to_string());
    }
    HydacSynthesis out;
    out.config = cfg;
    out.lower = lower;
    out.upper = ub.bound;
    out.stable = ub.stable;
    out.strategy = permissive_strategy(seta.transitions.front().path, Interval(lower, ub.bound), ub.stable);
    return out;
}

} // namespace eta
