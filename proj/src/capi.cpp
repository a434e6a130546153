// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/eta.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <sstream>

#include "eta/errors.hpp"
#include "eta/model_io.hpp"
#include "eta/simulate.hpp"
#include "eta/strategy.hpp"
#include "eta/synthesis.hpp"

struct eta_model {
    eta::Model model;
};

struct eta_options {
    eta::qe::Options qe;
    std::size_t max_unfold = 1000;
    std::optional<std::size_t> max_intervals;
    eta::OptimizerOptions optimizer;
};

namespace {

using namespace eta;

thread_local std::string last_error;

template <typename F>
eta_status guard(F&& f) {
    try {
        last_error.clear();
        return f();
    } catch (const InputError& e) {
        last_error = e.what();
        return ETA_ERR_INPUT;
    } catch (const ResourceLimit& e) {
        last_error = e.what();
        return ETA_ERR_LIMIT;
    } catch (const PreconditionError& e) {
        last_error = e.what();
        return ETA_ERR_PRECONDITION;
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return ETA_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return ETA_ERR_INTERNAL;
    }
}

eta_status fail(eta_status s, std::string message) {
    last_error = std::move(message);
    return s;
}

char* copy(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

Rational number(const char* text, const char* what) {
    if (text == nullptr) {
        throw InputError(std::string(what) + " is required");
    }
    auto r = Rational::try_parse(text);
    if (!r) {
        throw InputError(std::string("malformed ") + what + " '" + text + "'");
    }
    return *r;
}

Interval interval(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
        throw InputError(std::string("malformed ") + what + " '" + text + "' (expected lo,hi)");
    }
    const auto side = [&](std::string s) -> std::optional<Rational> {
        s.erase(0, s.find_first_not_of(" \t"));
        s.erase(s.find_last_not_of(" \t") + 1);
        if (s.empty()) {
            return std::nullopt;
        }
        auto r = Rational::try_parse(s);
        if (!r) {
            throw InputError(std::string("malformed ") + what + " '" + text + "'");
        }
        return r;
    };
    Interval out(side(text.substr(0, comma)), side(text.substr(comma + 1)));
    if (out.is_empty()) {
        throw InputError(std::string(what) + " '" + text + "' is empty");
    }
    return out;
}

Interval interval_or(const char* text, const std::optional<Interval>& fallback, const char* what) {
    if (text != nullptr) {
        return interval(text, what);
    }
    if (!fallback) {
        throw InputError(std::string(what) + " is required (not given and not set in the model)");
    }
    return *fallback;
}

std::string trimmed(std::string s) {
    if (s.find('.') == std::string::npos) {
        return s;
    }
    while (s.back() == '0') {
        s.pop_back();
    }
    if (s.back() == '.') {
        s.pop_back();
    }
    return s;
}

// Exact decimal when the expansion terminates, else p/q.
std::string decimal(const Rational& r) {
    mpz_class den = r.raw().get_den();
    int twos = 0;
    int fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2) != 0) {
        den /= 2;
        ++twos;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5) != 0) {
        den /= 5;
        ++fives;
    }
    if (den != 1) {
        return r.to_string();
    }
    return trimmed(r.to_decimal(std::max(twos, fives)));
}

std::string approx(const Rational& r) {
    return trimmed(r.to_decimal(4));
}

std::string short_decimal(const Rational& r) {
    return r.to_decimal(2);
}

std::string show(const Interval& i) {
    if (i.is_empty()) {
        return "empty";
    }
    std::string out = "[";
    out += i.lo() ? decimal(*i.lo()) : "-inf";
    out += "; ";
    out += i.hi() ? decimal(*i.hi()) : "+inf";
    return out + "]";
}

const qe::Options& qe_of(const eta_options* o) {
    static const qe::Options defaults;
    return o != nullptr ? o->qe : defaults;
}

OptimizerOptions optimizer_of(const eta_options* o) {
    return o != nullptr ? o->optimizer : OptimizerOptions{};
}

const EnergyTimedPath& self_loop(const Seta& seta) {
    const MacroTransition* loop = nullptr;
    for (const auto& t : seta.transitions) {
        if (t.from == t.to) {
            if (loop != nullptr) {
                throw PreconditionError("the model needs exactly one self-loop cycle");
            }
            loop = &t;
        }
    }
    if (loop == nullptr || !is_flat(seta).depth_one) {
        throw PreconditionError("the model needs a depth-1 flat SETA with one self-loop cycle");
    }
    return loop->path;
}

Interval stable_or(const char* text, const EnergyTimedPath& cycle, const Interval& energy, const eta_options* o) {
    if (text != nullptr) {
        return interval(text, "stable interval");
    }
    const Interval s = stable_interval(cycle, energy, qe_of(o));
    if (s.is_empty()) {
        throw PreconditionError("the cycle has no stable interval within " + show(energy));
    }
    return s;
}

struct Setting {
    Interval energy;
    Interval stable;
};

// Energy constraint and stable interval: given, stored in the model, or for HYDAC
// models [v_min; U*] with its greatest stable interval.
Setting setting(const eta_model* m, const EnergyTimedPath& cycle, const char* energy, const char* stable,
                const eta_options* o) {
    const auto& cfg = m->model.hydac;
    if (energy == nullptr && !m->model.energy && cfg) {
        const auto syn = synthesize_hydac(*cfg, cfg->v_min);
        return {Interval(syn.lower, syn.upper), stable != nullptr ? interval(stable, "stable interval") : syn.stable};
    }
    const Interval e = interval_or(energy, m->model.energy, "energy constraint");
    return {e, stable_or(stable, cycle, e, o)};
}

std::string pump_intervals(const EnergyTimedPath& cycle, const std::vector<Rational>& delays) {
    std::ostringstream out;
    const auto times = switch_times_of(cycle, delays);
    bool any = false;
    for (const auto& st : cycle.states) {
        any = any || st.controlled;
    }
    if (!any) {
        for (std::size_t i = 0; i < delays.size(); ++i) {
            out << (i ? " " : "") << "d" << i << "=" << trimmed(delays[i].to_decimal(6));
        }
        return out.str();
    }
    for (std::size_t j = 0; j + 1 < times.size(); j += 2) {
        const std::string on = trimmed(times[j].to_decimal(6));
        const std::string off = trimmed(times[j + 1].to_decimal(6));
        if (on == off) {
            continue;
        }
        out << (out.tellp() > 0 ? " " : "") << "[" << on << "," << off << "]";
    }
    return out.str();
}

bool collinear(const Rational& t0, const Rational& x0, const Rational& t1, const Rational& x1, const Rational& t2,
               const Rational& x2) {
    return (x1 - x0) * (t2 - t1) == (x2 - x1) * (t1 - t0);
}

// Drops interior breakpoints that lie on the line through their neighbours.
std::vector<Breakpoint> plot_points(const std::vector<Breakpoint>& in) {
    std::vector<Breakpoint> out;
    for (const auto& b : in) {
        if (out.size() >= 2) {
            const auto& p = out[out.size() - 2];
            const auto& q = out.back();
            if (q.pump_on == p.pump_on && p.time < q.time && q.time < b.time &&
                collinear(p.time, p.level_min, q.time, q.level_min, b.time, b.level_min) &&
                collinear(p.time, p.level_nominal, q.time, q.level_nominal, b.time, b.level_nominal) &&
                collinear(p.time, p.level_max, q.time, q.level_max, b.time, b.level_max)) {
                out.back() = b;
                continue;
            }
        }
        out.push_back(b);
    }
    return out;
}

} // namespace

extern "C" {

const char* eta_version(void) {
    return "1.0.0";
}

const char* eta_last_error(void) {
    return last_error.c_str();
}

void eta_string_free(char* s) {
    std::free(s);
}

eta_options* eta_options_new(void) {
    return new (std::nothrow) eta_options();
}

void eta_options_free(eta_options* o) {
    delete o;
}

eta_status eta_options_set_max_disjuncts(eta_options* o, size_t n) {
    if (o == nullptr || n == 0) {
        return fail(ETA_ERR_INPUT, "max disjuncts must be positive");
    }
    o->qe.max_disjuncts = n;
    return ETA_OK;
}

eta_status eta_options_set_max_unfold(eta_options* o, size_t n) {
    if (o == nullptr || n == 0) {
        return fail(ETA_ERR_INPUT, "max unfold must be positive");
    }
    o->max_unfold = n;
    return ETA_OK;
}

eta_status eta_options_set_max_intervals(eta_options* o, size_t n) {
    if (o == nullptr || n == 0) {
        return fail(ETA_ERR_INPUT, "max intervals must be positive");
    }
    o->max_intervals = n;
    return ETA_OK;
}

eta_status eta_options_set_starts(eta_options* o, size_t n) {
    if (o == nullptr || n == 0) {
        return fail(ETA_ERR_INPUT, "optimizer starts must be positive");
    }
    o->optimizer.starts = n;
    return ETA_OK;
}

eta_status eta_options_set_seed(eta_options* o, uint64_t seed) {
    if (o == nullptr) {
        return fail(ETA_ERR_INPUT, "options handle is null");
    }
    o->optimizer.seed = seed;
    return ETA_OK;
}

eta_status eta_model_load(const char* path, eta_model** out) {
    if (path == nullptr || out == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        auto m = std::make_unique<eta_model>();
        m->model = load_model(path);
        *out = m.release();
        return ETA_OK;
    });
}

eta_status eta_model_parse(const char* text, eta_model** out) {
    if (text == nullptr || out == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        auto m = std::make_unique<eta_model>();
        m->model = parse_model(text);
        *out = m.release();
        return ETA_OK;
    });
}

eta_status eta_model_hydac(const char* variant, const char* epsilon, eta_model** out) {
    if (variant == nullptr || out == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        HydacConfig cfg;
        cfg.variant = parse_variant(variant);
        cfg.epsilon = epsilon != nullptr ? number(epsilon, "epsilon") : Rational(0);
        auto m = std::make_unique<eta_model>();
        m->model.seta = build_hydac(cfg);
        m->model.hydac = cfg;
        *out = m.release();
        return ETA_OK;
    });
}

void eta_model_free(eta_model* m) {
    delete m;
}

eta_status eta_model_dump(const eta_model* m, char** out) {
    if (m == nullptr || out == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        *out = copy(dump_model(m->model));
        return ETA_OK;
    });
}

eta_status eta_check(const eta_model* m, const char* initial, const char* iv, const char* energy,
                     const eta_options* o, char** report) {
    if (m == nullptr || report == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        const Seta& seta = m->model.seta;
        const std::string init = initial != nullptr ? initial : seta.initial;
        const Interval w = interval_or(iv, m->model.initial_energy, "initial energy");
        const Interval e = interval_or(energy, m->model.energy, "energy constraint");
        std::ostringstream out;
        bool yes = false;
        if (seta.uncertain()) {
            if (!w.bounded() || w.lo() != w.hi()) {
                throw InputError("models with imprecision need a point initial energy");
            }
            UncertainOptions uo;
            uo.qe = qe_of(o);
            if (o != nullptr) {
                uo.max_intervals = o->max_intervals;
            }
            const auto r = decide_infinite_run_uncertain(seta, init, *w.lo(), e, uo);
            if (!r.exists && r.truncated) {
                throw ResourceLimit("interval cap of " + std::to_string(r.intervals) + " below the required " +
                                    std::to_string(r.required_intervals));
            }
            yes = r.exists;
            out << (yes ? "tt" : "ff") << '\n';
            out << "intervals = " << r.intervals << '\n';
            for (std::size_t s = 0; s < r.witness.size(); ++s) {
                out << seta.macro_states[s] << ":";
                for (const auto& i : r.witness[s]) {
                    out << ' ' << show(i);
                }
                out << '\n';
            }
        } else {
            InfiniteRunOptions io;
            io.qe = qe_of(o);
            if (o != nullptr) {
                io.max_unfold = o->max_unfold;
            }
            const auto r = decide_infinite_run(seta, init, w, e, io);
            yes = r.exists;
            out << (yes ? "tt" : "ff") << '\n';
            if (yes) {
                out << "cycle:";
                for (auto t : r.cycle) {
                    out << ' ' << seta.transitions[t].from << "->" << seta.transitions[t].to;
                }
                out << '\n';
                out << "entry = " << seta.macro_states[r.entry_state] << ' ' << show(r.entry) << '\n';
                out << "fixpoint = " << show(r.fixpoint) << '\n';
            }
        }
        *report = copy(out.str());
        return yes ? ETA_OK : ETA_NO;
    });
}

eta_status eta_fixpoint(const eta_model* m, size_t cycle, const char* energy, const eta_options* o, char** report) {
    if (m == nullptr || report == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        const Seta& seta = m->model.seta;
        const Interval e = interval_or(energy, m->model.energy, "energy constraint");
        const auto cycles = simple_cycles(seta);
        if (cycle >= cycles.size()) {
            throw InputError("cycle index " + std::to_string(cycle) + " out of range (the model has " +
                             std::to_string(cycles.size()) + " simple cycles)");
        }
        const Interval s = stable_interval(concatenate(seta, cycles[cycle]), e, qe_of(o));
        std::ostringstream out;
        out << "nu = " << show(s) << '\n';
        *report = copy(out.str());
        return s.is_empty() ? ETA_NO : ETA_OK;
    });
}

eta_status eta_synth_ub(const eta_model* m, const char* lower, const char* w0, const eta_options* o, char** report) {
    if (m == nullptr || report == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        const Rational l = number(lower, "lower bound");
        const Rational start = w0 != nullptr ? number(w0, "w0") : l;
        const auto r = minimal_upper_bound(m->model.seta, l, start, qe_of(o));
        std::ostringstream out;
        if (!r.exists) {
            out << "no upper bound\n";
            *report = copy(out.str());
            return ETA_NO;
        }
        out << "U = " << short_decimal(r.bound) << '\n';
        out << "exact = " << r.bound.to_string() << '\n';
        out << "stable = " << show(r.stable) << '\n';
        *report = copy(out.str());
        return ETA_OK;
    });
}

eta_status eta_strategy(const eta_model* m, const char* energy, const char* stable, const char* w0,
                        const eta_options* o, char** report) {
    if (m == nullptr || report == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        const auto& cycle = self_loop(m->model.seta);
        const auto [e, s] = setting(m, cycle, energy, stable, o);
        std::ostringstream out;
        if (w0 == nullptr) {
            const auto ps = permissive_strategy(cycle, e, s, true);
            if (ps.constraint.is_false()) {
                out << "false\n";
                *report = copy(out.str());
                return ETA_NO;
            }
            out << ps.constraint.to_string() << '\n';
            *report = copy(out.str());
            return ETA_OK;
        }
        const auto ps = permissive_strategy(cycle, e, s, false);
        const Rational level = number(w0, "w0");
        if (!s.contains(level)) {
            throw PreconditionError("w0 = " + level.to_string() + " lies outside the stable interval " + show(s));
        }
        const auto cs = optimal_strategy(ps, level, optimizer_of(o));
        out << "w0 = " << decimal(level) << '\n';
        out << "pump = " << pump_intervals(cycle, cs.delays) << '\n';
        out << "delays =";
        for (const auto& d : cs.delays) {
            out << ' ' << d.to_string();
        }
        out << '\n';
        out << "mean = " << approx(cs.predicted_mean) << '\n';
        out << "nominal mean = " << approx(cs.nominal_mean) << '\n';
        *report = copy(out.str());
        return ETA_OK;
    });
}

eta_status eta_strategy_family(const eta_model* m, const char* energy, const char* stable, const char* from,
                               const char* to, const char* step, const eta_options* o, char** csv) {
    if (m == nullptr || csv == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        const auto& cycle = self_loop(m->model.seta);
        const auto [e, s] = setting(m, cycle, energy, stable, o);
        const Rational lo = from != nullptr ? number(from, "from") : *s.lo();
        const Rational hi = to != nullptr ? number(to, "to") : *s.hi();
        const Rational dx = step != nullptr ? number(step, "step") : Rational(1, 10);
        if (dx.sign() <= 0) {
            throw InputError("step must be positive");
        }
        if (!s.contains(Interval(lo, hi))) {
            throw PreconditionError("levels " + show(Interval(lo, hi)) + " leave the stable interval " + show(s));
        }
        const auto ps = permissive_strategy(cycle, e, s, false);
        std::ostringstream out;
        out << "w0,mean,pump_on\n";
        for (Rational x = lo; x <= hi; x += dx) {
            const auto cs = optimal_strategy(ps, x, optimizer_of(o));
            out << decimal(x) << ',' << approx(cs.predicted_mean) << ',' << pump_intervals(cycle, cs.delays)
                << '\n';
        }
        *csv = copy(out.str());
        return ETA_OK;
    });
}

eta_status eta_simulate(const eta_model* m, const char* energy, const char* w0, const char* duration,
                        eta_sim_mode mode, uint64_t seed, eta_format format, const eta_options* o, char** result) {
    if (m == nullptr || result == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        const auto& cycle = self_loop(m->model.seta);
        const auto& cfg = m->model.hydac;
        const auto [e, stable] = setting(m, cycle, energy, nullptr, o);
        const Rational level = w0 != nullptr ? number(w0, "w0") : Rational(83, 10);
        const Rational length = duration != nullptr ? number(duration, "duration") : Rational(200);
        SimulationOptions so;
        so.mode = mode == ETA_SIM_ENVELOPE      ? SimulationMode::envelope
                  : mode == ETA_SIM_ADVERSARIAL ? SimulationMode::adversarial
                                                : SimulationMode::nominal;
        so.seed = seed;
        StrategyController ctl(cycle, e, stable, optimizer_of(o));
        const Trajectory t = cfg ? simulate(*cfg, ctl.schedule(), level, length, so)
                                 : simulate(cycle, ctl.schedule(), level, length, e, so);
        if (format == ETA_FORMAT_SUMMARY) {
            *result = copy(report(t, ReportFormat::summary));
        } else {
            Trajectory shown = t;
            if (format == ETA_FORMAT_PLOT) {
                shown.breakpoints = plot_points(t.breakpoints);
            }
            *result = copy(report(shown, ReportFormat::csv));
        }
        return ETA_OK;
    });
}

eta_status eta_hydac_report(const eta_model* m, const char* lower, const eta_options* o, char** result) {
    if (m == nullptr || result == nullptr) {
        return fail(ETA_ERR_INPUT, "null argument");
    }
    return guard([&] {
        if (!m->model.hydac) {
            throw InputError("not a HYDAC model");
        }
        const auto& cfg = *m->model.hydac;
        const Rational l = lower != nullptr ? number(lower, "lower bound") : cfg.v_min;
        const auto syn = synthesize_hydac(cfg, l);
        const auto mean = worst_case_mean(syn.strategy, 100, optimizer_of(o));
        StrategyController ctl(hydac_cycle(cfg), Interval(syn.lower, syn.upper), syn.stable, optimizer_of(o));
        const auto t = simulate(cfg, ctl.schedule(), Rational(83, 10), Rational(200));
        std::ostringstream out;
        out << "model = " << cfg.name() << '\n';
        out << "[L;U] = [" << short_decimal(syn.lower) << "; " << short_decimal(syn.upper) << "]\n";
        out << "stable = " << show(syn.stable) << '\n';
        out << "worst-case mean = " << short_decimal(mean.worst_mean) << " (w0 = " << decimal(mean.worst_w0)
            << ")\n";
        out << "accumulated volume (200 s from 8.3) = " << short_decimal(t.accumulated_volume) << '\n';
        out << "mean volume (200 s from 8.3) = " << short_decimal(t.mean_level) << '\n';
        out << (t.violation ? "violation\n" : "no violation\n");
        *result = copy(out.str());
        return ETA_OK;
    });
}

} // extern "C"
