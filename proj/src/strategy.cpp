// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "eta/errors.hpp"
#include "eta/lp.hpp"
#include "eta/optimizer.hpp"
#include "eta/relations.hpp"
#include "internal.hpp"

namespace eta {

namespace {

std::vector<std::size_t> controlled_states(const EnergyTimedPath& cycle) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < cycle.transitions.size(); ++k) {
        if (cycle.states[k].controlled) {
            out.push_back(k);
        }
    }
    return out;
}

// Time at which state k is entered.
LinearTerm entry_time(const std::vector<Variable>& d, std::size_t k) {
    LinearTerm t;
    for (std::size_t i = 0; i < k; ++i) {
        t += LinearTerm(d[i]);
    }
    return t;
}

Rational snap(double x) {
    const double scaled = std::round(x * 1e9);
    return Rational(static_cast<long>(scaled)) / Rational(1000000000);
}

struct Linearised {
    opt::QuadraticProblem problem;
    bool ok = true;
};

Linearised linearise(const Conjunction& cons, const std::vector<Variable>& d) {
    Linearised out;
    auto& p = out.problem;
    p.n = d.size();
    for (const auto& atom : cons) {
        if (atom.is_ground()) {
            if (!atom.ground_value()) {
                out.ok = false;
            }
            continue;
        }
        std::vector<double> row(d.size(), 0.0);
        for (const auto& [v, c] : atom.term().entries()) {
            auto it = std::find(d.begin(), d.end(), v);
            if (it == d.end()) {
                throw std::logic_error("unexpected variable '" + v.name + "' in a delay constraint");
            }
            row[static_cast<std::size_t>(it - d.begin())] = c.to_double();
        }
        const double rhs = -atom.term().constant().to_double();
        if (atom.rel() == Rel::eq) {
            p.e.push_back(std::move(row));
            p.f.push_back(rhs);
        } else {
            p.a.push_back(std::move(row));
            p.b.push_back(rhs);
        }
    }
    return out;
}

std::optional<std::vector<Rational>> repair(const Conjunction& cons, const std::vector<Variable>& d,
                                            const std::vector<double>& x) {
    Conjunction c = cons;
    LinearTerm total;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Variable e("e" + std::to_string(i), VarSort::auxiliary);
        const Rational target = snap(x[i]);
        c.push_back(Atom::le(LinearTerm(d[i]) - LinearTerm(target), LinearTerm(e)));
        c.push_back(Atom::le(LinearTerm(target) - LinearTerm(d[i]), LinearTerm(e)));
        total += LinearTerm(e);
    }
    const auto r = lp::optimize(c, total, Direction::minimize);
    if (r.status != LpStatus::optimal) {
        return std::nullopt;
    }
    std::vector<Rational> out;
    for (const auto& v : d) {
        auto it = r.witness.find(v.name);
        out.push_back(it == r.witness.end() ? Rational(0) : it->second);
    }
    return out;
}

Assignment delay_point(const std::vector<Variable>& d, const std::vector<Rational>& x) {
    Assignment a;
    for (std::size_t i = 0; i < d.size(); ++i) {
        a[d[i].name] = x[i];
    }
    return a;
}

} // namespace

std::vector<Variable> switch_time_variables(const EnergyTimedPath& cycle) {
    std::vector<Variable> out;
    const auto ctl = controlled_states(cycle);
    if (ctl.empty()) {
        for (std::size_t i = 0; i < cycle.transitions.size(); ++i) {
            out.emplace_back("t" + std::to_string(i + 1), VarSort::delay);
        }
        return out;
    }
    for (std::size_t j = 0; j < ctl.size(); ++j) {
        out.emplace_back("t_on_" + std::to_string(j + 1), VarSort::delay);
        out.emplace_back("t_off_" + std::to_string(j + 1), VarSort::delay);
    }
    return out;
}

PermissiveStrategy permissive_strategy(const EnergyTimedPath& cycle, const Interval& energy, const Interval& stable,
                                       bool eliminate) {
    return transfer_strategy(cycle, energy, stable, stable, eliminate);
}

PermissiveStrategy transfer_strategy(const EnergyTimedPath& cycle, const Interval& energy, const Interval& start,
                                     const Interval& stable, bool eliminate) {
    const auto diags = validate(cycle, "cycle");
    if (!diags.empty()) {
        throw InputError(diags.front().where + ": " + diags.front().message);
    }
    PermissiveStrategy ps;
    ps.cycle = cycle;
    ps.energy = energy;
    ps.stable = stable;
    ps.start = start;
    ps.delays = delay_variables(cycle);
    ps.times = switch_time_variables(cycle);
    if (energy.is_empty() || stable.is_empty() || start.is_empty() || !energy.contains(stable)) {
        ps.delay_constraint = {Atom::falsum()};
        ps.constraint = Formula::bottom();
        return ps;
    }
    const LinearTerm w0(vars::w0);
    Conjunction c = timing_constraints(cycle, ps.delays);
    detail::add_within(c, w0, start.intersect(energy));
    const auto env = energy_envelope(cycle, ps.delays, w0);
    for (const auto& [lo, hi] : env) {
        if (energy.lo()) {
            c.push_back(Atom::ge(lo, LinearTerm(*energy.lo())));
        }
        if (energy.hi()) {
            c.push_back(Atom::le(hi, LinearTerm(*energy.hi())));
        }
    }
    if (stable.lo()) {
        c.push_back(Atom::ge(env.back().first, LinearTerm(*stable.lo())));
    }
    if (stable.hi()) {
        c.push_back(Atom::le(env.back().second, LinearTerm(*stable.hi())));
    }
    ps.delay_constraint = canonical(std::move(c));
    if (!eliminate) {
        return ps;
    }
    Conjunction with_times = ps.delay_constraint;
    const auto ctl = controlled_states(cycle);
    if (ctl.empty()) {
        for (std::size_t i = 0; i < ps.times.size(); ++i) {
            with_times.push_back(Atom::eq(LinearTerm(ps.times[i]), entry_time(ps.delays, i + 1)));
        }
    } else {
        for (std::size_t j = 0; j < ctl.size(); ++j) {
            with_times.push_back(Atom::eq(LinearTerm(ps.times[2 * j]), entry_time(ps.delays, ctl[j])));
            with_times.push_back(Atom::eq(LinearTerm(ps.times[2 * j + 1]), entry_time(ps.delays, ctl[j] + 1)));
        }
    }
    ps.constraint = Formula::of(qe::project(canonical(std::move(with_times)), ps.delays));
    return ps;
}

PermissiveStrategy permissive_strategy(const Seta& seta, const Interval& energy, const Interval& stable) {
    detail::require_valid(seta);
    if (!is_flat(seta).depth_one) {
        throw PreconditionError("strategies need a depth-1 flat SETA");
    }
    const MacroTransition* loop = nullptr;
    for (const auto& t : seta.transitions) {
        if (t.from == t.to) {
            if (loop != nullptr) {
                throw PreconditionError("strategies need a SETA with a single cycle");
            }
            loop = &t;
        }
    }
    if (loop == nullptr) {
        throw PreconditionError("the SETA has no cycle");
    }
    return permissive_strategy(loop->path, energy, stable);
}

std::vector<Rational> switch_times_of(const EnergyTimedPath& cycle, const std::vector<Rational>& delays) {
    std::vector<Rational> entry{Rational(0)};
    for (const auto& d : delays) {
        entry.push_back(entry.back() + d);
    }
    std::vector<Rational> out;
    const auto ctl = controlled_states(cycle);
    if (ctl.empty()) {
        out.assign(entry.begin() + 1, entry.end());
        return out;
    }
    for (auto k : ctl) {
        out.push_back(entry[k]);
        out.push_back(entry[k + 1]);
    }
    return out;
}

Rational cycle_integral(const EnergyTimedPath& cycle, const std::vector<Rational>& delays, const Rational& w0,
                        Envelope which) {
    const int sign = which == Envelope::upper ? 1 : (which == Envelope::lower ? -1 : 0);
    Rational level = w0;
    Rational sum;
    for (std::size_t k = 0; k < cycle.transitions.size(); ++k) {
        const Rational rate = cycle.states[k].rate + Rational(sign) * cycle.states[k].eps;
        const Rational& d = delays[k];
        sum += level * d + rate * d * d / Rational(2);
        level += rate * d + cycle.transitions[k].update + Rational(sign) * cycle.transitions[k].delta;
    }
    return sum;
}

ConcreteStrategy optimal_strategy(const PermissiveStrategy& ps, const Rational& w0, const OptimizerOptions& options) {
    Conjunction cons;
    for (const auto& atom : ps.delay_constraint) {
        cons.push_back(atom.substitute(vars::w0.name, LinearTerm(w0)));
    }
    cons = canonical(std::move(cons));
    if (is_false(cons) || !lp::feasible(cons).feasible()) {
        throw PreconditionError("no safe lap from level " + w0.to_string());
    }
    const auto& d = ps.delays;
    const auto& cycle = ps.cycle;
    Linearised lin = linearise(cons, d);
    auto& p = lin.problem;
    const std::size_t n = d.size();
    p.q.assign(n, std::vector<double>(n, 0.0));
    p.c.assign(n, 0.0);
    double offset = w0.to_double();
    for (std::size_t k = 0; k < n; ++k) {
        const double rho = (cycle.states[k].rate + cycle.states[k].eps).to_double();
        p.c[k] = offset;
        for (std::size_t j = 0; j < n; ++j) {
            if (j >= k) {
                p.q[k][j] = rho;
                p.q[j][k] = rho;
            }
        }
        offset += (cycle.transitions[k].update + cycle.transitions[k].delta).to_double();
    }
    opt::GradientProjectionOptions go;
    go.starts = options.starts;
    go.max_iterations = options.max_iterations;
    go.seed = options.seed;
    const auto candidates = opt::minimize(p, go);
    std::optional<std::vector<Rational>> best;
    for (std::size_t i = 0; i < candidates.size() && i < 4 && !best; ++i) {
        auto x = repair(cons, d, candidates[i]);
        if (x && evaluate(cons, delay_point(d, *x))) {
            best = std::move(x);
        }
    }
    if (!best) {
        const auto r = lp::feasible(cons);
        std::vector<Rational> x;
        for (const auto& v : d) {
            auto it = r.witness.find(v.name);
            x.push_back(it == r.witness.end() ? Rational(0) : it->second);
        }
        best = std::move(x);
    }
    ConcreteStrategy s;
    s.w0 = w0;
    s.delays = *best;
    const auto times = switch_times_of(cycle, s.delays);
    if (!controlled_states(cycle).empty()) {
        for (std::size_t j = 0; j + 1 < times.size(); j += 2) {
            s.switch_times.push_back({times[j], times[j + 1]});
        }
    }
    if (!ps.constraint.free_vars().empty()) {
        Assignment point{{vars::w0.name, w0}};
        for (std::size_t i = 0; i < ps.times.size(); ++i) {
            point[ps.times[i].name] = times[i];
        }
        if (!evaluate(ps.constraint, point)) {
            throw std::logic_error("optimised schedule violates the permissive constraint");
        }
    }
    Rational duration;
    for (const auto& x : s.delays) {
        duration += x;
    }
    if (duration.is_zero()) {
        s.predicted_mean = w0;
        s.nominal_mean = w0;
    } else {
        s.predicted_mean = cycle_integral(cycle, s.delays, w0, Envelope::upper) / duration;
        s.nominal_mean = cycle_integral(cycle, s.delays, w0, Envelope::nominal) / duration;
    }
    return s;
}

std::vector<Rational> level_grid(const Interval& stable, long denominator) {
    if (!stable.bounded()) {
        throw PreconditionError("the level grid needs a bounded interval");
    }
    const Rational& a = *stable.lo();
    const Rational& b = *stable.hi();
    std::vector<Rational> out{a};
    const Rational den(denominator);
    const Rational scaled = a * den;
    mpz_class k = scaled.raw().get_num() / scaled.raw().get_den();
    for (;; ++k) {
        const Rational x = Rational(mpq_class(k)) / den;
        if (x <= a) {
            continue;
        }
        if (x >= b) {
            break;
        }
        out.push_back(x);
    }
    if (b != a) {
        out.push_back(b);
    }
    return out;
}

MeanSummary worst_case_mean(const PermissiveStrategy& ps, long denominator, const OptimizerOptions& options) {
    MeanSummary m;
    bool first = true;
    for (const auto& w0 : level_grid(ps.stable, denominator)) {
        const ConcreteStrategy s = optimal_strategy(ps, w0, options);
        ++m.grid_points;
        if (first || s.predicted_mean > m.worst_mean) {
            m.worst_mean = s.predicted_mean;
            m.worst_w0 = w0;
            first = false;
        }
    }
    return m;
}

} // namespace eta
