// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/relations.hpp"

#include <functional>

#include "eta/errors.hpp"
#include "eta/lp.hpp"

namespace eta {

namespace {

void within(Conjunction& out, const LinearTerm& lo, const LinearTerm& hi, const std::optional<LinearTerm>& lower,
            const std::optional<LinearTerm>& upper) {
    if (lower) {
        out.push_back(Atom::ge(lo, *lower));
    }
    if (upper) {
        out.push_back(Atom::le(hi, *upper));
    }
}

std::optional<LinearTerm> lower_of(const Interval& e) {
    return e.lo() ? std::optional<LinearTerm>(LinearTerm(*e.lo())) : std::nullopt;
}

std::optional<LinearTerm> upper_of(const Interval& e) {
    return e.hi() ? std::optional<LinearTerm>(LinearTerm(*e.hi())) : std::nullopt;
}

void require_path(const EnergyTimedPath& path) {
    const auto d = validate(path);
    if (!d.empty()) {
        throw InputError(d.front().where + ": " + d.front().message);
    }
}

// Energy constraints of a path from `start`, eliminating the delays in path order.
Conjunction encode(const EnergyTimedPath& path, const LinearTerm& start, const std::optional<LinearTerm>& lower,
                   const std::optional<LinearTerm>& upper, const std::function<void(Conjunction&, const LinearTerm&,
                                                                                   const LinearTerm&)>& final) {
    require_path(path);
    const auto d = delay_variables(path);
    Conjunction c = timing_constraints(path, d);
    const auto env = energy_envelope(path, d, start);
    for (const auto& [lo, hi] : env) {
        within(c, lo, hi, lower, upper);
    }
    final(c, env.back().first, env.back().second);
    return qe::project(canonical(std::move(c)), d);
}

Conjunction rename_all(const Conjunction& c, const Variable& from, const Variable& to) {
    Conjunction out;
    out.reserve(c.size());
    for (const auto& a : c) {
        out.push_back(a.rename(from.name, to));
    }
    return canonical(std::move(out));
}

} // namespace

std::vector<std::pair<LinearTerm, LinearTerm>> energy_envelope(const EnergyTimedPath& path,
                                                               const std::vector<Variable>& delays,
                                                               const LinearTerm& start) {
    std::vector<std::pair<LinearTerm, LinearTerm>> out;
    LinearTerm lo = start;
    LinearTerm hi = start;
    out.emplace_back(lo, hi);
    for (std::size_t i = 0; i < path.transitions.size(); ++i) {
        const auto& s = path.states[i];
        const auto& t = path.transitions[i];
        lo += LinearTerm(delays[i], s.rate - s.eps);
        hi += LinearTerm(delays[i], s.rate + s.eps);
        out.emplace_back(lo, hi);
        lo += LinearTerm(t.update - t.delta);
        hi += LinearTerm(t.update + t.delta);
        out.emplace_back(lo, hi);
    }
    return out;
}

EnergyRelation build_binary(const EnergyTimedPath& path, const Interval& energy) {
    if (path.uncertain()) {
        throw PreconditionError("binary relations need a path without imprecision");
    }
    EnergyRelation r;
    r.kind = RelationKind::binary;
    r.energy = energy;
    r.constraints = encode(path, LinearTerm(vars::w0), lower_of(energy), upper_of(energy),
                           [](Conjunction& c, const LinearTerm& lo, const LinearTerm&) {
                               c.push_back(Atom::eq(LinearTerm(vars::w1), lo));
                           });
    return r;
}

EnergyRelation build_parametric(const EnergyTimedPath& path, const Rational& lower) {
    if (path.uncertain()) {
        throw PreconditionError("binary relations need a path without imprecision");
    }
    EnergyRelation r;
    r.kind = RelationKind::parametric;
    r.energy = Interval::at_least(lower);
    r.constraints = encode(path, LinearTerm(vars::w0), LinearTerm(lower), LinearTerm(vars::U),
                           [](Conjunction& c, const LinearTerm& lo, const LinearTerm&) {
                               c.push_back(Atom::eq(LinearTerm(vars::w1), lo));
                           });
    return r;
}

EnergyRelation identity_relation(const Interval& energy) {
    EnergyRelation r;
    r.kind = RelationKind::binary;
    r.energy = energy;
    Conjunction c{Atom::eq(LinearTerm(vars::w1), LinearTerm(vars::w0))};
    within(c, LinearTerm(vars::w0), LinearTerm(vars::w0), lower_of(energy), upper_of(energy));
    r.constraints = canonical(std::move(c));
    return r;
}

EnergyRelation build_ternary(const EnergyTimedPath& path, const Interval& energy) {
    EnergyRelation r;
    r.kind = RelationKind::ternary;
    r.energy = energy;
    r.constraints = encode(path, LinearTerm(vars::w0), lower_of(energy), upper_of(energy),
                           [](Conjunction& c, const LinearTerm& lo, const LinearTerm& hi) {
                               c.push_back(Atom::ge(lo, LinearTerm(vars::a)));
                               c.push_back(Atom::le(hi, LinearTerm(vars::b)));
                           });
    return r;
}

EnergyRelation build_quaternary(const EnergyTimedPath& path, const Rational& lower) {
    EnergyRelation r;
    r.kind = RelationKind::quaternary;
    r.energy = Interval::at_least(lower);
    r.constraints = encode(path, LinearTerm(vars::w), LinearTerm(lower), LinearTerm(vars::U),
                           [](Conjunction& c, const LinearTerm& lo, const LinearTerm& hi) {
                               c.push_back(Atom::ge(lo, LinearTerm(vars::a)));
                               c.push_back(Atom::le(hi, LinearTerm(vars::b)));
                           });
    return r;
}

EnergyRelation compose(const EnergyRelation& first, const EnergyRelation& second) {
    const bool ok = first.kind == second.kind &&
                    (first.kind == RelationKind::binary || first.kind == RelationKind::parametric);
    if (!ok) {
        throw PreconditionError("compose needs two binary relations of the same kind");
    }
    if (!(first.energy == second.energy)) {
        throw PreconditionError("compose needs relations over the same energy constraint");
    }
    const Variable mid("w_mid", VarSort::auxiliary);
    Conjunction c = rename_all(first.constraints, vars::w1, mid);
    const Conjunction d = rename_all(second.constraints, vars::w0, mid);
    c.insert(c.end(), d.begin(), d.end());
    EnergyRelation r = first;
    r.constraints = qe::project(canonical(std::move(c)), {mid});
    return r;
}

EnergyRelation power(const EnergyRelation& r, int n) {
    if (n < 0) {
        throw PreconditionError("negative relation power");
    }
    if (n == 0) {
        return identity_relation(r.energy);
    }
    EnergyRelation acc = r;
    for (int i = 1; i < n; ++i) {
        acc = compose(acc, r);
    }
    return acc;
}

Interval apply(const EnergyRelation& r, const Interval& i, ImageDirection dir) {
    if (r.kind != RelationKind::binary) {
        throw PreconditionError("apply needs a binary relation");
    }
    if (i.is_empty()) {
        return Interval::empty();
    }
    const Variable& from = dir == ImageDirection::forward ? vars::w0 : vars::w1;
    const Variable& to = dir == ImageDirection::forward ? vars::w1 : vars::w0;
    Conjunction c = r.constraints;
    if (i.lo()) {
        c.push_back(Atom::ge(LinearTerm(from), LinearTerm(*i.lo())));
    }
    if (i.hi()) {
        c.push_back(Atom::le(LinearTerm(from), LinearTerm(*i.hi())));
    }
    const Conjunction img = qe::project(canonical(std::move(c)), {from});
    return interval_of(img, to.name);
}

Formula post_fixpoint_formula(const EnergyRelation& r) {
    if (r.kind != RelationKind::binary) {
        throw PreconditionError("post-fixpoints are defined for binary relations");
    }
    const LinearTerm a(vars::a);
    const LinearTerm b(vars::b);
    Conjunction succ = r.constraints;
    succ.push_back(Atom::ge(LinearTerm(vars::w1), a));
    succ.push_back(Atom::le(LinearTerm(vars::w1), b));
    const Conjunction has_succ = qe::project(canonical(std::move(succ)), {vars::w1});
    const Formula in_ab = Formula::conj({Formula(Atom::ge(LinearTerm(vars::w0), a)),
                                         Formula(Atom::le(LinearTerm(vars::w0), b))});
    Conjunction frame{Atom::le(a, b)};
    within(frame, a, b, lower_of(r.energy), upper_of(r.energy));
    return Formula::conj({Formula::of(canonical(std::move(frame))),
                          Formula::forall(vars::w0, Formula::disj({!in_ab, Formula::of(has_succ)}))});
}

Extremum extremum(const Formula& f, const LinearTerm& objective, bool maximize, const qe::Options& options) {
    Extremum best;
    const Dnf dnf = qe::to_dnf(f, options);
    for (const auto& c : dnf) {
        const auto r = lp::optimize(c, objective, maximize ? Direction::maximize : Direction::minimize);
        if (r.status == LpStatus::infeasible) {
            continue;
        }
        if (r.status == LpStatus::unbounded) {
            best.feasible = true;
            best.unbounded = true;
            best.witness = r.witness;
            return best;
        }
        const bool better = !best.feasible || (maximize ? r.value > best.value : r.value < best.value);
        if (better) {
            best.feasible = true;
            best.value = r.value;
            best.witness = r.witness;
        }
    }
    return best;
}

Interval greatest_fixpoint(const EnergyRelation& r, const qe::Options& options) {
    const Formula phi = qe::eliminate(post_fixpoint_formula(r), options);
    const Extremum lo = extremum(phi, LinearTerm(vars::a), false, options);
    if (!lo.feasible) {
        return Interval::empty();
    }
    const Extremum hi = extremum(phi, LinearTerm(vars::b), true, options);
    return {lo.unbounded ? std::nullopt : std::optional<Rational>(lo.value),
            hi.unbounded ? std::nullopt : std::optional<Rational>(hi.value)};
}

} // namespace eta
