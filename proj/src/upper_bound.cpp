// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <queue>

#include "eta/errors.hpp"
#include "eta/lp.hpp"
#include "eta/relations.hpp"
#include "eta/synthesis.hpp"
#include "internal.hpp"

namespace eta {

namespace {

// Highest level reachable at the end of `r` from w0 = x; nullopt when x has no
// successor, top when unbounded.
std::optional<Label> highest(const EnergyRelation& r, const Rational& x) {
    Conjunction c = r.constraints;
    c.push_back(Atom::eq(LinearTerm(vars::w0), LinearTerm(x)));
    const auto res = lp::optimize(c, LinearTerm(vars::w1), Direction::maximize);
    if (res.status == LpStatus::infeasible) {
        return std::nullopt;
    }
    if (res.status == LpStatus::unbounded) {
        return Label{true, {}};
    }
    return Label{false, res.value};
}

void join(std::optional<Label>& into, const std::optional<Label>& v) {
    if (!v) {
        return;
    }
    if (!into || v->top || (!into->top && v->level > into->level)) {
        into = v;
    }
}

std::vector<std::size_t> tree_path(const Seta& seta, std::size_t target) {
    const std::size_t n = seta.macro_states.size();
    const std::size_t root = *seta.index_of(seta.initial);
    std::vector<std::optional<std::size_t>> via(n);
    std::vector<bool> seen(n, false);
    std::queue<std::size_t> q;
    q.push(root);
    seen[root] = true;
    while (!q.empty()) {
        const std::size_t u = q.front();
        q.pop();
        for (std::size_t t = 0; t < seta.transitions.size(); ++t) {
            const auto& tr = seta.transitions[t];
            if (tr.from != seta.macro_states[u]) {
                continue;
            }
            const std::size_t v = *seta.index_of(tr.to);
            if (!seen[v]) {
                seen[v] = true;
                via[v] = t;
                q.push(v);
            }
        }
    }
    if (!seen[target]) {
        throw std::out_of_range("unreachable");
    }
    std::vector<std::size_t> out;
    for (std::size_t v = target; v != root;) {
        const std::size_t t = *via[v];
        out.push_back(t);
        v = *seta.index_of(seta.transitions[t].from);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

} // namespace

std::optional<Rational> minimal_cycle_entry(const EnergyTimedPath& cycle, const Rational& lower,
                                            const qe::Options& options) {
    const EnergyRelation r = build_parametric(cycle, lower);
    const Formula phi = detail::iteration_formula(detail::binary_step(r.constraints), vars::w0, LinearTerm(lower),
                                                  LinearTerm(vars::U), options);
    const Extremum e = extremum(phi, LinearTerm(vars::a), false, options);
    if (!e.feasible) {
        return std::nullopt;
    }
    return e.value;
}

UpperBoundReport upper_bound_analysis(const Seta& seta, const Rational& w0, const Rational& lower,
                                      const qe::Options& options) {
    detail::require_valid(seta);
    if (!is_flat(seta).flat) {
        throw PreconditionError("upper-bound existence needs a flat SETA");
    }
    if (seta.uncertain()) {
        throw PreconditionError("upper-bound existence needs a SETA without imprecision");
    }
    const std::size_t n = seta.macro_states.size();
    const std::size_t root = *seta.index_of(seta.initial);
    const auto cycles = simple_cycles(seta);
    std::vector<std::optional<std::size_t>> comp_cycle(n);
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        for (auto t : cycles[c]) {
            comp_cycle[*seta.index_of(seta.transitions[t].from)] = c;
        }
    }
    // components: one per cycle, then singletons
    std::vector<std::size_t> comp(n);
    std::size_t ncomp = cycles.size();
    for (std::size_t v = 0; v < n; ++v) {
        comp[v] = comp_cycle[v] ? *comp_cycle[v] : ncomp++;
    }
    std::vector<std::vector<std::size_t>> members(ncomp);
    for (std::size_t v = 0; v < n; ++v) {
        members[comp[v]].push_back(v);
    }
    std::vector<std::size_t> indeg(ncomp, 0);
    for (const auto& tr : seta.transitions) {
        const auto u = comp[*seta.index_of(tr.from)];
        const auto v = comp[*seta.index_of(tr.to)];
        if (u != v) {
            ++indeg[v];
        }
    }
    std::vector<std::size_t> order;
    std::queue<std::size_t> q;
    for (std::size_t c = 0; c < ncomp; ++c) {
        if (indeg[c] == 0) {
            q.push(c);
        }
    }
    while (!q.empty()) {
        const std::size_t c = q.front();
        q.pop();
        order.push_back(c);
        for (const auto& tr : seta.transitions) {
            const auto u = comp[*seta.index_of(tr.from)];
            const auto v = comp[*seta.index_of(tr.to)];
            if (u == c && v != c && --indeg[v] == 0) {
                q.push(v);
            }
        }
    }
    const Interval unbounded_above = Interval::at_least(lower);
    std::vector<std::optional<EnergyRelation>> rel(seta.transitions.size());
    const auto relation = [&](std::size_t t) -> const EnergyRelation& {
        if (!rel[t]) {
            rel[t] = build_binary(seta.transitions[t].path, unbounded_above);
        }
        return *rel[t];
    };

    UpperBoundReport report;
    report.labels.assign(n, std::nullopt);
    for (const std::size_t c : order) {
        std::vector<std::pair<std::size_t, std::optional<Label>>> entries;
        if (comp[root] == c && w0 >= lower) {
            entries.emplace_back(root, Label{false, w0});
        }
        for (std::size_t t = 0; t < seta.transitions.size(); ++t) {
            const auto& tr = seta.transitions[t];
            const std::size_t u = *seta.index_of(tr.from);
            const std::size_t v = *seta.index_of(tr.to);
            if (comp[u] == c || comp[v] != c || !report.labels[u]) {
                continue;
            }
            const Label& lu = *report.labels[u];
            entries.emplace_back(v, lu.top ? std::optional<Label>(lu) : highest(relation(t), lu.level));
        }
        std::vector<std::optional<Label>> out(n);
        bool top = false;
        for (const auto& [v, l] : entries) {
            if (!l) {
                continue;
            }
            if (l->top) {
                top = true;
                break;
            }
            if (c >= cycles.size()) {
                join(out[v], l);
                continue;
            }
            // walk the cycle from v, tracking the highest level at each member
            const auto edges = detail::rotate_cycle(seta, cycles[c], v);
            join(out[v], l);
            std::optional<EnergyRelation> acc;
            for (std::size_t j = 0; j < edges.size(); ++j) {
                acc = acc ? compose(*acc, relation(edges[j])) : relation(edges[j]);
                const auto h = highest(*acc, l->level);
                if (j + 1 == edges.size()) {
                    if (h && (h->top || h->level > l->level)) {
                        top = true;
                    }
                } else {
                    join(out[*seta.index_of(seta.transitions[edges[j]].to)], h);
                }
            }
            if (top) {
                break;
            }
        }
        for (const std::size_t v : members[c]) {
            if (top) {
                report.labels[v] = Label{true, {}};
            } else if (out[v]) {
                report.labels[v] = out[v];
            }
        }
    }

    report.cycle_entry.resize(cycles.size());
    for (std::size_t c = 0; c < cycles.size(); ++c) {
        for (const std::size_t v : members[c]) {
            const auto amin =
                minimal_cycle_entry(concatenate(seta, detail::rotate_cycle(seta, cycles[c], v)), lower, options);
            if (v == members[c].front()) {
                report.cycle_entry[c] = amin;
            }
            const auto& l = report.labels[v];
            if (amin && l && (l->top || l->level >= *amin)) {
                report.exists = true;
            }
        }
    }
    return report;
}

bool upper_bound_exists(const Seta& seta, const Rational& w0, const Rational& lower, const qe::Options& options) {
    return upper_bound_analysis(seta, w0, lower, options).exists;
}

Interval stable_interval(const EnergyTimedPath& cycle, const Interval& energy, const qe::Options& options) {
    if (!energy.lo()) {
        throw PreconditionError("stable intervals need a lower energy bound");
    }
    const EnergyRelation r = build_ternary(cycle, energy);
    const std::optional<LinearTerm> upper =
        energy.hi() ? std::optional<LinearTerm>(LinearTerm(*energy.hi())) : std::nullopt;
    const Formula phi = detail::iteration_formula(detail::ternary_step(r.constraints), vars::w0,
                                                  LinearTerm(*energy.lo()), upper, options);
    return detail::interval_hull(phi, options);
}

UpperBoundResult minimal_upper_bound(const Seta& seta, const Rational& lower, const Rational& w0,
                                     const qe::Options& options) {
    detail::require_valid(seta);
    if (!is_flat(seta).depth_one) {
        throw PreconditionError("minimal upper-bound synthesis needs a depth-1 flat SETA");
    }
    const bool uncertain = seta.uncertain();
    if (uncertain) {
        const RestrictionReport rep = check_restriction_R(seta);
        if (!rep.holds) {
            throw PreconditionError("restriction (R) violated: " + rep.message);
        }
    }
    UpperBoundResult best;
    if (w0 < lower) {
        return best;
    }
    if (!uncertain && !upper_bound_exists(seta, w0, lower, options)) {
        return best;
    }
    const LinearTerm U(vars::U);
    for (std::size_t c = 0; c < seta.transitions.size(); ++c) {
        const auto& loop = seta.transitions[c];
        if (loop.from != loop.to) {
            continue;
        }
        std::vector<std::size_t> prefix;
        try {
            prefix = tree_path(seta, *seta.index_of(loop.from));
        } catch (const std::out_of_range&) {
            continue;
        }
        // phi(a, b, U): [a;b] is stable for the cycle under [L;U]
        Formula phi;
        if (uncertain) {
            const EnergyRelation x = build_quaternary(loop.path, lower);
            Conjunction step;
            for (const auto& atom : detail::ternary_step(x.constraints)) {
                step.push_back(atom.rename(vars::w.name, vars::w0));
            }
            phi = detail::iteration_formula(step, vars::w0, LinearTerm(lower), U, options);
        } else {
            const EnergyRelation r = build_parametric(loop.path, lower);
            phi = detail::iteration_formula(detail::binary_step(r.constraints), vars::w0, LinearTerm(lower), U,
                                            options);
        }
        Conjunction reach{Atom::ge(LinearTerm(w0), LinearTerm(lower)), Atom::le(LinearTerm(w0), U)};
        if (prefix.empty()) {
            reach.push_back(Atom::le(LinearTerm(vars::a), LinearTerm(w0)));
            reach.push_back(Atom::ge(LinearTerm(vars::b), LinearTerm(w0)));
        } else {
            const EnergyTimedPath p = concatenate(seta, prefix);
            Conjunction c2;
            if (uncertain) {
                const Variable ap("a_prefix", VarSort::bound);
                const Variable bp("b_prefix", VarSort::bound);
                for (const auto& atom : build_quaternary(p, lower).constraints) {
                    c2.push_back(atom.substitute(vars::w.name, LinearTerm(w0))
                                     .rename(vars::a.name, ap)
                                     .rename(vars::b.name, bp));
                }
                c2.push_back(Atom::ge(LinearTerm(ap), LinearTerm(vars::a)));
                c2.push_back(Atom::le(LinearTerm(bp), LinearTerm(vars::b)));
                c2 = qe::project(canonical(std::move(c2)), {ap, bp});
            } else {
                for (const auto& atom : build_parametric(p, lower).constraints) {
                    c2.push_back(atom.substitute(vars::w0.name, LinearTerm(w0)));
                }
                c2.push_back(Atom::ge(LinearTerm(vars::w1), LinearTerm(vars::a)));
                c2.push_back(Atom::le(LinearTerm(vars::w1), LinearTerm(vars::b)));
                c2 = qe::project(canonical(std::move(c2)), {vars::w1});
            }
            reach.insert(reach.end(), c2.begin(), c2.end());
        }
        const Formula psi = Formula::conj({phi, Formula::of(canonical(std::move(reach)))});
        const Extremum e = extremum(psi, U, false, options);
        if (!e.feasible || e.unbounded) {
            continue;
        }
        if (!best.exists || e.value < best.bound) {
            best.exists = true;
            best.bound = e.value;
            best.prefix = prefix;
            best.cycle = c;
            best.stable = detail::interval_hull(phi.substitute(vars::U.name, LinearTerm(e.value)), options);
        }
    }
    return best;
}

} // namespace eta
