// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/synthesis.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "eta/errors.hpp"
#include "eta/relations.hpp"
#include "internal.hpp"

namespace eta {

namespace detail {

void require_valid(const Seta& seta) {
    const auto d = validate(seta);
    if (!d.empty()) {
        throw InputError(d.front().where + ": " + d.front().message);
    }
}

void add_within(Conjunction& c, const LinearTerm& t, const Interval& i) {
    if (i.lo()) {
        c.push_back(Atom::ge(t, LinearTerm(*i.lo())));
    }
    if (i.hi()) {
        c.push_back(Atom::le(t, LinearTerm(*i.hi())));
    }
}

Formula iteration_formula(const Conjunction& step, const Variable& w, const LinearTerm& lower,
                          const std::optional<LinearTerm>& upper, const qe::Options& options) {
    const LinearTerm a(vars::a);
    const LinearTerm b(vars::b);
    Conjunction frame{Atom::ge(a, lower), Atom::le(a, b)};
    if (upper) {
        frame.push_back(Atom::le(b, *upper));
    }
    const Formula outside = Formula::disj({Formula(Atom::lt(LinearTerm(w), a)), Formula(Atom::lt(b, LinearTerm(w)))});
    const Formula body = Formula::forall(w, Formula::disj({outside, Formula::of(step)}));
    return qe::eliminate(Formula::conj({Formula::of(canonical(std::move(frame))), body}), options);
}

Conjunction binary_step(const Conjunction& relation) {
    Conjunction c = relation;
    c.push_back(Atom::ge(LinearTerm(vars::w1), LinearTerm(vars::a)));
    c.push_back(Atom::le(LinearTerm(vars::w1), LinearTerm(vars::b)));
    return qe::project(canonical(std::move(c)), {vars::w1});
}

Conjunction ternary_step(const Conjunction& relation) {
    const Variable ap("a_next", VarSort::bound);
    const Variable bp("b_next", VarSort::bound);
    Conjunction c;
    for (const auto& x : relation) {
        c.push_back(x.rename(vars::a.name, ap).rename(vars::b.name, bp));
    }
    c.push_back(Atom::ge(LinearTerm(ap), LinearTerm(vars::a)));
    c.push_back(Atom::le(LinearTerm(bp), LinearTerm(vars::b)));
    return qe::project(canonical(std::move(c)), {ap, bp});
}

Interval interval_hull(const Formula& f, const qe::Options& options) {
    const Extremum lo = extremum(f, LinearTerm(vars::a), false, options);
    if (!lo.feasible) {
        return Interval::empty();
    }
    const Extremum hi = extremum(f, LinearTerm(vars::b), true, options);
    return {lo.unbounded ? std::nullopt : std::optional<Rational>(lo.value),
            hi.unbounded ? std::nullopt : std::optional<Rational>(hi.value)};
}

std::vector<std::size_t> rotate_cycle(const Seta& seta, const Cycle& cycle, std::size_t state) {
    const std::string& name = seta.macro_states[state];
    auto it = std::find_if(cycle.begin(), cycle.end(),
                           [&](std::size_t t) { return seta.transitions[t].from == name; });
    if (it == cycle.end()) {
        throw std::logic_error("macro-state not on cycle");
    }
    std::vector<std::size_t> out(it, cycle.end());
    out.insert(out.end(), cycle.begin(), it);
    return out;
}

} // namespace detail

namespace {

struct CycleData {
    std::vector<std::size_t> edges;
    EnergyRelation relation;
    // relation of the first j edges, j = 1..k-1
    std::vector<EnergyRelation> prefixes;
    Interval fixpoint;
};

class InfiniteRun {
  public:
    InfiniteRun(const Seta& seta, const Interval& energy, const InfiniteRunOptions& options)
        : seta_(seta), energy_(energy), options_(options) {
        cycles_ = simple_cycles(seta);
        cycle_of_.assign(seta.macro_states.size(), std::nullopt);
        on_cycle_.assign(seta.transitions.size(), false);
        for (std::size_t c = 0; c < cycles_.size(); ++c) {
            for (auto t : cycles_[c]) {
                on_cycle_[t] = true;
                cycle_of_[*seta.index_of(seta.transitions[t].from)] = c;
            }
        }
        relations_.resize(seta.transitions.size());
    }

    InfiniteRunResult run(std::size_t initial, const Interval& i0) {
        InfiniteRunResult result;
        push({initial, i0, true});
        while (!waiting_.empty()) {
            if (result.picked.size() >= options_.max_tasks) {
                throw ResourceLimit("task cap of " + std::to_string(options_.max_tasks) + " exceeded");
            }
            const Task task = waiting_.front();
            waiting_.pop_front();
            result.picked.push_back(task);
            const std::size_t m = task.macro_state;
            if (!task.follow_cycle) {
                for (std::size_t t = 0; t < seta_.transitions.size(); ++t) {
                    const auto& tr = seta_.transitions[t];
                    if (on_cycle_[t] || tr.from != seta_.macro_states[m]) {
                        continue;
                    }
                    push({*seta_.index_of(tr.to), apply(relation(t), task.interval), true});
                }
                continue;
            }
            if (!cycle_of_[m]) {
                push({m, task.interval, false});
                continue;
            }
            const CycleData& c = cycle(*cycle_of_[m], m);
            const Interval hit = task.interval.intersect(c.fixpoint);
            if (!hit.is_empty()) {
                result.exists = true;
                result.cycle = c.edges;
                result.entry_state = m;
                result.entry = task.interval;
                result.fixpoint = c.fixpoint;
                return result;
            }
            push({m, task.interval, false});
            Interval lap = task.interval;
            for (std::size_t i = 0; !lap.is_empty(); ++i) {
                if (i > options_.max_unfold) {
                    throw ResourceLimit("unfold cap of " + std::to_string(options_.max_unfold) + " exceeded");
                }
                if (i > 0) {
                    push({m, lap, false});
                }
                for (std::size_t j = 0; j < c.prefixes.size(); ++j) {
                    const std::size_t next = *seta_.index_of(seta_.transitions[c.edges[j]].to);
                    push({next, apply(c.prefixes[j], lap), false});
                }
                lap = apply(c.relation, lap);
            }
        }
        return result;
    }

  private:
    void push(const Task& t) {
        if (t.interval.is_empty()) {
            return;
        }
        if (std::find(seen_.begin(), seen_.end(), t) != seen_.end()) {
            return;
        }
        seen_.push_back(t);
        waiting_.push_back(t);
    }

    const EnergyRelation& relation(std::size_t t) {
        if (!relations_[t]) {
            relations_[t] = build_binary(seta_.transitions[t].path, energy_);
        }
        return *relations_[t];
    }

    const CycleData& cycle(std::size_t c, std::size_t m) {
        const auto key = std::make_pair(c, m);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            return it->second;
        }
        CycleData d;
        d.edges = detail::rotate_cycle(seta_, cycles_[c], m);
        d.relation = relation(d.edges.front());
        for (std::size_t j = 1; j < d.edges.size(); ++j) {
            d.prefixes.push_back(d.relation);
            d.relation = compose(d.relation, relation(d.edges[j]));
        }
        d.fixpoint = greatest_fixpoint(d.relation, options_.qe);
        return cache_.emplace(key, std::move(d)).first->second;
    }

    const Seta& seta_;
    Interval energy_;
    InfiniteRunOptions options_;
    std::vector<Cycle> cycles_;
    std::vector<std::optional<std::size_t>> cycle_of_;
    std::vector<bool> on_cycle_;
    std::vector<std::optional<EnergyRelation>> relations_;
    std::map<std::pair<std::size_t, std::size_t>, CycleData> cache_;
    std::deque<Task> waiting_;
    std::vector<Task> seen_;
};

std::size_t state_index(const Seta& seta, const std::string& name) {
    const auto i = seta.index_of(name);
    if (!i) {
        throw InputError("unknown macro-state '" + name + "'");
    }
    return *i;
}

} // namespace

InfiniteRunResult decide_infinite_run(const Seta& seta, const std::string& initial, const Interval& initial_energy,
                                      const Interval& energy, const InfiniteRunOptions& options) {
    detail::require_valid(seta);
    if (!is_flat(seta).flat) {
        throw PreconditionError("the infinite-run procedure needs a flat SETA");
    }
    if (seta.uncertain()) {
        throw PreconditionError("the infinite-run procedure needs a SETA without imprecision");
    }
    const std::size_t m0 = state_index(seta, initial);
    if (initial_energy.is_empty() || !energy.contains(initial_energy)) {
        throw PreconditionError("the initial interval must be non-empty and within the energy constraint");
    }
    return InfiniteRun(seta, energy, options).run(m0, initial_energy);
}

UncertainResult decide_infinite_run_uncertain(const Seta& seta, const std::string& initial, const Rational& w0,
                                              const Interval& energy, const UncertainOptions& options) {
    detail::require_valid(seta);
    const std::size_t s0 = state_index(seta, initial);
    const RestrictionReport rep = check_restriction_R(seta);
    if (!rep.holds) {
        throw PreconditionError("restriction (R) violated: " + rep.message);
    }
    if (!energy.bounded()) {
        throw PreconditionError("the energy constraint must be bounded");
    }
    UncertainResult result;
    result.min_duration = rep.min_duration;
    result.min_spread = rep.min_spread;
    const Rational ratio = energy.width() / rep.min_spread;
    mpz_class n = ratio.raw().get_num() / ratio.raw().get_den();
    if (Rational(mpq_class(n)) < ratio) {
        n += 1;
    }
    std::size_t count = std::max<std::size_t>(1, n.get_ui());
    result.required_intervals = count;
    if (options.max_intervals && *options.max_intervals < count) {
        count = std::max<std::size_t>(1, *options.max_intervals);
        result.truncated = true;
    }
    result.intervals = count;
    if (!energy.contains(w0)) {
        return result;
    }
    const std::size_t ns = seta.macro_states.size();
    const auto av = [](std::size_t s, std::size_t j) {
        return Variable("a" + std::to_string(s) + "_" + std::to_string(j), VarSort::bound);
    };
    const auto bv = [](std::size_t s, std::size_t j) {
        return Variable("b" + std::to_string(s) + "_" + std::to_string(j), VarSort::bound);
    };
    // step(w, a_{s',k}, b_{s',k}) per transition and target interval
    std::vector<Conjunction> steps;
    for (const auto& t : seta.transitions) {
        steps.push_back(detail::ternary_step(build_ternary(t.path, energy).constraints));
    }
    const Variable w("w", VarSort::energy);
    std::vector<Formula> parts;
    for (std::size_t s = 0; s < ns; ++s) {
        for (std::size_t j = 0; j < count; ++j) {
            const LinearTerm a(av(s, j));
            const LinearTerm b(bv(s, j));
            Conjunction frame;
            frame.push_back(Atom::ge(a, LinearTerm(*energy.lo())));
            frame.push_back(Atom::le(b, LinearTerm(*energy.hi())));
            std::vector<Formula> options_here{Formula(Atom::lt(LinearTerm(w), a)), Formula(Atom::lt(b, LinearTerm(w)))};
            for (std::size_t t = 0; t < seta.transitions.size(); ++t) {
                if (seta.transitions[t].from != seta.macro_states[s]) {
                    continue;
                }
                const std::size_t s2 = *seta.index_of(seta.transitions[t].to);
                for (std::size_t k = 0; k < count; ++k) {
                    Conjunction c;
                    for (const auto& x : steps[t]) {
                        c.push_back(x.rename(vars::w0.name, w)
                                        .rename(vars::a.name, av(s2, k))
                                        .rename(vars::b.name, bv(s2, k)));
                    }
                    options_here.push_back(Formula::of(canonical(std::move(c))));
                }
            }
            const Formula body = Formula::forall(w, Formula::disj(std::move(options_here)));
            parts.push_back(Formula::of(canonical(std::move(frame))));
            parts.push_back(qe::eliminate(body, options.qe));
        }
    }
    std::vector<Formula> start;
    for (std::size_t j = 0; j < count; ++j) {
        start.push_back(Formula::of(Conjunction{Atom::le(LinearTerm(av(s0, j)), LinearTerm(w0)),
                                                Atom::ge(LinearTerm(bv(s0, j)), LinearTerm(w0))}));
    }
    parts.push_back(Formula::disj(std::move(start)));
    Assignment model;
    result.exists = qe::satisfiable(Formula::conj(std::move(parts)), &model);
    if (result.exists) {
        result.witness.resize(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            for (std::size_t j = 0; j < count; ++j) {
                auto ia = model.find(av(s, j).name);
                auto ib = model.find(bv(s, j).name);
                if (ia != model.end() && ib != model.end() && ia->second <= ib->second) {
                    result.witness[s].emplace_back(ia->second, ib->second);
                }
            }
        }
    }
    return result;
}

} // namespace eta
