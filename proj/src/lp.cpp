// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/lp.hpp"

#include <algorithm>

#include "eta/detail/simplex.hpp"
#include "eta/formula.hpp"

namespace eta::lp {

namespace {

struct Encoded {
    std::vector<std::string> vars;
    detail::SimplexProblem<Rational> problem;
    std::vector<std::size_t> strict_rows;
    bool trivially_infeasible = false;
};

std::size_t index_of(const std::vector<std::string>& vars, const std::string& name) {
    return static_cast<std::size_t>(std::lower_bound(vars.begin(), vars.end(), name) - vars.begin());
}

Encoded encode(std::span<const Atom> constraints, const LinearTerm* objective) {
    Encoded e;
    for (const auto& a : constraints) {
        for (const auto& [v, c] : a.term().entries()) {
            e.vars.push_back(v.name);
        }
    }
    if (objective != nullptr) {
        for (const auto& [v, c] : objective->entries()) {
            e.vars.push_back(v.name);
        }
    }
    std::sort(e.vars.begin(), e.vars.end());
    e.vars.erase(std::unique(e.vars.begin(), e.vars.end()), e.vars.end());
    auto& p = e.problem;
    p.n = e.vars.size();
    for (const auto& a : constraints) {
        if (a.is_ground()) {
            if (!a.ground_value()) {
                e.trivially_infeasible = true;
            }
            continue;
        }
        std::vector<Rational> row(p.n);
        for (const auto& [v, c] : a.term().entries()) {
            row[index_of(e.vars, v.name)] = c;
        }
        if (a.is_strict()) {
            e.strict_rows.push_back(p.a.size());
        }
        p.a.push_back(std::move(row));
        p.b.push_back(-a.term().constant());
        p.eq.push_back(a.rel() == Rel::eq);
    }
    p.c.assign(p.n, Rational(0));
    if (objective != nullptr) {
        for (const auto& [v, c] : objective->entries()) {
            p.c[index_of(e.vars, v.name)] = c;
        }
    }
    return e;
}

Assignment witness_of(const std::vector<std::string>& vars, const std::vector<Rational>& x) {
    Assignment w;
    for (std::size_t j = 0; j < vars.size(); ++j) {
        w.emplace(vars[j], x[j]);
    }
    return w;
}

} // namespace

LpResult feasible(std::span<const Atom> constraints) {
    Encoded e = encode(constraints, nullptr);
    LpResult out;
    if (e.trivially_infeasible) {
        return out;
    }
    auto& p = e.problem;
    if (e.strict_rows.empty()) {
        auto sol = detail::solve_simplex(p);
        if (sol.status == detail::SimplexStatus::infeasible) {
            return out;
        }
        out.status = LpStatus::optimal;
        out.value = Rational(0);
        out.witness = witness_of(e.vars, sol.x);
        return out;
    }
    // maximize a slack t shared by all strict rows, capped at 1
    const std::size_t t = p.n;
    p.n += 1;
    for (auto& row : p.a) {
        row.emplace_back(0);
    }
    for (std::size_t i : e.strict_rows) {
        p.a[i][t] = Rational(1);
    }
    std::vector<Rational> cap(p.n);
    cap[t] = Rational(1);
    p.a.push_back(std::move(cap));
    p.b.emplace_back(1);
    p.eq.push_back(false);
    p.c.assign(p.n, Rational(0));
    p.c[t] = Rational(1);
    auto sol = detail::solve_simplex(p);
    if (sol.status != detail::SimplexStatus::optimal || sol.value.sign() <= 0) {
        return out;
    }
    sol.x.pop_back();
    out.status = LpStatus::optimal;
    out.value = Rational(0);
    out.witness = witness_of(e.vars, sol.x);
    return out;
}

LpResult optimize(std::span<const Atom> constraints, const LinearTerm& objective, Direction dir) {
    const LinearTerm obj = dir == Direction::maximize ? objective : -objective;
    Encoded e = encode(constraints, &obj);
    LpResult out;
    if (e.trivially_infeasible) {
        return out;
    }
    auto sol = detail::solve_simplex(e.problem);
    switch (sol.status) {
    case detail::SimplexStatus::infeasible: return out;
    case detail::SimplexStatus::unbounded: out.status = LpStatus::unbounded; return out;
    case detail::SimplexStatus::optimal: break;
    }
    out.status = LpStatus::optimal;
    out.witness = witness_of(e.vars, sol.x);
    out.value = objective.evaluate(out.witness);
    return out;
}

bool implies(std::span<const Atom> constraints, const Atom& atom) {
    std::vector<Atom> sys(constraints.begin(), constraints.end());
    sys.push_back(atom);
    for (const auto& neg : negate_atom(atom)) {
        sys.back() = neg;
        if (feasible(sys).feasible()) {
            return false;
        }
    }
    return true;
}

} // namespace eta::lp
