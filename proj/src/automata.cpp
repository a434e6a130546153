// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/automata.hpp"

#include <algorithm>
#include <functional>
#include <regex>
#include <set>

#include "eta/errors.hpp"
#include "eta/lp.hpp"

namespace eta {

std::string to_string(const ClockConstraint& c) {
    if (c.empty()) {
        return "true";
    }
    std::string out;
    for (const auto& a : c) {
        if (!out.empty()) {
            out += " & ";
        }
        const char* op = a.rel == ClockRel::le ? " <= " : (a.rel == ClockRel::eq ? " = " : " >= ");
        out += a.clock + op + a.bound.to_string();
    }
    return out;
}

ClockConstraint parse_clock_constraint(std::string_view text) {
    static const std::regex atom_re(R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*(<=|>=|==|=)\s*([-+0-9./eE]+)\s*$)");
    ClockConstraint out;
    std::string s(text);
    if (s.find_first_not_of(" \t") == std::string::npos || s == "true") {
        return out;
    }
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t end = s.find('&', start);
        if (end == std::string::npos) {
            end = s.size();
        }
        const std::string part = s.substr(start, end - start);
        std::smatch m;
        if (!std::regex_match(part, m, atom_re)) {
            throw InputError("malformed clock constraint '" + part + "'");
        }
        ClockAtom a;
        a.clock = m[1];
        const std::string op = m[2];
        a.rel = op == "<=" ? ClockRel::le : (op == ">=" ? ClockRel::ge : ClockRel::eq);
        a.bound = Rational::parse(m[3].str());
        if (a.bound.sign() < 0) {
            throw InputError("clock bound must be non-negative in '" + part + "'");
        }
        out.push_back(std::move(a));
        start = end + 1;
    }
    return out;
}

bool EnergyTimedPath::uncertain() const {
    return std::any_of(states.begin(), states.end(), [](const EtpState& s) { return !s.eps.is_zero(); }) ||
           std::any_of(transitions.begin(), transitions.end(),
                       [](const EtpTransition& t) { return !t.delta.is_zero(); });
}

std::optional<std::size_t> Seta::index_of(std::string_view m) const {
    for (std::size_t i = 0; i < macro_states.size(); ++i) {
        if (macro_states[i] == m) {
            return i;
        }
    }
    return std::nullopt;
}

bool Seta::uncertain() const {
    return std::any_of(transitions.begin(), transitions.end(),
                       [](const MacroTransition& t) { return t.path.uncertain(); });
}

std::vector<Variable> delay_variables(const EnergyTimedPath& path, std::string_view prefix) {
    std::vector<Variable> out;
    for (std::size_t i = 0; i < path.delays(); ++i) {
        out.emplace_back(std::string(prefix) + "d" + std::to_string(i), VarSort::delay);
    }
    return out;
}

namespace {

void add_clock_atom(Conjunction& out, const LinearTerm& value, const ClockAtom& a, bool entry, bool exit) {
    const LinearTerm k(a.bound);
    if (a.rel != ClockRel::ge && exit) {
        out.push_back(Atom::le(value, k));
    }
    if (a.rel != ClockRel::le && entry) {
        out.push_back(Atom::ge(value, k));
    }
}

} // namespace

Conjunction timing_constraints(const EnergyTimedPath& path, const std::vector<Variable>& delays) {
    Conjunction out;
    std::map<std::string, LinearTerm, std::less<>> clock;
    for (const auto& c : path.clocks) {
        clock[c] = LinearTerm();
    }
    const auto value = [&](const std::string& c) -> const LinearTerm& {
        auto it = clock.find(c);
        if (it == clock.end()) {
            throw InputError("undeclared clock '" + c + "'");
        }
        return it->second;
    };
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        const auto& s = path.states[i];
        const bool last = i + 1 == path.states.size();
        for (const auto& a : s.invariant) {
            // invariants are convex in time: checking entry and exit suffices
            add_clock_atom(out, value(a.clock), a, true, last);
        }
        if (last) {
            break;
        }
        const LinearTerm d(delays[i]);
        out.push_back(Atom::ge(d, LinearTerm()));
        for (auto& [c, v] : clock) {
            v += d;
        }
        for (const auto& a : s.invariant) {
            add_clock_atom(out, value(a.clock), a, false, true);
        }
        const auto& t = path.transitions[i];
        for (const auto& a : t.guard) {
            add_clock_atom(out, value(a.clock), a, true, true);
        }
        for (const auto& r : t.resets) {
            (void)value(r);
            clock[r] = LinearTerm();
        }
    }
    return canonical(std::move(out));
}

std::vector<Diagnostic> validate(const EnergyTimedPath& path, const std::string& where) {
    std::vector<Diagnostic> out;
    const auto declared = [&](const std::string& c) {
        return std::find(path.clocks.begin(), path.clocks.end(), c) != path.clocks.end();
    };
    if (path.states.empty()) {
        out.push_back({where, "path has no states"});
        return out;
    }
    if (path.transitions.size() + 1 != path.states.size()) {
        out.push_back({where, "path has " + std::to_string(path.states.size()) + " states but " +
                                  std::to_string(path.transitions.size()) + " edges"});
        return out;
    }
    for (std::size_t i = 0; i < path.states.size(); ++i) {
        const auto& s = path.states[i];
        const std::string at = where + ", state " + s.id;
        if (s.eps.sign() < 0) {
            out.push_back({at, "negative rate imprecision"});
        }
        for (const auto& a : s.invariant) {
            if (!declared(a.clock)) {
                out.push_back({at, "invariant uses undeclared clock '" + a.clock + "'"});
            }
        }
    }
    for (std::size_t i = 0; i < path.transitions.size(); ++i) {
        const auto& t = path.transitions[i];
        const std::string at = where + ", edge " + std::to_string(i) + " (" + path.states[i].id + " -> " +
                               path.states[i + 1].id + ")";
        if (t.delta.sign() < 0) {
            out.push_back({at, "negative update imprecision"});
        }
        for (const auto& a : t.guard) {
            if (!declared(a.clock)) {
                out.push_back({at, "guard uses undeclared clock '" + a.clock + "'"});
            }
        }
        for (const auto& r : t.resets) {
            if (!declared(r)) {
                out.push_back({at, "reset of undeclared clock '" + r + "'"});
            }
        }
    }
    if (!out.empty()) {
        return out;
    }
    if (!path.transitions.empty()) {
        const auto& last = path.transitions.back().resets;
        for (const auto& c : path.clocks) {
            if (std::find(last.begin(), last.end(), c) == last.end()) {
                out.push_back({where, "final edge does not reset clock '" + c + "'"});
            }
        }
    }
    const auto d = delay_variables(path);
    const Conjunction timing = timing_constraints(path, d);
    LinearTerm total;
    for (const auto& v : d) {
        total += LinearTerm(v);
    }
    const auto r = lp::optimize(timing, total, Direction::maximize);
    if (r.status == LpStatus::infeasible) {
        out.push_back({where, "timing constraints are unsatisfiable"});
    } else if (r.status == LpStatus::unbounded) {
        out.push_back({where, "total duration is unbounded"});
    }
    return out;
}

std::vector<Diagnostic> validate(const Seta& seta) {
    std::vector<Diagnostic> out;
    std::set<std::string> seen;
    for (const auto& m : seta.macro_states) {
        if (!seen.insert(m).second) {
            out.push_back({"macro-state " + m, "declared twice"});
        }
    }
    if (!seta.index_of(seta.initial)) {
        out.push_back({"initial", "unknown macro-state '" + seta.initial + "'"});
    }
    std::set<std::pair<std::string, std::string>> edges;
    for (std::size_t i = 0; i < seta.transitions.size(); ++i) {
        const auto& t = seta.transitions[i];
        const std::string where = "transition " + t.from + " -> " + t.to;
        if (!seta.index_of(t.from)) {
            out.push_back({where, "unknown source macro-state '" + t.from + "'"});
        }
        if (!seta.index_of(t.to)) {
            out.push_back({where, "unknown target macro-state '" + t.to + "'"});
        }
        if (t.path.states.empty()) {
            out.push_back({where, "missing energy timed path"});
            continue;
        }
        if (t.path.states.front().id != t.from || t.path.states.back().id != t.to) {
            out.push_back({where, "path must start at '" + t.from + "' and end at '" + t.to + "'"});
        }
        for (const auto& c : t.path.clocks) {
            if (std::find(seta.clocks.begin(), seta.clocks.end(), c) == seta.clocks.end()) {
                out.push_back({where, "undeclared clock '" + c + "'"});
            }
        }
        auto more = validate(t.path, where);
        out.insert(out.end(), more.begin(), more.end());
        edges.insert({t.from, t.to});
    }
    for (const auto& m : seta.macro_states) {
        const bool has_out = std::any_of(seta.transitions.begin(), seta.transitions.end(),
                                         [&](const MacroTransition& t) { return t.from == m; });
        const bool has_in = m == seta.initial ||
                            std::any_of(seta.transitions.begin(), seta.transitions.end(),
                                        [&](const MacroTransition& t) { return t.to == m; });
        if (!has_out && !has_in) {
            out.push_back({"macro-state " + m, "isolated macro-state"});
        }
    }
    return out;
}

std::vector<Cycle> simple_cycles(const Seta& seta) {
    const std::size_t n = seta.macro_states.size();
    std::vector<std::vector<std::size_t>> succ(n);
    std::vector<std::size_t> src(seta.transitions.size());
    std::vector<std::size_t> dst(seta.transitions.size());
    for (std::size_t i = 0; i < seta.transitions.size(); ++i) {
        const auto a = seta.index_of(seta.transitions[i].from);
        const auto b = seta.index_of(seta.transitions[i].to);
        if (!a || !b) {
            throw InputError("transition refers to an unknown macro-state");
        }
        src[i] = *a;
        dst[i] = *b;
        succ[*a].push_back(i);
    }
    std::vector<Cycle> out;
    std::vector<bool> on_path(n, false);
    Cycle path;
    // cycles are rooted at their smallest macro-state index
    std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t root, std::size_t at) {
        for (const auto e : succ[at]) {
            const std::size_t to = dst[e];
            if (to == root) {
                path.push_back(e);
                out.push_back(path);
                path.pop_back();
            } else if (to > root && !on_path[to]) {
                on_path[to] = true;
                path.push_back(e);
                dfs(root, to);
                path.pop_back();
                on_path[to] = false;
            }
        }
    };
    for (std::size_t r = 0; r < n; ++r) {
        on_path[r] = true;
        dfs(r, r);
        on_path[r] = false;
    }
    return out;
}

Flatness is_flat(const Seta& seta) {
    Flatness f;
    const auto cycles = simple_cycles(seta);
    std::vector<int> count(seta.macro_states.size(), 0);
    for (const auto& c : cycles) {
        for (const auto e : c) {
            ++count[*seta.index_of(seta.transitions[e].from)];
        }
    }
    f.flat = std::all_of(count.begin(), count.end(), [](int k) { return k <= 1; });
    if (!f.flat) {
        return f;
    }
    // depth-1: a tree rooted at the initial macro-state, self-loops only at leaves
    const std::size_t n = seta.macro_states.size();
    std::vector<int> indeg(n, 0);
    std::vector<int> outdeg(n, 0);
    std::vector<int> loops(n, 0);
    for (const auto& t : seta.transitions) {
        const auto a = *seta.index_of(t.from);
        const auto b = *seta.index_of(t.to);
        if (a == b) {
            ++loops[a];
        } else {
            ++indeg[b];
            ++outdeg[a];
        }
    }
    const auto root = seta.index_of(seta.initial);
    bool tree = root.has_value();
    for (std::size_t i = 0; tree && i < n; ++i) {
        const int want = root && i == *root ? 0 : 1;
        tree = indeg[i] == want && (loops[i] == 0 || outdeg[i] == 0);
    }
    if (tree) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> todo{*root};
        seen[*root] = true;
        while (!todo.empty()) {
            const auto m = todo.back();
            todo.pop_back();
            for (const auto& t : seta.transitions) {
                const auto b = *seta.index_of(t.to);
                if (*seta.index_of(t.from) == m && !seen[b]) {
                    seen[b] = true;
                    todo.push_back(b);
                }
            }
        }
        tree = std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    }
    f.depth_one = tree;
    return f;
}

RestrictionReport check_restriction_R(const Seta& seta) {
    RestrictionReport r;
    bool first = true;
    for (const auto& t : seta.transitions) {
        const auto d = delay_variables(t.path);
        const Conjunction timing = timing_constraints(t.path, d);
        LinearTerm total;
        LinearTerm spread;
        for (std::size_t i = 0; i < d.size(); ++i) {
            total += LinearTerm(d[i]);
            spread += LinearTerm(d[i], Rational(2) * t.path.states[i].eps);
            spread += LinearTerm(Rational(2) * t.path.transitions[i].delta);
        }
        const auto dur = lp::optimize(timing, total, Direction::minimize);
        const auto spr = lp::optimize(timing, spread, Direction::minimize);
        if (dur.status != LpStatus::optimal || spr.status != LpStatus::optimal) {
            r.holds = false;
            r.message = "path " + t.from + " -> " + t.to + " has unsatisfiable timing";
            return r;
        }
        if (first || dur.value < r.min_duration) {
            r.min_duration = dur.value;
        }
        if (first || spr.value < r.min_spread) {
            r.min_spread = spr.value;
        }
        if (dur.value.is_zero() && r.message.empty()) {
            r.message = "path " + t.from + " -> " + t.to + " can complete in zero time";
        }
        first = false;
    }
    if (first) {
        r.message = "no macro-transitions";
        return r;
    }
    r.holds = r.min_duration.sign() > 0;
    return r;
}

EnergyTimedPath concatenate(const Seta& seta, const std::vector<std::size_t>& transitions) {
    EnergyTimedPath out;
    out.clocks = seta.clocks;
    for (const auto i : transitions) {
        const auto& p = seta.transitions.at(i).path;
        if (!out.states.empty()) {
            if (out.states.back().id != p.states.front().id) {
                throw InputError("transitions do not chain at '" + out.states.back().id + "'");
            }
            out.states.pop_back();
        }
        out.states.insert(out.states.end(), p.states.begin(), p.states.end());
        out.transitions.insert(out.transitions.end(), p.transitions.begin(), p.transitions.end());
    }
    return out;
}

} // namespace eta
