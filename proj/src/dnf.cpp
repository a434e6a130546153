// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "eta/errors.hpp"
#include "eta/lp.hpp"
#include "eta/qe.hpp"

namespace eta::qe {

namespace {

struct Cell {
    Conjunction atoms;
    Assignment witness;
};

bool satisfied_by(const Atom& a, const Assignment& w) {
    for (const auto& [v, c] : a.term().entries()) {
        if (!w.contains(v.name)) {
            return false;
        }
    }
    return a.evaluate(w);
}

bool subset(const Conjunction& small, const Conjunction& big) {
    return small.size() <= big.size() && std::includes(big.begin(), big.end(), small.begin(), small.end());
}

// Drops cells whose atom set contains another cell's atom set.
std::vector<Cell> prune_subsumed(std::vector<Cell> cells) {
    if (cells.size() > 4000) {
        return cells;
    }
    std::stable_sort(cells.begin(), cells.end(),
                     [](const Cell& a, const Cell& b) { return a.atoms.size() < b.atoms.size(); });
    std::vector<Cell> out;
    for (auto& c : cells) {
        bool dominated = false;
        for (const auto& o : out) {
            if (subset(o.atoms, c.atoms)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

std::optional<Cell> extend(const Cell& base, const Conjunction& extra) {
    Cell c;
    c.atoms = base.atoms;
    c.atoms.insert(c.atoms.end(), extra.begin(), extra.end());
    c.atoms = canonical(std::move(c.atoms));
    if (is_false(c.atoms)) {
        return std::nullopt;
    }
    const bool ok = std::all_of(extra.begin(), extra.end(),
                                [&](const Atom& a) { return satisfied_by(a, base.witness); });
    if (ok) {
        c.witness = base.witness;
        return c;
    }
    auto r = lp::feasible(c.atoms);
    if (!r.feasible()) {
        return std::nullopt;
    }
    c.witness = std::move(r.witness);
    return c;
}

std::vector<Cell> dnf_rec(const Formula& f, const Options& o);

std::vector<Cell> product(const Formula& f, const Options& o) {
    // Atoms first, then the smaller disjunctive children.
    Conjunction base;
    std::vector<std::vector<Cell>> parts;
    for (const auto& c : f.children()) {
        if (c.kind() == Formula::Kind::atom) {
            base.push_back(c.atom());
        } else {
            parts.push_back(dnf_rec(c, o));
            if (parts.back().empty()) {
                return {};
            }
        }
    }
    std::stable_sort(parts.begin(), parts.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    auto first = extend(Cell{}, base);
    if (!first) {
        return {};
    }
    std::vector<Cell> acc{std::move(*first)};
    for (const auto& part : parts) {
        std::vector<Cell> next;
        for (const auto& a : acc) {
            for (const auto& d : part) {
                auto c = extend(a, d.atoms);
                if (c) {
                    next.push_back(std::move(*c));
                    if (next.size() > o.max_disjuncts) {
                        throw ResourceLimit("disjunct cap of " + std::to_string(o.max_disjuncts) +
                                            " exceeded during DNF expansion");
                    }
                }
            }
        }
        acc = prune_subsumed(std::move(next));
        if (acc.empty()) {
            return {};
        }
    }
    return acc;
}

std::vector<Cell> dnf_rec(const Formula& f, const Options& o) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::truth: return {Cell{}};
    case K::falsity: return {};
    case K::atom: {
        auto c = extend(Cell{}, {f.atom()});
        if (!c) {
            return {};
        }
        return {std::move(*c)};
    }
    case K::disj: {
        std::vector<Cell> out;
        for (const auto& c : f.children()) {
            auto d = dnf_rec(c, o);
            for (auto& x : d) {
                out.push_back(std::move(x));
            }
            if (out.size() > o.max_disjuncts) {
                throw ResourceLimit("disjunct cap of " + std::to_string(o.max_disjuncts) +
                                    " exceeded during DNF expansion");
            }
        }
        return prune_subsumed(std::move(out));
    }
    case K::conj: return product(f, o);
    default: throw std::logic_error("to_dnf expects a quantifier-free formula in negation normal form");
    }
}

} // namespace

Dnf to_dnf(const Formula& f, const Options& o) {
    if (!f.is_quantifier_free()) {
        throw std::logic_error("to_dnf expects a quantifier-free formula");
    }
    auto cells = dnf_rec(nnf(f), o);
    Dnf out;
    out.reserve(cells.size());
    for (auto& c : cells) {
        out.push_back(std::move(c.atoms));
    }
    std::sort(out.begin(), out.end(), [](const Conjunction& a, const Conjunction& b) {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

class Search {
  public:
    bool run(std::vector<Formula> todo, Cell cell, Assignment* model) {
        {
            // consume everything that is not a disjunction
            bool progressed = true;
            while (progressed) {
                progressed = false;
                for (std::size_t i = 0; i < todo.size(); ++i) {
                    const Formula f = todo[i];
                    if (f.kind() == Formula::Kind::disj) {
                        continue;
                    }
                    todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(i));
                    progressed = true;
                    switch (f.kind()) {
                    case Formula::Kind::truth: break;
                    case Formula::Kind::falsity: return false;
                    case Formula::Kind::atom: {
                        auto c = extend(cell, {f.atom()});
                        if (!c) {
                            return false;
                        }
                        cell = std::move(*c);
                        break;
                    }
                    case Formula::Kind::conj:
                        for (const auto& ch : f.children()) {
                            todo.push_back(ch);
                        }
                        break;
                    default: throw std::logic_error("satisfiable expects a quantifier-free formula");
                    }
                    break;
                }
            }
            if (todo.empty()) {
                if (model != nullptr) {
                    *model = cell.witness;
                }
                return true;
            }
            // branch on the narrowest disjunction, witness-satisfied children first
            std::size_t pick = 0;
            std::size_t best = static_cast<std::size_t>(-1);
            for (std::size_t i = 0; i < todo.size(); ++i) {
                if (todo[i].children().size() < best) {
                    best = todo[i].children().size();
                    pick = i;
                }
            }
            const Formula d = todo[pick];
            todo.erase(todo.begin() + static_cast<std::ptrdiff_t>(pick));
            std::vector<Formula> order = d.children();
            std::stable_partition(order.begin(), order.end(), [&](const Formula& ch) {
                return holds(ch, cell.witness);
            });
            for (const auto& ch : order) {
                auto next = todo;
                next.push_back(ch);
                if (run(std::move(next), cell, model)) {
                    return true;
                }
            }
            return false;
        }
    }

  private:
    static bool holds(const Formula& f, const Assignment& w) {
        for (const auto& n : f.free_vars()) {
            if (!w.contains(n)) {
                return false;
            }
        }
        return evaluate(f, w);
    }
};

} // namespace

bool satisfiable(const Formula& f, Assignment* model) {
    if (!f.is_quantifier_free()) {
        throw std::logic_error("satisfiable expects a quantifier-free formula");
    }
    return Search().run({nnf(f)}, Cell{}, model);
}

} // namespace eta::qe
