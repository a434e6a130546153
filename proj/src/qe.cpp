// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/qe.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "eta/detail/simplex.hpp"
#include "eta/lp.hpp"

namespace eta::qe {

namespace {

class Bits {
  public:
    Bits() = default;
    explicit Bits(std::size_t n) : w_((n + 63) / 64) {}
    void set(std::size_t i) { w_[i / 64] |= std::uint64_t(1) << (i % 64); }
    void merge(const Bits& o) {
        for (std::size_t i = 0; i < w_.size(); ++i) {
            w_[i] |= o.w_[i];
        }
    }
    [[nodiscard]] std::size_t count() const {
        std::size_t c = 0;
        for (auto w : w_) {
            c += static_cast<std::size_t>(__builtin_popcountll(w));
        }
        return c;
    }

  private:
    std::vector<std::uint64_t> w_;
};

// a.x rel b
struct Row {
    std::vector<Rational> a;
    Rational b;
    Rel rel = Rel::le;
    Bits anc;
    // Known to be irredundant; survives eliminations of variables the row does not mention.
    bool certified = false;

    [[nodiscard]] bool zero() const {
        return std::all_of(a.begin(), a.end(), [](const Rational& x) { return x.is_zero(); });
    }
};

void normalize(Row& r) {
    mpz_class l = 1;
    for (const auto& c : r.a) {
        if (!c.is_zero()) {
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.raw().get_den_mpz_t());
        }
    }
    mpz_class g = 0;
    for (const auto& c : r.a) {
        if (!c.is_zero()) {
            mpz_class n = c.raw().get_num() * (l / c.raw().get_den());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), n.get_mpz_t());
        }
    }
    if (g == 0) {
        return;
    }
    Rational k(mpq_class(l, g));
    if (r.rel == Rel::eq) {
        for (const auto& c : r.a) {
            if (!c.is_zero()) {
                if (c.sign() < 0) {
                    k = -k;
                }
                break;
            }
        }
    }
    if (k == Rational(1)) {
        return;
    }
    for (auto& c : r.a) {
        if (!c.is_zero()) {
            c *= k;
        }
    }
    r.b *= k;
}

// Floating-point screening for the redundancy checks. Nothing it reports is trusted
// without an exact confirmation.
class Screen {
  public:
    enum class Verdict { irredundant, tight, unknown };

    explicit Screen(const std::vector<Row>& rows) : rows_(rows) {
        if (rows.empty()) {
            ok_ = false;
            return;
        }
        reduce();
    }

    [[nodiscard]] bool usable() const { return ok_; }

    // Looks for a point violating row i while keeping slack in every other kept row.
    // On failure, `tight` receives the rows that are active at the float optimum.
    Verdict check(std::size_t i, const std::vector<bool>& keep, std::vector<std::size_t>& tight) const {
        const std::size_t m = free_.size();
        detail::SimplexProblem<double> p;
        p.n = m + 1;
        p.c.assign(p.n, 0.0);
        p.c[m] = 1.0;
        p.nonneg.assign(p.n, false);
        std::vector<std::size_t> idx;
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            if (j == i || !keep[j] || rows_[j].rel == Rel::eq) {
                continue;
            }
            std::vector<double> a = da_[j];
            a.push_back(1.0);
            p.a.push_back(std::move(a));
            p.b.push_back(db_[j]);
            idx.push_back(j);
        }
        std::vector<double> ai(m + 1, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            ai[k] = -da_[i][k];
        }
        ai[m] = 1.0;
        p.a.push_back(std::move(ai));
        p.b.push_back(-db_[i]);
        std::vector<double> cap(m + 1, 0.0);
        cap[m] = 1.0;
        p.a.push_back(std::move(cap));
        p.b.push_back(1.0);
        p.eq.assign(p.a.size(), false);
        const auto sol = detail::solve_simplex(p);
        if (sol.status != detail::SimplexStatus::optimal) {
            return Verdict::unknown;
        }
        const double t = sol.x[m];
        if (t > 1e-7) {
            std::vector<Rational> x(m);
            for (std::size_t k = 0; k < m; ++k) {
                x[k] = Rational::from_double(sol.x[k]);
            }
            bool ok = value(i, x).sign() > 0;
            for (std::size_t q = 0; ok && q < idx.size(); ++q) {
                const int sg = value(idx[q], x).sign();
                ok = rows_[idx[q]].rel == Rel::lt ? sg < 0 : sg <= 0;
            }
            if (ok) {
                return Verdict::irredundant;
            }
        }
        for (std::size_t q = 0; q < idx.size(); ++q) {
            const std::size_t j = idx[q];
            double lhs = t;
            for (std::size_t k = 0; k < m; ++k) {
                lhs += da_[j][k] * sol.x[k];
            }
            if (db_[j] - lhs <= 1e-6) {
                tight.push_back(j);
            }
        }
        return Verdict::tight;
    }

  private:
    // Substitutes the equality rows away so that float points can be checked exactly.
    void reduce() {
        const std::size_t n = rows_.front().a.size();
        std::vector<std::size_t> pcol;
        std::vector<std::vector<Rational>> pa;
        std::vector<Rational> pb;
        auto substitute = [&](std::vector<Rational>& a, Rational& b) {
            for (std::size_t q = 0; q < pcol.size(); ++q) {
                const Rational f = a[pcol[q]];
                if (f.is_zero()) {
                    continue;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    if (!pa[q][k].is_zero()) {
                        a[k] -= f * pa[q][k];
                    }
                }
                b -= f * pb[q];
            }
        };
        for (const auto& r : rows_) {
            if (r.rel != Rel::eq) {
                continue;
            }
            std::vector<Rational> a = r.a;
            Rational b = r.b;
            substitute(a, b);
            std::size_t c = n;
            for (std::size_t k = 0; k < n; ++k) {
                if (!a[k].is_zero()) {
                    c = k;
                    break;
                }
            }
            if (c == n) {
                if (!b.is_zero()) {
                    ok_ = false;
                    return;
                }
                continue;
            }
            const Rational inv = Rational(1) / a[c];
            for (auto& x : a) {
                x *= inv;
            }
            b *= inv;
            for (std::size_t q = 0; q < pcol.size(); ++q) {
                const Rational f = pa[q][c];
                if (f.is_zero()) {
                    continue;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    if (!a[k].is_zero()) {
                        pa[q][k] -= f * a[k];
                    }
                }
                pb[q] -= f * b;
            }
            pcol.push_back(c);
            pa.push_back(std::move(a));
            pb.push_back(std::move(b));
        }
        std::vector<bool> is_pivot(n, false);
        for (auto c : pcol) {
            is_pivot[c] = true;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (!is_pivot[k]) {
                free_.push_back(k);
            }
        }
        ra_.resize(rows_.size());
        rb_.resize(rows_.size());
        da_.resize(rows_.size());
        db_.resize(rows_.size());
        for (std::size_t j = 0; j < rows_.size(); ++j) {
            if (rows_[j].rel == Rel::eq) {
                continue;
            }
            std::vector<Rational> a = rows_[j].a;
            Rational b = rows_[j].b;
            substitute(a, b);
            double scale = 0.0;
            for (auto k : free_) {
                ra_[j].push_back(a[k]);
                scale = std::max(scale, std::fabs(a[k].to_double()));
            }
            rb_[j] = b;
            if (scale == 0.0) {
                scale = 1.0;
            }
            for (const auto& x : ra_[j]) {
                da_[j].push_back(x.to_double() / scale);
            }
            db_[j] = b.to_double() / scale;
        }
    }

    [[nodiscard]] Rational value(std::size_t j, const std::vector<Rational>& x) const {
        Rational s = -rb_[j];
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (!ra_[j][k].is_zero()) {
                s += ra_[j][k] * x[k];
            }
        }
        return s;
    }

    const std::vector<Row>& rows_;
    std::vector<std::size_t> free_;
    std::vector<std::vector<Rational>> ra_;
    std::vector<Rational> rb_;
    std::vector<std::vector<double>> da_;
    std::vector<double> db_;
    bool ok_ = true;
};

class System {
  public:
    System(const Conjunction& c, const std::vector<Variable>& extra) {
        for (const auto& a : c) {
            for (const auto& [v, k] : a.term().entries()) {
                add_var(v);
            }
        }
        for (const auto& v : extra) {
            add_var(v);
        }
        std::sort(vars_.begin(), vars_.end());
        vars_.erase(std::unique(vars_.begin(), vars_.end()), vars_.end());
        std::size_t idx = 0;
        for (const auto& a : c) {
            if (a.is_ground()) {
                if (!a.ground_value()) {
                    infeasible_ = true;
                }
                continue;
            }
            Row r;
            r.a.assign(vars_.size(), Rational(0));
            for (const auto& [v, k] : a.term().entries()) {
                r.a[col(v.name)] = k;
            }
            r.b = -a.term().constant();
            r.rel = a.rel();
            r.anc = Bits(c.size());
            r.anc.set(idx++);
            rows_.push_back(std::move(r));
        }
    }

    [[nodiscard]] bool infeasible() const { return infeasible_; }
    [[nodiscard]] std::size_t size() const { return rows_.size(); }

    std::size_t col(const std::string& name) const {
        return static_cast<std::size_t>(
            std::lower_bound(vars_.begin(), vars_.end(), Variable(name)) - vars_.begin());
    }

    bool has_var(const std::string& name) const {
        auto it = std::lower_bound(vars_.begin(), vars_.end(), Variable(name));
        return it != vars_.end() && it->name == name;
    }

    void eliminate(std::size_t v) {
        if (infeasible_) {
            return;
        }
        // equality substitution
        std::size_t best = rows_.size();
        std::size_t best_nz = 0;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i].rel != Rel::eq || rows_[i].a[v].is_zero()) {
                continue;
            }
            const auto nz = static_cast<std::size_t>(std::count_if(
                rows_[i].a.begin(), rows_[i].a.end(), [](const Rational& x) { return !x.is_zero(); }));
            if (best == rows_.size() || nz < best_nz) {
                best = i;
                best_nz = nz;
            }
        }
        if (best != rows_.size()) {
            Row e = rows_[best];
            rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(best));
            for (auto& r : rows_) {
                if (r.a[v].is_zero()) {
                    continue;
                }
                const Rational f = r.a[v] / e.a[v];
                for (std::size_t j = 0; j < r.a.size(); ++j) {
                    if (!e.a[j].is_zero()) {
                        r.a[j] -= f * e.a[j];
                    }
                }
                r.a[v] = Rational(0);
                r.b -= f * e.b;
                normalize(r);
            }
            simplify();
            return;
        }
        std::vector<Row> pos;
        std::vector<Row> neg;
        std::vector<Row> out;
        for (auto& r : rows_) {
            const int s = r.a[v].sign();
            if (s > 0) {
                pos.push_back(std::move(r));
            } else if (s < 0) {
                neg.push_back(std::move(r));
            } else {
                out.push_back(std::move(r));
            }
        }
        ++fm_steps_;
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                Bits anc = p.anc;
                anc.merge(n.anc);
                if (anc.count() > fm_steps_ + 1) {
                    continue;
                }
                const Rational kp = -n.a[v];
                const Rational kn = p.a[v];
                Row r;
                r.a.assign(p.a.size(), Rational(0));
                for (std::size_t j = 0; j < p.a.size(); ++j) {
                    if (j == v) {
                        continue;
                    }
                    if (!p.a[j].is_zero()) {
                        r.a[j] += kp * p.a[j];
                    }
                    if (!n.a[j].is_zero()) {
                        r.a[j] += kn * n.a[j];
                    }
                }
                r.b = kp * p.b + kn * n.b;
                r.rel = (p.rel == Rel::lt || n.rel == Rel::lt) ? Rel::lt : Rel::le;
                r.anc = std::move(anc);
                r.certified = false;
                normalize(r);
                out.push_back(std::move(r));
            }
        }
        rows_ = std::move(out);
        simplify();
    }

    // Drops trivial rows, merges parallel rows, detects syntactic contradictions.
    void simplify() {
        if (infeasible_) {
            return;
        }
        struct Bound {
            Rational b;
            bool strict = false;
            Bits anc;
            bool certified = false;
        };
        struct Bucket {
            std::optional<Bound> upper;  // key.x <= b
            std::optional<Bound> lower;  // key.x >= b
            std::optional<Bound> eq;
            std::size_t order = 0;
        };
        std::map<std::vector<Rational>, Bucket> buckets;
        std::size_t order = 0;
        for (auto& r : rows_) {
            if (r.zero()) {
                const int s = r.b.sign();
                const bool ok = r.rel == Rel::le ? s >= 0 : (r.rel == Rel::lt ? s > 0 : s == 0);
                if (!ok) {
                    infeasible_ = true;
                    return;
                }
                continue;
            }
            int first = 0;
            for (const auto& c : r.a) {
                if (!c.is_zero()) {
                    first = c.sign();
                    break;
                }
            }
            std::vector<Rational> key = r.a;
            Rational b = r.b;
            if (first < 0) {
                for (auto& c : key) {
                    c = -c;
                }
                b = -b;
            }
            auto [it, inserted] = buckets.try_emplace(std::move(key));
            Bucket& bk = it->second;
            if (inserted) {
                bk.order = order++;
            }
            const bool strict = r.rel == Rel::lt;
            if (r.rel == Rel::eq) {
                if (bk.eq && bk.eq->b != b) {
                    infeasible_ = true;
                    return;
                }
                bk.eq = Bound{b, false, r.anc, r.certified};
            } else if (first > 0) {
                if (!bk.upper || b < bk.upper->b || (b == bk.upper->b && strict && !bk.upper->strict)) {
                    bk.upper = Bound{b, strict, r.anc, r.certified};
                }
            } else {
                if (!bk.lower || bk.lower->b < b || (b == bk.lower->b && strict && !bk.lower->strict)) {
                    bk.lower = Bound{b, strict, r.anc, r.certified};
                }
            }
        }
        std::vector<std::pair<std::size_t, Row>> kept;
        for (auto& [key, bk] : buckets) {
            auto emit = [&](const Bound& bd, int dir, Rel rel) {
                Row r;
                r.a = key;
                r.b = bd.b;
                if (dir < 0) {
                    for (auto& c : r.a) {
                        c = -c;
                    }
                    r.b = -r.b;
                }
                r.rel = rel;
                r.anc = bd.anc;
                r.certified = bd.certified;
                kept.emplace_back(bk.order, std::move(r));
            };
            if (bk.eq) {
                const Rational& e = bk.eq->b;
                if (bk.upper && (bk.upper->b < e || (bk.upper->b == e && bk.upper->strict))) {
                    infeasible_ = true;
                    return;
                }
                if (bk.lower && (e < bk.lower->b || (bk.lower->b == e && bk.lower->strict))) {
                    infeasible_ = true;
                    return;
                }
                emit(*bk.eq, 1, Rel::eq);
                continue;
            }
            if (bk.upper && bk.lower) {
                const auto& u = *bk.upper;
                const auto& l = *bk.lower;
                if (u.b < l.b || (u.b == l.b && (u.strict || l.strict))) {
                    infeasible_ = true;
                    return;
                }
                if (u.b == l.b) {
                    Bound e = u;
                    e.anc.merge(l.anc);
                    e.certified = false;
                    emit(e, 1, Rel::eq);
                    continue;
                }
            }
            if (bk.upper) {
                emit(*bk.upper, 1, bk.upper->strict ? Rel::lt : Rel::le);
            }
            if (bk.lower) {
                emit(*bk.lower, -1, bk.lower->strict ? Rel::lt : Rel::le);
            }
        }
        std::stable_sort(kept.begin(), kept.end(),
                         [](const auto& x, const auto& y) { return x.first < y.first; });
        rows_.clear();
        for (auto& [o, r] : kept) {
            rows_.push_back(std::move(r));
        }
    }

    [[nodiscard]] Atom atom_of(const Row& r) const {
        LinearTerm t(-r.b);
        for (std::size_t j = 0; j < r.a.size(); ++j) {
            if (!r.a[j].is_zero()) {
                t += LinearTerm(vars_[j], r.a[j]);
            }
        }
        return {t, r.rel};
    }

    void remove_redundant_lp() {
        if (infeasible_) {
            return;
        }
        std::vector<Atom> atoms;
        atoms.reserve(rows_.size());
        for (const auto& r : rows_) {
            atoms.push_back(atom_of(r));
        }
        if (!lp::feasible(atoms).feasible()) {
            infeasible_ = true;
            return;
        }
        std::vector<bool> keep(rows_.size(), true);
        const Screen screen(rows_);
        for (std::size_t i = rows_.size(); i-- > 0;) {
            if (rows_[i].certified) {
                continue;
            }
            if (screen.usable() && rows_[i].rel != Rel::eq) {
                std::vector<std::size_t> tight;
                const auto v = screen.check(i, keep, tight);
                if (v == Screen::Verdict::irredundant) {
                    rows_[i].certified = true;
                    continue;
                }
                if (v == Screen::Verdict::tight) {
                    std::vector<Atom> support;
                    for (std::size_t j = 0; j < rows_.size(); ++j) {
                        if (j != i && keep[j] && rows_[j].rel == Rel::eq) {
                            support.push_back(atoms[j]);
                        }
                    }
                    for (auto j : tight) {
                        support.push_back(atoms[j]);
                    }
                    if (lp::implies(support, atoms[i])) {
                        keep[i] = false;
                        continue;
                    }
                }
            }
            std::vector<Atom> others;
            for (std::size_t j = 0; j < rows_.size(); ++j) {
                if (j != i && keep[j]) {
                    others.push_back(atoms[j]);
                }
            }
            if (lp::implies(others, atoms[i])) {
                keep[i] = false;
            } else {
                rows_[i].certified = true;
            }
        }
        std::vector<Row> out;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (keep[i]) {
                out.push_back(std::move(rows_[i]));
            }
        }
        rows_ = std::move(out);
    }

    [[nodiscard]] Conjunction conjunction() const {
        if (infeasible_) {
            return {Atom::falsum()};
        }
        Conjunction c;
        for (const auto& r : rows_) {
            c.push_back(atom_of(r));
        }
        return canonical(std::move(c));
    }

  private:
    void add_var(const Variable& v) { vars_.push_back(v); }

    std::vector<Variable> vars_;
    std::vector<Row> rows_;
    std::size_t fm_steps_ = 0;
    bool infeasible_ = false;
};

constexpr std::size_t kLpPruneRows = 12;

} // namespace

Conjunction remove_redundant(const Conjunction& c) {
    System s(c, {});
    s.simplify();
    s.remove_redundant_lp();
    return s.conjunction();
}

Conjunction project(const Conjunction& c, const std::vector<Variable>& vars) {
    System s(c, vars);
    s.simplify();
    for (const auto& v : vars) {
        if (s.infeasible()) {
            break;
        }
        s.eliminate(s.col(v.name));
        if (s.size() > kLpPruneRows) {
            s.remove_redundant_lp();
        }
    }
    s.remove_redundant_lp();
    return s.conjunction();
}

Conjunction eliminate_exists_conj(const Conjunction& c, const Variable& v) { return project(c, {v}); }

namespace {

bool subsumed_by_any(const Conjunction& c, const Dnf& others) {
    return std::any_of(others.begin(), others.end(), [&](const Conjunction& o) {
        return o.size() <= c.size() && std::includes(c.begin(), c.end(), o.begin(), o.end());
    });
}

Dnf tidy(Dnf d) {
    Dnf out;
    std::sort(d.begin(), d.end(), [](const Conjunction& a, const Conjunction& b) {
        if (a.size() != b.size()) {
            return a.size() < b.size();
        }
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    });
    for (auto& c : d) {
        if (is_false(c)) {
            continue;
        }
        if (c.empty()) {
            return {Conjunction{}};
        }
        if (!subsumed_by_any(c, out)) {
            out.push_back(std::move(c));
        }
    }
    return out;
}

Formula exists_qf(const Variable& v, const Formula& g, const Options& o) {
    Dnf out;
    for (const auto& c : to_dnf(g, o)) {
        Conjunction p = project(c, {v});
        if (!is_false(p)) {
            out.push_back(std::move(p));
        }
    }
    return Formula::of(tidy(std::move(out)));
}

} // namespace

Formula eliminate(const Formula& f, const Options& o) {
    if (f.is_quantifier_free()) {
        return f;
    }
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::conj:
    case K::disj: {
        std::vector<Formula> parts;
        for (const auto& c : f.children()) {
            parts.push_back(eliminate(c, o));
        }
        return f.kind() == K::conj ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case K::neg: return Formula::negation(eliminate(f.body(), o));
    case K::exists: return exists_qf(f.bound(), eliminate(f.body(), o), o);
    case K::forall: return nnf(Formula::negation(exists_qf(f.bound(), Formula::negation(eliminate(f.body(), o)), o)));
    default: return f;
    }
}

} // namespace eta::qe
