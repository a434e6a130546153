// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "eta/rational.hpp"

namespace eta::detail {

template <class T>
struct NumTraits;

template <>
struct NumTraits<Rational> {
    static bool is_zero(const Rational& x) { return x.is_zero(); }
    static bool is_pos(const Rational& x) { return x.sign() > 0; }
    static bool is_neg(const Rational& x) { return x.sign() < 0; }
    static void clean(Rational&) {}
    static constexpr std::size_t max_pivots = 0;
};

template <>
struct NumTraits<double> {
    static constexpr double eps = 1e-9;
    static bool is_zero(double x) { return std::fabs(x) <= eps; }
    static bool is_pos(double x) { return x > eps; }
    static bool is_neg(double x) { return x < -eps; }
    static void clean(double& x) {
        if (std::fabs(x) <= 1e-12) {
            x = 0.0;
        }
    }
    static constexpr std::size_t max_pivots = 100000;
};

enum class SimplexStatus { optimal, infeasible, unbounded };

// maximize c.x subject to a_i.x <= b_i (or = b_i when eq[i]); variables are free
// unless nonneg[j].
template <class T>
struct SimplexProblem {
    std::size_t n = 0;
    std::vector<std::vector<T>> a;
    std::vector<T> b;
    std::vector<bool> eq;
    std::vector<T> c;
    std::vector<bool> nonneg;
};

template <class T>
struct SimplexSolution {
    SimplexStatus status = SimplexStatus::infeasible;
    T value{};
    std::vector<T> x;
};

// Dense two-phase tableau simplex.
template <class T>
class Tableau {
    using Tr = NumTraits<T>;

  public:
    explicit Tableau(const SimplexProblem<T>& p) : p_(p) {}

    SimplexSolution<T> solve() {
        layout();
        SimplexSolution<T> sol;
        if (first_art_ < width_) {
            std::vector<T> z(width_ + 1);
            for (std::size_t j = first_art_; j < width_; ++j) {
                z[j] = T(1);
            }
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                if (basis_[i] >= first_art_) {
                    axpy(z, rows_[i], T(-1));
                }
            }
            if (iterate(z, width_) == SimplexStatus::unbounded) {
                sol.status = SimplexStatus::infeasible;
                return sol;
            }
            if (Tr::is_neg(z[width_])) {
                sol.status = SimplexStatus::infeasible;
                return sol;
            }
            drive_out_artificials();
        }
        std::vector<T> z(width_ + 1);
        for (std::size_t j = 0; j < p_.n; ++j) {
            z[pos_col_[j]] = -p_.c[j];
            if (neg_col_[j] != npos) {
                z[neg_col_[j]] = p_.c[j];
            }
        }
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (!Tr::is_zero(z[basis_[i]])) {
                T f = -z[basis_[i]];
                axpy(z, rows_[i], f);
            }
        }
        const SimplexStatus st = iterate(z, first_art_);
        sol.status = st;
        std::vector<T> val(width_);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            val[basis_[i]] = rows_[i][width_];
        }
        sol.x.assign(p_.n, T(0));
        for (std::size_t j = 0; j < p_.n; ++j) {
            sol.x[j] = val[pos_col_[j]];
            if (neg_col_[j] != npos) {
                sol.x[j] -= val[neg_col_[j]];
            }
        }
        if (st == SimplexStatus::optimal) {
            sol.value = z[width_];
        }
        return sol;
    }

  private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    static constexpr std::size_t kDegenerateLimit = 50;

    void layout() {
        const std::size_t m = p_.a.size();
        pos_col_.assign(p_.n, npos);
        neg_col_.assign(p_.n, npos);
        std::size_t cols = 0;
        for (std::size_t j = 0; j < p_.n; ++j) {
            pos_col_[j] = cols++;
            if (p_.nonneg.empty() || !p_.nonneg[j]) {
                neg_col_[j] = cols++;
            }
        }
        std::vector<std::size_t> slack(m, npos);
        for (std::size_t i = 0; i < m; ++i) {
            if (!p_.eq[i]) {
                slack[i] = cols++;
            }
        }
        first_art_ = cols;
        std::vector<bool> flip(m);
        std::vector<bool> needs_art(m);
        for (std::size_t i = 0; i < m; ++i) {
            flip[i] = Tr::is_neg(p_.b[i]);
            needs_art[i] = p_.eq[i] || flip[i];
            if (needs_art[i]) {
                ++cols;
            }
        }
        width_ = cols;
        rows_.assign(m, std::vector<T>(width_ + 1));
        basis_.assign(m, npos);
        std::size_t art = first_art_;
        for (std::size_t i = 0; i < m; ++i) {
            auto& r = rows_[i];
            const T sgn = flip[i] ? T(-1) : T(1);
            for (std::size_t j = 0; j < p_.n; ++j) {
                if (Tr::is_zero(p_.a[i][j])) {
                    continue;
                }
                T v = p_.a[i][j] * sgn;
                r[pos_col_[j]] = v;
                if (neg_col_[j] != npos) {
                    r[neg_col_[j]] = -v;
                }
            }
            if (slack[i] != npos) {
                r[slack[i]] = sgn;
            }
            r[width_] = p_.b[i] * sgn;
            if (needs_art[i]) {
                r[art] = T(1);
                basis_[i] = art++;
            } else {
                basis_[i] = slack[i];
            }
        }
    }

    // dst += f * src
    void axpy(std::vector<T>& dst, const std::vector<T>& src, const T& f) {
        for (std::size_t j = 0; j <= width_; ++j) {
            if (!Tr::is_zero(src[j])) {
                dst[j] += f * src[j];
                Tr::clean(dst[j]);
            }
        }
    }

    void pivot(std::vector<T>& z, std::size_t r, std::size_t e) {
        auto& pr = rows_[r];
        const T inv = T(1) / pr[e];
        for (std::size_t j = 0; j <= width_; ++j) {
            if (!Tr::is_zero(pr[j])) {
                pr[j] *= inv;
            }
        }
        pr[e] = T(1);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (i != r && !Tr::is_zero(rows_[i][e])) {
                T f = -rows_[i][e];
                axpy(rows_[i], pr, f);
                rows_[i][e] = T(0);
            }
        }
        if (!Tr::is_zero(z[e])) {
            T f = -z[e];
            axpy(z, pr, f);
            z[e] = T(0);
        }
        basis_[r] = e;
    }

    SimplexStatus iterate(std::vector<T>& z, std::size_t allowed) {
        std::size_t pivots = 0;
        std::size_t degenerate = 0;
        bool bland = false;
        for (;;) {
            std::size_t e = npos;
            for (std::size_t j = 0; j < allowed; ++j) {
                if (!Tr::is_neg(z[j])) {
                    continue;
                }
                if (bland) {
                    e = j;
                    break;
                }
                if (e == npos || z[j] < z[e]) {
                    e = j;
                }
            }
            if (e == npos) {
                return SimplexStatus::optimal;
            }
            std::size_t r = npos;
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                if (!Tr::is_pos(rows_[i][e])) {
                    continue;
                }
                if (r == npos) {
                    r = i;
                    continue;
                }
                // compare rhs_i / a_ie with rhs_r / a_re
                const T lhs = rows_[i][width_] * rows_[r][e];
                const T rhs = rows_[r][width_] * rows_[i][e];
                if (lhs < rhs || (!(rhs < lhs) && basis_[i] < basis_[r])) {
                    r = i;
                }
            }
            if (r == npos) {
                return SimplexStatus::unbounded;
            }
            // largest coefficient first, Bland's rule once progress stalls
            if (Tr::is_zero(rows_[r][width_])) {
                if (++degenerate > kDegenerateLimit) {
                    bland = true;
                }
            } else {
                degenerate = 0;
            }
            pivot(z, r, e);
            if (Tr::max_pivots != 0 && ++pivots > Tr::max_pivots) {
                return SimplexStatus::optimal;
            }
        }
    }

    void drive_out_artificials() {
        std::vector<T> dummy(width_ + 1);
        for (std::size_t i = 0; i < rows_.size();) {
            if (basis_[i] < first_art_) {
                ++i;
                continue;
            }
            std::size_t e = npos;
            for (std::size_t j = 0; j < first_art_; ++j) {
                if (!Tr::is_zero(rows_[i][j])) {
                    e = j;
                    break;
                }
            }
            if (e == npos) {
                rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(i));
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
                continue;
            }
            pivot(dummy, i, e);
            ++i;
        }
    }

    const SimplexProblem<T>& p_;
    std::vector<std::vector<T>> rows_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> pos_col_;
    std::vector<std::size_t> neg_col_;
    std::size_t first_art_ = 0;
    std::size_t width_ = 0;
};

template <class T>
SimplexSolution<T> solve_simplex(const SimplexProblem<T>& p) {
    return Tableau<T>(p).solve();
}

} // namespace eta::detail
