// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/optimizer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "eta/detail/simplex.hpp"

namespace eta::opt {

double QuadraticProblem::value(const std::vector<double>& x) const {
    double v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        v += c[i] * x[i];
        for (std::size_t j = 0; j < n; ++j) {
            v += 0.5 * x[i] * q[i][j] * x[j];
        }
    }
    return v;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

class Solver {
  public:
    explicit Solver(const QuadraticProblem& p) : p_(p) {
        const auto n = static_cast<Eigen::Index>(p.n);
        q_ = MatrixXd::Zero(n, n);
        c_ = VectorXd::Zero(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            c_(i) = p.c[static_cast<std::size_t>(i)];
            for (Eigen::Index j = 0; j < n; ++j) {
                q_(i, j) = p.q[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
        }
        a_ = rows(p.a, an_);
        e_ = rows(p.e, en_);
    }

    std::vector<VectorXd> vertices(std::size_t count, std::mt19937_64& rng) const {
        std::vector<VectorXd> out;
        std::normal_distribution<double> normal;
        detail::SimplexProblem<double> sp;
        sp.n = p_.n;
        sp.a = p_.a;
        sp.b = p_.b;
        sp.eq.assign(p_.a.size(), false);
        for (std::size_t i = 0; i < p_.e.size(); ++i) {
            sp.a.push_back(p_.e[i]);
            sp.b.push_back(p_.f[i]);
            sp.eq.push_back(true);
        }
        sp.nonneg.assign(p_.n, false);
        for (std::size_t k = 0; k < 4 * count && out.size() < count; ++k) {
            sp.c.assign(p_.n, 0.0);
            for (auto& x : sp.c) {
                x = normal(rng);
            }
            const auto sol = detail::solve_simplex(sp);
            if (sol.status == detail::SimplexStatus::infeasible) {
                return {};
            }
            if (sol.status != detail::SimplexStatus::optimal) {
                continue;
            }
            out.push_back(Eigen::Map<const VectorXd>(sol.x.data(), static_cast<Eigen::Index>(p_.n)));
        }
        return out;
    }

    VectorXd descend(VectorXd x, std::size_t max_iterations) const {
        const Eigen::Index m = a_.rows();
        std::vector<Eigen::Index> work;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (slack(x, i) <= 1e-9 && independent(work, i)) {
                work.push_back(i);
            }
        }
        for (std::size_t it = 0; it < max_iterations; ++it) {
            const VectorXd g = c_ + q_ * x;
            const MatrixXd nt = normals(work);
            VectorXd s = -g;
            VectorXd lambda;
            if (nt.cols() > 0) {
                lambda = nt.completeOrthogonalDecomposition().solve(g);
                s = -(g - nt * lambda);
            }
            if (s.norm() <= 1e-10 * (1.0 + g.norm())) {
                // Kuhn-Tucker multipliers are -lambda on the inequality rows.
                std::size_t drop = work.size();
                double worst = -1e-9;
                for (std::size_t k = 0; k < work.size(); ++k) {
                    const double mu = -lambda(e_.rows() + static_cast<Eigen::Index>(k));
                    if (mu < worst) {
                        worst = mu;
                        drop = k;
                    }
                }
                if (drop == work.size()) {
                    return x;
                }
                work.erase(work.begin() + static_cast<std::ptrdiff_t>(drop));
                continue;
            }
            double alpha_max = std::numeric_limits<double>::infinity();
            Eigen::Index blocking = -1;
            for (Eigen::Index i = 0; i < m; ++i) {
                if (std::find(work.begin(), work.end(), i) != work.end()) {
                    continue;
                }
                const double as = a_.row(i).dot(s);
                if (as > 1e-12 * s.norm()) {
                    const double a = std::max(0.0, slack(x, i)) / as;
                    if (a < alpha_max) {
                        alpha_max = a;
                        blocking = i;
                    }
                }
            }
            const double slope = g.dot(s);
            const double curvature = s.dot(q_ * s);
            double alpha = alpha_max;
            if (curvature > 1e-14 && -slope / curvature < alpha_max) {
                alpha = -slope / curvature;
                blocking = -1;
            }
            if (!std::isfinite(alpha)) {
                return x;
            }
            x += alpha * s;
            if (blocking >= 0) {
                work.push_back(blocking);
            }
        }
        return x;
    }

  private:
    MatrixXd normals(const std::vector<Eigen::Index>& work) const {
        MatrixXd nt(q_.rows(), e_.rows() + static_cast<Eigen::Index>(work.size()));
        for (Eigen::Index i = 0; i < e_.rows(); ++i) {
            nt.col(i) = e_.row(i).transpose();
        }
        for (std::size_t k = 0; k < work.size(); ++k) {
            nt.col(e_.rows() + static_cast<Eigen::Index>(k)) = a_.row(work[k]).transpose();
        }
        return nt;
    }

    bool independent(const std::vector<Eigen::Index>& work, Eigen::Index i) const {
        const VectorXd r = a_.row(i).transpose();
        const MatrixXd nt = normals(work);
        if (nt.cols() == 0) {
            return r.norm() > 1e-9;
        }
        const VectorXd y = nt.completeOrthogonalDecomposition().solve(r);
        return (r - nt * y).norm() > 1e-7;
    }

    static MatrixXd rows(const std::vector<std::vector<double>>& src, std::vector<double>& norms) {
        if (src.empty()) {
            return {};
        }
        MatrixXd out(static_cast<Eigen::Index>(src.size()), static_cast<Eigen::Index>(src.front().size()));
        for (std::size_t i = 0; i < src.size(); ++i) {
            double nrm = 0.0;
            for (double v : src[i]) {
                nrm += v * v;
            }
            nrm = std::sqrt(nrm);
            norms.push_back(nrm > 0 ? nrm : 1.0);
            for (std::size_t j = 0; j < src[i].size(); ++j) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = src[i][j] / norms.back();
            }
        }
        return out;
    }

    double slack(const VectorXd& x, Eigen::Index i) const {
        return p_.b[static_cast<std::size_t>(i)] / an_[static_cast<std::size_t>(i)] - a_.row(i).dot(x);
    }

    const QuadraticProblem& p_;
    MatrixXd q_;
    VectorXd c_;
    MatrixXd a_;
    MatrixXd e_;
    std::vector<double> an_;
    std::vector<double> en_;
};

} // namespace

std::vector<std::vector<double>> minimize(const QuadraticProblem& p, const GradientProjectionOptions& options) {
    std::mt19937_64 rng(options.seed);
    const Solver solver(p);
    const auto verts = solver.vertices(options.starts, rng);
    if (verts.empty()) {
        return {};
    }
    VectorXd centre = VectorXd::Zero(static_cast<Eigen::Index>(p.n));
    for (const auto& v : verts) {
        centre += v;
    }
    centre /= static_cast<double>(verts.size());
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<double, std::vector<double>>> found;
    for (std::size_t k = 0; k < options.starts; ++k) {
        const double t = unit(rng);
        const VectorXd start = t * verts[k % verts.size()] + (1.0 - t) * centre;
        const VectorXd x = solver.descend(start, options.max_iterations);
        std::vector<double> xv(x.data(), x.data() + x.size());
        found.emplace_back(p.value(xv), std::move(xv));
    }
    std::stable_sort(found.begin(), found.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::vector<double>> out;
    out.reserve(found.size());
    for (auto& f : found) {
        out.push_back(std::move(f.second));
    }
    return out;
}

} // namespace eta::opt
