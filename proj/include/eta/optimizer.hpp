// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace eta::opt {

// minimize c.x + x'Qx/2 subject to A x <= b and E x = e (dense, row-major).
struct QuadraticProblem {
    std::size_t n = 0;
    std::vector<std::vector<double>> q;
    std::vector<double> c;
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    std::vector<std::vector<double>> e;
    std::vector<double> f;

    [[nodiscard]] double value(const std::vector<double>& x) const;
};

struct GradientProjectionOptions {
    std::size_t starts = 32;
    std::size_t max_iterations = 400;
    std::uint64_t seed = 1;
};

// Multi-start active-set gradient projection from feasible vertices and their
// convex combinations. Returns local minima, best first; empty when no feasible
// start point was found.
std::vector<std::vector<double>> minimize(const QuadraticProblem& p, const GradientProjectionOptions& options);

} // namespace eta::opt
