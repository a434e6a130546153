// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace eta {

// Malformed models, formulas, or arguments.
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A configured cap (disjuncts, unfoldings) was hit.
class ResourceLimit : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A precondition of an analysis does not hold for the given model.
class PreconditionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace eta
