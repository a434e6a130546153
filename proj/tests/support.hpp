// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <catch_amalgamated.hpp>

#include "oracles.hpp"

template <>
struct Catch::StringMaker<eta::Rational> {
    static std::string convert(const eta::Rational& r) { return r.to_string(); }
};

template <>
struct Catch::StringMaker<eta::Interval> {
    static std::string convert(const eta::Interval& i) { return i.to_string(); }
};
