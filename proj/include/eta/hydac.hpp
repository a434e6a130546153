// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "eta/automata.hpp"
#include "eta/interval.hpp"

namespace eta {

enum class HydacVariant { h1, h2 };

enum class ZeroRateNoise {
    // Zero-consumption slots stay exact; every state of a consuming slot gets +-eps.
    exact,
    // Rate 0 becomes [-eps;0] and every other state gets +-eps.
    one_sided,
};

struct HydacConfig {
    HydacVariant variant = HydacVariant::h1;
    Rational epsilon;
    Rational pump_rate = Rational(11, 5);
    Rational v_min = Rational(49, 10);
    Rational v_max = Rational(251, 10);
    Rational slot = Rational(2);
    std::vector<Rational> machine_rates = {Rational(0),     Rational(-6, 5), Rational(0),      Rational(0),
                                           Rational(-6, 5), Rational(-5, 2), Rational(0),      Rational(-17, 10),
                                           Rational(-1, 2), Rational(0)};
    ZeroRateNoise zero_rate_noise = ZeroRateNoise::exact;

    [[nodiscard]] bool pumps_in_slot(std::size_t slot_index) const;
    [[nodiscard]] Rational cycle_length() const { return slot * Rational(static_cast<long>(machine_rates.size())); }
    [[nodiscard]] std::string name() const;
};

HydacVariant parse_variant(const std::string& text);

// One macro-state "m0" with a self-loop whose path runs the consumption cycle.
Seta build_hydac(const HydacConfig& cfg);

} // namespace eta
