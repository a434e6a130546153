// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/hydac.hpp"

#include <algorithm>

#include "eta/errors.hpp"

namespace eta {

bool HydacConfig::pumps_in_slot(std::size_t i) const {
    return variant == HydacVariant::h1 || i % 2 == 1;
}

std::string HydacConfig::name() const {
    std::string n = variant == HydacVariant::h1 ? "H1" : "H2";
    if (!epsilon.is_zero()) {
        n += "(eps=" + epsilon.to_string() + ")";
    }
    return n;
}

HydacVariant parse_variant(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "h1") {
        return HydacVariant::h1;
    }
    if (t == "h2") {
        return HydacVariant::h2;
    }
    throw InputError("unknown HYDAC variant '" + text + "' (expected h1 or h2)");
}

Seta build_hydac(const HydacConfig& cfg) {
    if (cfg.machine_rates.empty()) {
        throw InputError("HYDAC configuration needs at least one slot");
    }
    if (cfg.epsilon.sign() < 0) {
        throw InputError("epsilon must be non-negative");
    }
    const ClockConstraint inv{{"x", ClockRel::le, cfg.slot}};
    const auto state = [&](std::string id, const Rational& nominal, bool consuming, bool controlled) {
        EtpState s;
        s.id = std::move(id);
        s.invariant = inv;
        s.controlled = controlled;
        s.rate = nominal;
        if (cfg.zero_rate_noise == ZeroRateNoise::one_sided) {
            if (nominal.is_zero()) {
                s.rate = -cfg.epsilon / Rational(2);
                s.eps = cfg.epsilon / Rational(2);
            } else {
                s.eps = cfg.epsilon;
            }
        } else if (consuming) {
            s.eps = cfg.epsilon;
        }
        return s;
    };
    EnergyTimedPath p;
    p.clocks = {"x"};
    const EtpTransition free_edge{};
    EtpTransition slot_end;
    slot_end.guard = {{"x", ClockRel::eq, cfg.slot}};
    slot_end.resets = {"x"};
    for (std::size_t i = 0; i < cfg.machine_rates.size(); ++i) {
        const Rational& m = cfg.machine_rates[i];
        const bool consuming = m.sign() != 0;
        const std::string k = std::to_string(i + 1);
        p.states.push_back(state(i == 0 ? "m0" : "s" + k, m, consuming, false));
        if (cfg.pumps_in_slot(i)) {
            p.transitions.push_back(free_edge);
            p.states.push_back(state("p" + k, m + cfg.pump_rate, consuming, true));
            p.transitions.push_back(free_edge);
            p.states.push_back(state("q" + k, m, consuming, false));
        }
        p.transitions.push_back(slot_end);
    }
    EtpState back;
    back.id = "m0";
    back.invariant = inv;
    p.states.push_back(back);
    Seta s;
    s.clocks = {"x"};
    s.macro_states = {"m0"};
    s.initial = "m0";
    s.transitions.push_back({"m0", "m0", std::move(p)});
    return s;
}

} // namespace eta
