// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "eta/automata.hpp"
#include "eta/hydac.hpp"
#include "eta/interval.hpp"
#include "eta/strategy.hpp"

namespace eta {

struct Breakpoint {
    Rational time;
    Rational level_min;
    Rational level_nominal;
    Rational level_max;
    // Pump state on the segment starting here.
    bool pump_on = false;
};

struct Violation {
    Rational time;
    Rational bound;
};

struct Trajectory {
    std::vector<Breakpoint> breakpoints;
    Rational duration;
    Rational accumulated_volume;
    Rational mean_level;
    Rational pump_on_time;
    std::size_t laps = 0;
    std::optional<Violation> violation;
};

enum class SimulationMode { nominal, envelope, adversarial };

struct SimulationOptions {
    SimulationMode mode = SimulationMode::nominal;
    std::uint64_t seed = 0;
};

// Delays for the lap starting at the observed level.
using Schedule = std::function<std::vector<Rational>(const Rational& level, std::size_t lap)>;

// Runs laps of `cycle` back to back for `duration` time units. The nominal column
// is the realised level (sampled rates in adversarial mode); the min/max columns
// are the envelope reachable within the lap from the observed starting level.
Trajectory simulate(const EnergyTimedPath& cycle, const Schedule& schedule, const Rational& w0,
                    const Rational& duration, const Interval& bounds, const SimulationOptions& options = {});

// HYDAC cycle; `duration` must be a multiple of the cycle length.
Trajectory simulate(const HydacConfig& cfg, const Schedule& schedule, const Rational& w0, const Rational& duration,
                    const SimulationOptions& options = {});

// The self-loop path of a HYDAC model.
EnergyTimedPath hydac_cycle(const HydacConfig& cfg);

// Delays that keep the pump off for the whole cycle.
std::vector<Rational> idle_delays(const EnergyTimedPath& cycle);

enum class ReportFormat { summary, csv };

std::string report(const Trajectory& traj, ReportFormat format);

// Per-lap controller: the optimal strategy when the observed level lies in the
// stable interval, otherwise a recovery lap into it.
class StrategyController {
  public:
    StrategyController(EnergyTimedPath cycle, Interval energy, Interval stable, OptimizerOptions options = {});

    std::vector<Rational> operator()(const Rational& level, std::size_t lap);

    [[nodiscard]] Schedule schedule();

  private:
    std::vector<Rational> plan(const Rational& level);

    EnergyTimedPath cycle_;
    Interval energy_;
    Interval stable_;
    OptimizerOptions options_;
    PermissiveStrategy steady_;
    std::map<Rational, std::vector<Rational>> cache_;
};

struct HydacSynthesis {
    HydacConfig config;
    Rational lower;
    Rational upper;
    Interval stable;
    PermissiveStrategy strategy;
};

// Minimal safe upper bound and the permissive strategy of the stable interval.
HydacSynthesis synthesize_hydac(const HydacConfig& cfg, const Rational& lower);

} // namespace eta
