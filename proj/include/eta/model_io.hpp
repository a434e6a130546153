// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "eta/automata.hpp"
#include "eta/hydac.hpp"
#include "eta/interval.hpp"

namespace eta {

struct Model {
    Seta seta;
    // Optional defaults carried by the file; command-line options override them.
    std::optional<Interval> energy;
    std::optional<Interval> initial_energy;
    std::optional<HydacConfig> hydac;
};

// Parses the YAML model format; errors are InputError "<source>:<line>:<col>: ...".
Model parse_model(std::string_view text, const std::string& source = "<model>");
Model load_model(const std::string& path);

// Writes a model that parse_model reads back to the same automaton.
std::string dump_model(const Model& model);

} // namespace eta
