// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "eta/eta.h"

namespace {

int exit_code(eta_status s) {
    switch (s) {
    case ETA_OK:
        return 0;
    case ETA_NO:
        return 1;
    case ETA_ERR_INPUT:
    case ETA_ERR_PRECONDITION:
        return 2;
    case ETA_ERR_LIMIT:
        return 3;
    default:
        return 4;
    }
}

const char* c_str(const std::optional<std::string>& s) {
    return s ? s->c_str() : nullptr;
}

struct Handles {
    eta_model* model = nullptr;
    eta_options* options = eta_options_new();

    Handles() = default;
    Handles(const Handles&) = delete;
    Handles& operator=(const Handles&) = delete;
    ~Handles() {
        eta_model_free(model);
        eta_options_free(options);
    }
};

struct Args {
    std::string model;
    std::optional<std::size_t> max_disjuncts;
    std::optional<std::size_t> max_unfold;
    std::optional<std::size_t> max_intervals;
    std::optional<std::size_t> starts;
    std::optional<std::string> init;
    std::optional<std::string> interval;
    std::optional<std::string> energy;
    std::optional<std::string> stable;
    std::optional<std::string> lower;
    std::optional<std::string> w0;
    std::size_t cycle = 0;
    std::optional<std::string> family;
    std::optional<std::string> plot;
    std::optional<std::string> output;
    std::string duration = "200";
    std::string mode = "nominal";
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::string variant = "h1";
    std::string eps = "0";
    std::string action = "table";
};

int report_error(eta_status s) {
    std::cerr << "error: " << eta_last_error() << '\n';
    return exit_code(s);
}

// Prints a C-API result string; write failures are input errors.
int emit(eta_status s, char* text, const std::optional<std::string>& path) {
    if (s != ETA_OK && s != ETA_NO) {
        eta_string_free(text);
        return report_error(s);
    }
    int code = exit_code(s);
    if (path) {
        std::ofstream f(*path, std::ios::binary);
        f << text;
        if (!f) {
            std::cerr << "error: cannot write '" << *path << "'\n";
            code = 2;
        }
    } else {
        std::cout << text;
    }
    eta_string_free(text);
    return code;
}

int configure(Handles& h, const Args& a) {
    eta_status s = ETA_OK;
    if (a.max_disjuncts) {
        s = eta_options_set_max_disjuncts(h.options, *a.max_disjuncts);
    }
    if (s == ETA_OK && a.max_unfold) {
        s = eta_options_set_max_unfold(h.options, *a.max_unfold);
    }
    if (s == ETA_OK && a.max_intervals) {
        s = eta_options_set_max_intervals(h.options, *a.max_intervals);
    }
    if (s == ETA_OK && a.starts) {
        s = eta_options_set_starts(h.options, *a.starts);
    }
    if (s != ETA_OK) {
        return report_error(s);
    }
    return 0;
}

int load(Handles& h, const Args& a) {
    if (int rc = configure(h, a); rc != 0) {
        return rc;
    }
    const eta_status s = eta_model_load(a.model.c_str(), &h.model);
    return s == ETA_OK ? 0 : report_error(s);
}

eta_sim_mode sim_mode(const std::string& m) {
    if (m == "envelope") {
        return ETA_SIM_ENVELOPE;
    }
    if (m == "adversarial") {
        return ETA_SIM_ADVERSARIAL;
    }
    return ETA_SIM_NOMINAL;
}

eta_format sim_format(const std::string& f) {
    if (f == "summary") {
        return ETA_FORMAT_SUMMARY;
    }
    if (f == "plot") {
        return ETA_FORMAT_PLOT;
    }
    return ETA_FORMAT_CSV;
}

int run_strategy(Handles& h, const Args& a) {
    char* out = nullptr;
    if (a.family) {
        const std::string spec = *a.family;
        const auto c1 = spec.find(',');
        const auto c2 = c1 == std::string::npos ? c1 : spec.find(',', c1 + 1);
        if (c2 == std::string::npos) {
            std::cerr << "error: --family expects from,to,step\n";
            return 2;
        }
        const std::string from = spec.substr(0, c1);
        const std::string to = spec.substr(c1 + 1, c2 - c1 - 1);
        const std::string step = spec.substr(c2 + 1);
        const eta_status s = eta_strategy_family(h.model, c_str(a.energy), c_str(a.stable), from.c_str(), to.c_str(),
                                                 step.c_str(), h.options, &out);
        return emit(s, out, a.plot ? a.plot : a.output);
    }
    const eta_status s = eta_strategy(h.model, c_str(a.energy), c_str(a.stable), c_str(a.w0), h.options, &out);
    return emit(s, out, a.output);
}

int run_simulate(Handles& h, const Args& a) {
    char* out = nullptr;
    const std::string w0 = a.w0.value_or("8.3");
    if (a.plot) {
        const eta_status s = eta_simulate(h.model, c_str(a.energy), w0.c_str(), a.duration.c_str(), sim_mode(a.mode),
                                          a.seed, ETA_FORMAT_PLOT, h.options, &out);
        if (int rc = emit(s, out, a.plot); rc != 0) {
            return rc;
        }
    }
    const eta_status s = eta_simulate(h.model, c_str(a.energy), w0.c_str(), a.duration.c_str(), sim_mode(a.mode),
                                      a.seed, sim_format(a.format), h.options, &out);
    return emit(s, out, a.output);
}

void add_limits(CLI::App* cmd, Args& a) {
    cmd->add_option("--max-disjuncts", a.max_disjuncts, "Cap on DNF disjuncts during quantifier elimination");
    cmd->add_option("--max-unfold", a.max_unfold, "Cap on cycle unfoldings in the infinite-run search");
    cmd->add_option("--max-intervals", a.max_intervals, "Cap on the interval count of the robust decision");
    cmd->add_option("--starts", a.starts, "Optimizer start points");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy timed automata controller synthesis"};
    app.set_version_flag("--version", std::string(eta_version()));
    app.require_subcommand(1);
    Args a;

    auto* check = app.add_subcommand("check", "Decide an energy-constrained infinite run");
    check->add_option("--model", a.model, "Model file")->required();
    check->add_option("--init", a.init, "Initial macro-state");
    check->add_option("--interval", a.interval, "Initial energy interval lo,hi");
    check->add_option("--energy", a.energy, "Energy constraint lo,hi");
    add_limits(check, a);

    auto* fix = app.add_subcommand("fixpoint", "Greatest stable interval of a simple cycle");
    fix->add_option("--model", a.model, "Model file")->required();
    fix->add_option("--energy", a.energy, "Energy constraint lo,hi");
    fix->add_option("--cycle", a.cycle, "Simple cycle index");
    add_limits(fix, a);

    auto* ub = app.add_subcommand("synth-ub", "Minimal safe upper bound and its stable interval");
    ub->add_option("--model", a.model, "Model file")->required();
    ub->add_option("--lower", a.lower, "Lower energy bound")->required();
    ub->add_option("--w0", a.w0, "Initial level (defaults to the lower bound)");
    add_limits(ub, a);

    auto* strat = app.add_subcommand("strategy", "Permissive constraint or optimal schedule");
    strat->add_option("--model", a.model, "Model file")->required();
    strat->add_option("--energy", a.energy, "Energy constraint lo,hi");
    strat->add_option("--stable", a.stable, "Target stable interval lo,hi");
    strat->add_option("--w0", a.w0, "Initial level for a concrete schedule");
    strat->add_option("--family", a.family, "Schedules for levels from,to,step (CSV)");
    strat->add_option("--plot", a.plot, "Write the family CSV to this file");
    strat->add_option("--output", a.output, "Write the result to this file");
    add_limits(strat, a);

    auto* sim = app.add_subcommand("simulate", "Simulate the synthesized controller");
    sim->add_option("--model", a.model, "Model file")->required();
    sim->add_option("--energy", a.energy, "Energy constraint lo,hi");
    sim->add_option("--w0", a.w0, "Initial level (default 8.3)");
    sim->add_option("--duration", a.duration, "Duration (default 200)");
    sim->add_option("--mode", a.mode, "nominal, envelope or adversarial")
        ->check(CLI::IsMember({"nominal", "envelope", "adversarial"}));
    sim->add_option("--seed", a.seed, "Seed of the adversarial sampler");
    sim->add_option("--format", a.format, "csv, plot or summary")->check(CLI::IsMember({"csv", "plot", "summary"}));
    sim->add_option("--plot", a.plot, "Also write plot data to this file");
    sim->add_option("--output", a.output, "Write the result to this file");
    add_limits(sim, a);

    auto* hydac = app.add_subcommand("hydac", "HYDAC oil-pump presets");
    hydac->add_option("--variant", a.variant, "h1 or h2");
    hydac->add_option("--eps", a.eps, "Rate imprecision");
    hydac->add_option("--lower", a.lower, "Lower bound (default 4.9)");
    hydac->add_option("action", a.action, "table, synth-ub, strategy or simulate")
        ->check(CLI::IsMember({"table", "synth-ub", "strategy", "simulate"}));
    hydac->add_option("--energy", a.energy, "Energy constraint lo,hi");
    hydac->add_option("--stable", a.stable, "Target stable interval lo,hi");
    hydac->add_option("--w0", a.w0, "Initial level");
    hydac->add_option("--family", a.family, "Schedules for levels from,to,step (CSV)");
    hydac->add_option("--duration", a.duration, "Simulation duration (default 200)");
    hydac->add_option("--mode", a.mode, "nominal, envelope or adversarial")
        ->check(CLI::IsMember({"nominal", "envelope", "adversarial"}));
    hydac->add_option("--seed", a.seed, "Seed of the adversarial sampler");
    hydac->add_option("--format", a.format, "csv, plot or summary")->check(CLI::IsMember({"csv", "plot", "summary"}));
    hydac->add_option("--plot", a.plot, "Write plot data to this file");
    hydac->add_option("--output", a.output, "Write the result to this file");
    add_limits(hydac, a);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Handles h;
    if (h.options == nullptr) {
        std::cerr << "error: out of memory\n";
        return 4;
    }
    char* out = nullptr;
    if (*hydac) {
        if (int rc = configure(h, a); rc != 0) {
            return rc;
        }
        const eta_status s = eta_model_hydac(a.variant.c_str(), a.eps.c_str(), &h.model);
        if (s != ETA_OK) {
            return report_error(s);
        }
        const std::string lower = a.lower.value_or("4.9");
        if (a.action == "synth-ub") {
            const eta_status r = eta_synth_ub(h.model, lower.c_str(), c_str(a.w0), h.options, &out);
            return emit(r, out, a.output);
        }
        if (a.action == "strategy") {
            return run_strategy(h, a);
        }
        if (a.action == "simulate") {
            return run_simulate(h, a);
        }
        const eta_status r = eta_hydac_report(h.model, lower.c_str(), h.options, &out);
        return emit(r, out, a.output);
    }
    if (int rc = load(h, a); rc != 0) {
        return rc;
    }
    eta_status s = ETA_OK;
    if (*check) {
        s = eta_check(h.model, c_str(a.init), c_str(a.interval), c_str(a.energy), h.options, &out);
        return emit(s, out, std::nullopt);
    }
    if (*fix) {
        s = eta_fixpoint(h.model, a.cycle, c_str(a.energy), h.options, &out);
        return emit(s, out, std::nullopt);
    }
    if (*ub) {
        s = eta_synth_ub(h.model, c_str(a.lower), c_str(a.w0), h.options, &out);
        return emit(s, out, std::nullopt);
    }
    if (*strat) {
        return run_strategy(h, a);
    }
    return run_simulate(h, a);
}
