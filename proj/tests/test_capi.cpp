// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <algorithm>
#include <memory>
#include <string>
#include <thread>

#include "eta/eta.h"

namespace {

struct Text {
    char* p = nullptr;
    ~Text() { eta_string_free(p); }
    [[nodiscard]] std::string str() const { return p != nullptr ? p : ""; }
};

using Model = std::unique_ptr<eta_model, decltype(&eta_model_free)>;
using Options = std::unique_ptr<eta_options, decltype(&eta_options_free)>;

Model load(const std::string& path) {
    eta_model* m = nullptr;
    REQUIRE(eta_model_load(path.c_str(), &m) == ETA_OK);
    return {m, &eta_model_free};
}

Model parse(const char* text) {
    eta_model* m = nullptr;
    REQUIRE(eta_model_parse(text, &m) == ETA_OK);
    return {m, &eta_model_free};
}

Model hydac(const char* variant, const char* eps) {
    eta_model* m = nullptr;
    REQUIRE(eta_model_hydac(variant, eps, &m) == ETA_OK);
    return {m, &eta_model_free};
}

const char* kLosing = R"(clocks: [x]
macro_states: [m]
initial: m
energy: [0, 10]
initial_energy: [5, 5]
transitions:
  - from: m
    to: m
    path:
      states:
        - {id: m, rate: -1, invariant: x <= 1}
        - {id: m, invariant: x <= 1}
      edges:
        - {guard: x = 1, resets: [x]}
)";

const std::string kFig3 = ETA_MODELS_DIR "/fig3.yaml";

} // namespace

TEST_CASE("version and error strings") {
    CHECK(std::string(eta_version()).size() > 0);
    eta_model* m = nullptr;
    CHECK(eta_model_load("/nonexistent/model.yaml", &m) == ETA_ERR_INPUT);
    CHECK(m == nullptr);
    CHECK(std::string(eta_last_error()).find("model.yaml") != std::string::npos);
    eta_string_free(nullptr);
    eta_model_free(nullptr);
    eta_options_free(nullptr);
}

TEST_CASE("last error is per thread") {
    eta_model* m = nullptr;
    REQUIRE(eta_model_parse("clocks: [", &m) == ETA_ERR_INPUT);
    const std::string mine = eta_last_error();
    CHECK_FALSE(mine.empty());
    std::string theirs = "unset";
    std::thread([&] { theirs = eta_last_error(); }).join();
    CHECK(theirs.empty());
    CHECK(std::string(eta_last_error()) == mine);
}

TEST_CASE("null handles are input errors") {
    Text t;
    CHECK(eta_check(nullptr, nullptr, nullptr, nullptr, nullptr, &t.p) == ETA_ERR_INPUT);
    CHECK(eta_fixpoint(nullptr, 0, nullptr, nullptr, &t.p) == ETA_ERR_INPUT);
    CHECK(eta_synth_ub(nullptr, "4.9", nullptr, nullptr, &t.p) == ETA_ERR_INPUT);
    CHECK(eta_model_parse(nullptr, nullptr) == ETA_ERR_INPUT);
    CHECK(eta_options_set_starts(nullptr, 4) == ETA_ERR_INPUT);
    CHECK(t.p == nullptr);
}

TEST_CASE("check on the three-state example") {
    const auto m = load(kFig3);
    Text t;
    CHECK(eta_check(m.get(), "s0", "0,0", "0,6", nullptr, &t.p) == ETA_OK);
    CHECK(t.str().rfind("tt\n", 0) == 0);
    CHECK(t.str().find("entry = s2 [5; 5]") != std::string::npos);
    CHECK(t.str().find("fixpoint = [5/3; 6]") != std::string::npos);

    Text defaults;
    CHECK(eta_check(m.get(), nullptr, nullptr, nullptr, nullptr, &defaults.p) == ETA_OK);
    CHECK(defaults.str() == t.str());

    Text bad;
    CHECK(eta_check(m.get(), "s9", "0,0", "0,6", nullptr, &bad.p) == ETA_ERR_INPUT);
    CHECK(eta_check(m.get(), "s0", "0;0", "0,6", nullptr, &bad.p) == ETA_ERR_INPUT);
    CHECK(bad.p == nullptr);
}

TEST_CASE("check reports ff with status NO") {
    const auto m = parse(kLosing);
    Text t;
    CHECK(eta_check(m.get(), nullptr, nullptr, nullptr, nullptr, &t.p) == ETA_NO);
    CHECK(t.str() == "ff\n");
}

TEST_CASE("fixpoint per simple cycle") {
    const auto m = load(kFig3);
    Text s1;
    Text s2;
    CHECK(eta_fixpoint(m.get(), 0, "0,6", nullptr, &s1.p) == ETA_NO);
    CHECK(s1.str() == "nu = empty\n");
    CHECK(eta_fixpoint(m.get(), 1, "0,6", nullptr, &s2.p) == ETA_OK);
    CHECK(s2.str() == "nu = [5/3; 6]\n");
    Text out;
    CHECK(eta_fixpoint(m.get(), 7, "0,6", nullptr, &out.p) == ETA_ERR_INPUT);
    CHECK(std::string(eta_last_error()).find("out of range") != std::string::npos);
}

TEST_CASE("resource caps map to the limit status") {
    const auto m = load(kFig3);
    Options o(eta_options_new(), &eta_options_free);
    REQUIRE(o);
    CHECK(eta_options_set_max_disjuncts(o.get(), 0) == ETA_ERR_INPUT);
    REQUIRE(eta_options_set_max_disjuncts(o.get(), 1) == ETA_OK);
    Text t;
    CHECK(eta_fixpoint(m.get(), 0, "0,6", o.get(), &t.p) == ETA_ERR_LIMIT);
    CHECK(t.p == nullptr);

    Options u(eta_options_new(), &eta_options_free);
    REQUIRE(eta_options_set_max_unfold(u.get(), 1) == ETA_OK);
    CHECK(eta_check(m.get(), nullptr, nullptr, nullptr, u.get(), &t.p) == ETA_ERR_LIMIT);
    CHECK(std::string(eta_last_error()).find("unfold") != std::string::npos);
}

TEST_CASE("dumped models re-parse to the same answers") {
    const auto m = load(kFig3);
    Text dump;
    REQUIRE(eta_model_dump(m.get(), &dump.p) == ETA_OK);
    const auto again = parse(dump.p);
    Text d2;
    REQUIRE(eta_model_dump(again.get(), &d2.p) == ETA_OK);
    CHECK(d2.str() == dump.str());
    for (std::size_t c = 0; c < 2; ++c) {
        Text a;
        Text b;
        CHECK(eta_fixpoint(m.get(), c, "0,6", nullptr, &a.p) == eta_fixpoint(again.get(), c, "0,6", nullptr, &b.p));
        CHECK(a.str() == b.str());
    }
    Text a;
    Text b;
    CHECK(eta_check(m.get(), nullptr, nullptr, nullptr, nullptr, &a.p) == ETA_OK);
    CHECK(eta_check(again.get(), nullptr, nullptr, nullptr, nullptr, &b.p) == ETA_OK);
    CHECK(a.str() == b.str());
}

TEST_CASE("HYDAC presets through the C API") {
    eta_model* m = nullptr;
    CHECK(eta_model_hydac("h3", "0", &m) == ETA_ERR_INPUT);
    CHECK(eta_model_hydac("h1", "-1", &m) == ETA_ERR_INPUT);
    CHECK(m == nullptr);

    const auto h1 = hydac("h1", "0");
    Text ub;
    REQUIRE(eta_synth_ub(h1.get(), "4.9", nullptr, nullptr, &ub.p) == ETA_OK);
    CHECK(ub.str() == "U = 5.84\nexact = 5.8375\nstable = [4.9; 5.8375]\n");

    Text strat;
    CHECK(eta_strategy(h1.get(), nullptr, nullptr, "9", nullptr, &strat.p) == ETA_ERR_PRECONDITION);
    REQUIRE(eta_strategy(h1.get(), nullptr, nullptr, "5.3", nullptr, &strat.p) == ETA_OK);
    CHECK(strat.str().rfind("w0 = 5.3\npump = [", 0) == 0);

    Text sim;
    CHECK(eta_simulate(h1.get(), nullptr, "8.3", "30", ETA_SIM_NOMINAL, 0, ETA_FORMAT_SUMMARY, nullptr, &sim.p) ==
          ETA_ERR_PRECONDITION);
    REQUIRE(eta_simulate(h1.get(), nullptr, "8.3", "40", ETA_SIM_NOMINAL, 0, ETA_FORMAT_SUMMARY, nullptr, &sim.p) ==
            ETA_OK);
    CHECK(sim.str().rfind("duration = 40.00\n", 0) == 0);
    CHECK(sim.str().find("no violation") != std::string::npos);
}

TEST_CASE("strategy family rows") {
    const auto h = hydac("h1", "0");
    Options o(eta_options_new(), &eta_options_free);
    REQUIRE(eta_options_set_starts(o.get(), 4) == ETA_OK);
    REQUIRE(eta_options_set_seed(o.get(), 7) == ETA_OK);
    Text csv;
    REQUIRE(eta_strategy_family(h.get(), nullptr, nullptr, "4.9", "5.8", "0.1", o.get(), &csv.p) == ETA_OK);
    const std::string s = csv.str();
    CHECK(s.rfind("w0,mean,pump_on\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 11);
    Text bad;
    CHECK(eta_strategy_family(h.get(), nullptr, nullptr, "4.9", "5.8", "0", o.get(), &bad.p) == ETA_ERR_INPUT);
    CHECK(eta_strategy_family(h.get(), nullptr, nullptr, "4.0", "5.8", "0.1", o.get(), &bad.p) ==
          ETA_ERR_PRECONDITION);
}
