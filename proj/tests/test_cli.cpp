// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(ETASYNTH) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) {
        r.out.append(buf, n);
    }
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string fig3() {
    return std::string(ETA_MODELS_DIR) + "/fig3.yaml";
}

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("etasynth_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& text) {
    const auto p = scratch() / name;
    std::ofstream(p) << text;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::istringstream l(line);
        for (std::string c; std::getline(l, c, ',');) {
            cells.push_back(c);
        }
        rows.push_back(cells);
    }
    return rows;
}

const char* kFlat = R"(clocks: [x]
macro_states: [m]
initial: m
energy: [0, 10]
initial_energy: [5, 5]
transitions:
  - from: m
    to: m
    path:
      states:
        - {id: m, rate: 0, invariant: x <= 1}
        - {id: m, invariant: x <= 1}
      edges:
        - {guard: x = 1, resets: [x]}
)";

} // namespace

TEST_CASE("cli check prints tt on the three-state example") {
    const auto r = run("check --model " + fig3() + " --init s0 --interval 0,0 --energy 0,6");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("tt\n", 0) == 0);
    CHECK(r.out.find("entry = s2 [5; 5]") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    CHECK(run("check --model " + (scratch() / "missing.model").string()).code == 2);
    CHECK(run("check").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("check --model " + fig3() + " --interval 0:0").code == 2);
    CHECK(run("fixpoint --model " + fig3() + " --cycle 0").code == 1);
    CHECK(run("fixpoint --model " + fig3() + " --cycle 0 --max-disjuncts 1").code == 3);
    CHECK(run("check --model " + fig3() + " --max-unfold 1").code == 3);
    CHECK(run("hydac --variant h1 simulate --duration 30").code == 2);
}

TEST_CASE("cli malformed model gives a line-anchored diagnostic") {
    const auto bad = write_file("bad.yaml", "clocks: [x]\nmacro_states: [m]\ninitial: q\ntransitions: []\n");
    const std::string cmd = std::string(ETASYNTH) + " check --model " + bad.string() + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string err;
    char buf[512];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) {
        err.append(buf, n);
    }
    const int status = pclose(p);
    CHECK(WEXITSTATUS(status) == 2);
    CHECK(err.find("bad.yaml:3:") != std::string::npos);
}

TEST_CASE("cli fixpoint prints the exact interval") {
    const auto r = run("fixpoint --model " + fig3() + " --cycle 1");
    CHECK(r.code == 0);
    CHECK(r.out == "nu = [5/3; 6]\n");
}

TEST_CASE("cli HYDAC upper bound") {
    const auto r = run("hydac --variant h1 --eps 0 --lower 4.9 synth-ub");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("U = 5.84\n", 0) == 0);
}

TEST_CASE("cli constant trajectory plots as two rows") {
    const auto model = write_file("flat.yaml", kFlat);
    const auto r = run("simulate --model " + model.string() + " --w0 5 --duration 3 --format plot");
    CHECK(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == "0.000000");
    CHECK(rows[2][0] == "3.000000");
    CHECK(rows[1][2] == rows[2][2]);

    const auto summary = run("simulate --model " + model.string() + " --w0 5 --duration 3 --format summary");
    CHECK(summary.out.find("mean = 5.00\nno violation\n") != std::string::npos);
}

TEST_CASE("cli unwritable output path is an input error") {
    const auto model = write_file("flat2.yaml", kFlat);
    const auto r = run("simulate --model " + model.string() + " --w0 5 --duration 3 --output " +
                       (scratch() / "no" / "such" / "dir" / "x.csv").string());
    CHECK(r.code == 2);
}

TEST_CASE("cli strategy family and simulation plot data") {
    const auto family = scratch() / "family.csv";
    const auto r = run("hydac --variant h1 --eps 0.1 strategy --family 5.1,7.1,0.1 --plot " + family.string());
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(read_file(family));
    CHECK(rows.size() == 22);
    CHECK(rows.front() == std::vector<std::string>{"w0", "mean", "pump_on"});
    CHECK(rows[1][0] == "5.1");
    CHECK(rows.back()[0] == "7.1");

    const auto plot = scratch() / "sim.csv";
    const auto s = run("hydac --variant h1 --eps 0.1 simulate --w0 6 --duration 100 --mode envelope --format summary "
                       "--plot " + plot.string());
    REQUIRE(s.code == 0);
    CHECK(s.out.find("no violation") != std::string::npos);
    const auto points = csv_rows(read_file(plot));
    REQUIRE(points.size() > 10);
    for (std::size_t i = 1; i < points.size(); ++i) {
        REQUIRE(points[i].size() == 5);
        for (int c = 1; c <= 3; ++c) {
            const double x = std::stod(points[i][static_cast<std::size_t>(c)]);
            CHECK(x >= 4.9 - 1e-9);
            CHECK(x <= 7.1613);
        }
    }
}

TEST_CASE("cli output is deterministic") {
    const std::string args = "hydac --variant h1 --eps 0.1 simulate --w0 6 --duration 40 --mode adversarial --seed 5";
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(run(args + " --seed 6").out != a.out);
}
