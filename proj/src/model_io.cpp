// Copyright (c) etasynth contributors.
// SPDX-License-Identifier: Apache-2.0
#include "eta/model_io.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

#include "eta/errors.hpp"

namespace eta {

namespace {

class Reader {
  public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& msg) const {
        const auto m = at.Mark();
        if (m.is_null()) {
            throw InputError(source_ + ": " + msg);
        }
        throw InputError(source_ + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": " +
                         msg);
    }

    void known_keys(const YAML::Node& map, std::initializer_list<const char*> keys) const {
        if (!map.IsMap()) {
            fail(map, "expected a mapping");
        }
        for (const auto& kv : map) {
            const auto k = kv.first.as<std::string>();
            if (std::none_of(keys.begin(), keys.end(), [&](const char* s) { return k == s; })) {
                fail(kv.first, "unknown field '" + k + "'");
            }
        }
    }

    YAML::Node required(const YAML::Node& map, const char* key) const {
        const YAML::Node n = map[key];
        if (!n) {
            fail(map, std::string("missing field '") + key + "'");
        }
        return n;
    }

    std::string text(const YAML::Node& n) const {
        if (!n.IsScalar()) {
            fail(n, "expected a scalar");
        }
        return n.Scalar();
    }

    Rational number(const YAML::Node& n) const {
        const auto v = Rational::try_parse(text(n));
        if (!v) {
            fail(n, "malformed number '" + n.Scalar() + "'");
        }
        return *v;
    }

    Rational number_or(const YAML::Node& map, const char* key, const Rational& dflt) const {
        const YAML::Node n = map[key];
        return n ? number(n) : dflt;
    }

    std::vector<std::string> names(const YAML::Node& n) const {
        std::vector<std::string> out;
        if (n.IsScalar()) {
            out.push_back(n.Scalar());
            return out;
        }
        if (!n.IsSequence()) {
            fail(n, "expected a list of names");
        }
        for (const auto& x : n) {
            out.push_back(text(x));
        }
        return out;
    }

    ClockConstraint clocks(const YAML::Node& n) const {
        try {
            return parse_clock_constraint(text(n));
        } catch (const InputError& e) {
            fail(n, e.what());
        }
    }

    Interval interval(const YAML::Node& n) const {
        if (n.IsSequence() && n.size() == 2) {
            return {number(n[0]), number(n[1])};
        }
        if (n.IsScalar()) {
            const Rational v = number(n);
            return Interval::point(v);
        }
        fail(n, "expected a number or a [lo, hi] pair");
    }

    EnergyTimedPath path(const YAML::Node& n, const std::vector<std::string>& declared,
                         const ClockConstraint& global) const {
        known_keys(n, {"states", "edges"});
        EnergyTimedPath p;
        p.clocks = declared;
        const YAML::Node states = required(n, "states");
        const YAML::Node edges = n["edges"];
        if (!states.IsSequence() || states.size() == 0) {
            fail(states, "expected a non-empty list of states");
        }
        for (const auto& s : states) {
            known_keys(s, {"id", "rate", "eps", "invariant", "controlled"});
            EtpState st;
            st.id = text(required(s, "id"));
            st.rate = number_or(s, "rate", Rational(0));
            st.eps = number_or(s, "eps", Rational(0));
            if (st.eps.sign() < 0) {
                fail(s["eps"], "eps must be non-negative");
            }
            if (s["invariant"]) {
                st.invariant = clocks(s["invariant"]);
            }
            st.invariant.insert(st.invariant.end(), global.begin(), global.end());
            if (s["controlled"]) {
                st.controlled = s["controlled"].as<bool>();
            }
            p.states.push_back(std::move(st));
        }
        const std::size_t want = p.states.size() - 1;
        const std::size_t have = edges ? edges.size() : 0;
        if (have != want) {
            fail(edges ? edges : n, "path with " + std::to_string(p.states.size()) + " states needs " +
                                        std::to_string(want) + " edges, found " + std::to_string(have));
        }
        if (edges) {
            for (const auto& e : edges) {
                known_keys(e, {"guard", "update", "delta", "resets"});
                EtpTransition t;
                if (e["guard"]) {
                    t.guard = clocks(e["guard"]);
                }
                t.update = number_or(e, "update", Rational(0));
                t.delta = number_or(e, "delta", Rational(0));
                if (t.delta.sign() < 0) {
                    fail(e["delta"], "delta must be non-negative");
                }
                if (e["resets"]) {
                    t.resets = names(e["resets"]);
                    for (const auto& r : t.resets) {
                        if (std::find(declared.begin(), declared.end(), r) == declared.end()) {
                            fail(e["resets"], "reset of undeclared clock '" + r + "'");
                        }
                    }
                }
                for (const auto& a : t.guard) {
                    if (std::find(declared.begin(), declared.end(), a.clock) == declared.end()) {
                        fail(e["guard"], "guard uses undeclared clock '" + a.clock + "'");
                    }
                }
                p.transitions.push_back(std::move(t));
            }
        }
        return p;
    }

    HydacConfig preset(const YAML::Node& root) const {
        HydacConfig cfg;
        try {
            cfg.variant = parse_variant(text(root["preset"]));
        } catch (const InputError& e) {
            fail(root["preset"], e.what());
        }
        cfg.epsilon = number_or(root, "epsilon", Rational(0));
        if (root["noise"]) {
            const std::string z = text(root["noise"]);
            if (z == "one_sided") {
                cfg.zero_rate_noise = ZeroRateNoise::one_sided;
            } else if (z != "exact") {
                fail(root["noise"], "noise must be 'exact' or 'one_sided'");
            }
        }
        cfg.pump_rate = number_or(root, "pump_rate", cfg.pump_rate);
        cfg.v_min = number_or(root, "v_min", cfg.v_min);
        cfg.v_max = number_or(root, "v_max", cfg.v_max);
        if (root["machine_rates"]) {
            cfg.machine_rates.clear();
            for (const auto& r : root["machine_rates"]) {
                cfg.machine_rates.push_back(number(r));
            }
        }
        return cfg;
    }

    Model model(const YAML::Node& root) const {
        if (!root.IsMap()) {
            fail(root, "a model must be a mapping");
        }
        Model m;
        if (root["preset"]) {
            known_keys(root, {"preset", "epsilon", "noise", "pump_rate", "v_min", "v_max", "machine_rates",
                              "initial_energy"});
            m.hydac = preset(root);
            m.seta = build_hydac(*m.hydac);
            m.energy = Interval(m.hydac->v_min, m.hydac->v_max);
            if (root["initial_energy"]) {
                m.initial_energy = interval(root["initial_energy"]);
            }
            return m;
        }
        known_keys(root, {"clocks", "invariant", "macro_states", "initial", "transitions", "energy",
                          "initial_energy"});
        if (root["clocks"]) {
            m.seta.clocks = names(root["clocks"]);
        }
        ClockConstraint global;
        if (root["invariant"]) {
            global = clocks(root["invariant"]);
            for (const auto& a : global) {
                if (std::find(m.seta.clocks.begin(), m.seta.clocks.end(), a.clock) == m.seta.clocks.end()) {
                    fail(root["invariant"], "invariant uses undeclared clock '" + a.clock + "'");
                }
            }
        }
        m.seta.macro_states = names(required(root, "macro_states"));
        std::set<std::string> seen;
        for (const auto& s : m.seta.macro_states) {
            if (!seen.insert(s).second) {
                fail(root["macro_states"], "macro-state '" + s + "' declared twice");
            }
        }
        const YAML::Node init = required(root, "initial");
        m.seta.initial = text(init);
        if (!seen.contains(m.seta.initial)) {
            fail(init, "unknown macro-state '" + m.seta.initial + "'");
        }
        const YAML::Node ts = required(root, "transitions");
        if (!ts.IsSequence()) {
            fail(ts, "expected a list of transitions");
        }
        for (const auto& t : ts) {
            known_keys(t, {"from", "to", "path"});
            MacroTransition mt;
            mt.from = text(required(t, "from"));
            mt.to = text(required(t, "to"));
            for (const auto* end : {&mt.from, &mt.to}) {
                if (!seen.contains(*end)) {
                    fail(t, "unknown macro-state '" + *end + "'");
                }
            }
            const YAML::Node p = required(t, "path");
            mt.path = path(p, m.seta.clocks, global);
            if (mt.path.states.front().id != mt.from) {
                fail(p, "path starts at '" + mt.path.states.front().id + "' but the transition leaves '" + mt.from +
                            "'");
            }
            if (mt.path.states.back().id != mt.to) {
                fail(p, "path ends at '" + mt.path.states.back().id + "' but the transition enters '" + mt.to + "'");
            }
            m.seta.transitions.push_back(std::move(mt));
        }
        if (root["energy"]) {
            m.energy = interval(root["energy"]);
        }
        if (root["initial_energy"]) {
            m.initial_energy = interval(root["initial_energy"]);
        }
        return m;
    }

  private:
    std::string source_;
};

void emit_interval(YAML::Emitter& out, const Interval& i) {
    out << YAML::Flow << YAML::BeginSeq << i.lo()->to_string() << i.hi()->to_string() << YAML::EndSeq;
}

} // namespace

Model parse_model(std::string_view text, const std::string& source) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::Exception& e) {
        throw InputError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                         ": " + e.msg);
    }
    Reader r(source);
    Model m;
    try {
        m = r.model(root);
    } catch (const YAML::Exception& e) {
        throw InputError(source + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                         ": " + e.msg);
    }
    const auto diags = validate(m.seta);
    if (!diags.empty()) {
        throw InputError(source + ": " + diags.front().where + ": " + diags.front().message);
    }
    return m;
}

Model load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open model file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_model(ss.str(), path);
}

std::string dump_model(const Model& model) {
    const Seta& s = model.seta;
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "clocks" << YAML::Value << YAML::Flow << s.clocks;
    out << YAML::Key << "macro_states" << YAML::Value << YAML::Flow << s.macro_states;
    out << YAML::Key << "initial" << YAML::Value << s.initial;
    if (model.energy && model.energy->bounded()) {
        out << YAML::Key << "energy" << YAML::Value;
        emit_interval(out, *model.energy);
    }
    if (model.initial_energy && model.initial_energy->bounded()) {
        out << YAML::Key << "initial_energy" << YAML::Value;
        emit_interval(out, *model.initial_energy);
    }
    out << YAML::Key << "transitions" << YAML::Value << YAML::BeginSeq;
    for (const auto& t : s.transitions) {
        out << YAML::BeginMap;
        out << YAML::Key << "from" << YAML::Value << t.from;
        out << YAML::Key << "to" << YAML::Value << t.to;
        out << YAML::Key << "path" << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "states" << YAML::Value << YAML::BeginSeq;
        for (const auto& st : t.path.states) {
            out << YAML::Flow << YAML::BeginMap;
            out << YAML::Key << "id" << YAML::Value << st.id;
            out << YAML::Key << "rate" << YAML::Value << st.rate.to_string();
            if (!st.eps.is_zero()) {
                out << YAML::Key << "eps" << YAML::Value << st.eps.to_string();
            }
            if (!st.invariant.empty()) {
                out << YAML::Key << "invariant" << YAML::Value << to_string(st.invariant);
            }
            if (st.controlled) {
                out << YAML::Key << "controlled" << YAML::Value << true;
            }
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
        out << YAML::Key << "edges" << YAML::Value << YAML::BeginSeq;
        for (const auto& e : t.path.transitions) {
            out << YAML::Flow << YAML::BeginMap;
            if (!e.guard.empty()) {
                out << YAML::Key << "guard" << YAML::Value << to_string(e.guard);
            }
            out << YAML::Key << "update" << YAML::Value << e.update.to_string();
            if (!e.delta.is_zero()) {
                out << YAML::Key << "delta" << YAML::Value << e.delta.to_string();
            }
            if (!e.resets.empty()) {
                out << YAML::Key << "resets" << YAML::Value << YAML::Flow << e.resets;
            }
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
        out << YAML::EndMap;
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

} // namespace eta
