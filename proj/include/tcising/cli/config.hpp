// SPDX-License-Identifier: Apache-2.0

/**
 * @file config.hpp
 * @brief Run configuration: YAML schema, validation and canonical dump.
 *
 * All energies and rates are in units of the nearest-neighbour interaction V,
 * times in units of 1/V. Unknown keys are rejected with their line number.
 * See configs/README.md for the schema.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "tcising/error.hpp"
#include "tcising/measures.hpp"
#include "tcising/model.hpp"
#include "tcising/states.hpp"

namespace tcising::cli {

struct Schedule {
    double t_max = 0.0;
    int n_save = 1;  ///< save points including t = 0
    std::size_t n_traj = 0;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::size_t snapshots_per_save = 0;
    double tol = 1e-8;
    int max_krylov = 40;

    [[nodiscard]] std::vector<double> grid() const {
        std::vector<double> t(static_cast<std::size_t>(n_save));
        for (int i = 0; i < n_save; ++i) t[static_cast<std::size_t>(i)] = n_save == 1 ? 0.0 : t_max * i / (n_save - 1);
        return t;
    }
};

/// Linear axis `from`, `to`, `steps` (inclusive) or an explicit value list.
struct Axis {
    std::vector<double> values;
};

struct ScanConfig {
    Axis h_z;
    Axis G;  ///< collective coupling g sqrt(N)
    int q_min = 0;
    int q_max = -1;  ///< -1 = N + max photon budget of 2N
    double jump_factor = 10.0;
};

struct RunConfig {
    ModelParams model;
    InitialStateSpec initial;
    LossRates losses;
    Schedule schedule;
    std::vector<ObservableSpec> observables;
    ScanConfig scan;
    int max_dw = -1;  ///< post-selection threshold, -1 = initial wall count
    std::string out_dir = "out";
    std::string tag = "run";
    std::string source;  ///< path the config came from
};

namespace detail {

[[noreturn]] inline void config_fail(const YAML::Node& node, const std::string& msg) {
    const auto m = node.Mark();
    std::string where = m.is_null() ? std::string("config") : "line " + std::to_string(m.line + 1);
    throw Error(ErrorCode::ConfigError, where + ": " + msg);
}

inline void only_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& section) {
    if (!map.IsMap()) config_fail(map, "section '" + section + "' must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) config_fail(kv.first, "unknown key '" + key + "' in section '" + section + "'");
    }
}

template <typename T>
void read(const YAML::Node& map, const char* key, T& dst) {
    const auto n = map[key];
    if (!n) return;
    try {
        dst = n.as<T>();
    } catch (const YAML::Exception&) {
        config_fail(n, std::string("bad value for '") + key + "'");
    }
}

inline Axis read_axis(const YAML::Node& n, const std::string& name) {
    Axis a;
    if (n.IsSequence()) {
        for (const auto& v : n) a.values.push_back(v.as<double>());
    } else if (n.IsMap()) {
        only_keys(n, {"from", "to", "steps"}, name);
        double lo = 0.0, hi = 0.0;
        int steps = 1;
        read(n, "from", lo);
        read(n, "to", hi);
        read(n, "steps", steps);
        if (steps < 1) config_fail(n, name + ".steps must be >= 1");
        for (int i = 0; i < steps; ++i) a.values.push_back(steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1));
    } else {
        a.values.push_back(n.as<double>());
    }
    return a;
}

inline ObservableSpec read_observable(const YAML::Node& n) {
    static const std::vector<std::pair<std::string, ObservableKind>> names = {
        {"dw_a", ObservableKind::DwA},           {"dw_b", ObservableKind::DwB},
        {"meson_a", ObservableKind::MesonA},     {"meson_b", ObservableKind::MesonB},
        {"n_ph", ObservableKind::NPh},           {"charge", ObservableKind::Charge},
        {"sz", ObservableKind::SzProfile},       {"string_w", ObservableKind::StringW},
        {"entropy", ObservableKind::EntropyCut}, {"mutual_info", ObservableKind::MutualInfo},
        {"meson_number", ObservableKind::MesonNumber}, {"wall_number", ObservableKind::WallNumber},
    };
    ObservableSpec spec;
    std::string kind;
    YAML::Node args;
    if (n.IsScalar()) {
        kind = n.as<std::string>();
    } else if (n.IsMap()) {
        only_keys(n, {"kind", "i", "j", "cavity", "type"}, "observables");
        if (!n["kind"]) config_fail(n, "observable needs a 'kind'");
        kind = n["kind"].as<std::string>();
        args = n;
    } else {
        config_fail(n, "observable must be a name or a mapping");
    }
    bool found = false;
    for (const auto& [name, k] : names)
        if (name == kind) {
            spec.kind = k;
            found = true;
        }
    if (!found) config_fail(n, "unknown observable '" + kind + "'");
    if (args) {
        read(args, "i", spec.i);
        read(args, "j", spec.j);
        if (args["cavity"]) spec.j = args["cavity"].as<bool>() ? 1 : 0;
        if (args["type"]) {
            const auto t = args["type"].as<std::string>();
            if (t != "a" && t != "b") config_fail(args["type"], "type must be 'a' or 'b'");
            spec.i = t == "b" ? 1 : 0;
        }
    }
    return spec;
}

}  // namespace detail

/// Parse a configuration document. Throws Error(ConfigError) with a line number on bad input.
[[nodiscard]] inline RunConfig parse_config(const YAML::Node& root) {
    using detail::config_fail;
    using detail::only_keys;
    using detail::read;
    RunConfig c;
    if (!root || root.IsNull()) throw Error(ErrorCode::ConfigError, "config: empty document");
    only_keys(root, {"model", "initial", "losses", "schedule", "observables", "scan", "postselect", "output"}, "top level");

    if (const auto m = root["model"]) {
        only_keys(m, {"N", "delta", "h_z", "V", "g", "G", "lambda", "h_x", "range", "range_cutoff", "boundary", "n_max"},
                  "model");
        auto& p = c.model;
        read(m, "N", p.N);
        read(m, "delta", p.delta);
        read(m, "h_z", p.h_z);
        read(m, "V", p.V);
        read(m, "g", p.g);
        if (m["G"]) {
            if (m["g"]) config_fail(m["G"], "give either g or G, not both");
            p.g = m["G"].as<double>() / std::sqrt(static_cast<double>(p.N));
        }
        p.g = std::abs(p.g);
        read(m, "lambda", p.lambda);
        read(m, "h_x", p.h_x);
        read(m, "range_cutoff", p.range_cutoff);
        read(m, "n_max", p.n_max);
        if (const auto r = m["range"]) {
            const auto s = r.as<std::string>();
            if (s == "nearest")
                p.range = Range::Nearest;
            else if (s == "power_law_6")
                p.range = Range::PowerLaw6;
            else
                config_fail(r, "range must be 'nearest' or 'power_law_6'");
        }
        if (const auto b = m["boundary"]) {
            const auto s = b.as<std::string>();
            if (s == "none")
                p.boundary_field = BoundaryField::None;
            else if (s == "rydberg_pinned")
                p.boundary_field = BoundaryField::RydbergPinned;
            else
                config_fail(b, "boundary must be 'none' or 'rydberg_pinned'");
        }
        try {
            p.validate();
        } catch (const Error& e) {
            config_fail(m, e.what());
        }
    }

    if (const auto s = root["initial"]) {
        only_keys(s, {"kind", "position", "r0", "n_ph", "bits"}, "initial");
        auto& st = c.initial;
        if (const auto k = s["kind"]) {
            const auto v = k.as<std::string>();
            if (v == "afm") st.kind = StateKind::Afm;
            else if (v == "dw_a") st.kind = StateKind::SingleDwA;
            else if (v == "dw_b") st.kind = StateKind::SingleDwB;
            else if (v == "meson_a") st.kind = StateKind::MesonA;
            else if (v == "meson_b") st.kind = StateKind::MesonB;
            else if (v == "string") st.kind = StateKind::String;
            else if (v == "custom") st.kind = StateKind::Custom;
            else config_fail(k, "unknown initial kind '" + v + "'");
        }
        read(s, "position", st.position);
        read(s, "r0", st.r0);
        read(s, "n_ph", st.n_ph0);
        if (const auto b = s["bits"]) {
            const auto bits = b.as<std::string>();
            if (static_cast<int>(bits.size()) != c.model.N || bits.find_first_not_of("01") != std::string::npos)
                config_fail(b, "bits must be a 0/1 string of length N (site 0 first)");
            st.custom_bits = from_bitstring(bits);
        }
        try {
            (void)make_configuration(st, c.model);
        } catch (const Error& e) {
            config_fail(s, e.what());
        }
    }

    if (const auto l = root["losses"]) {
        only_keys(l, {"kappa", "gamma_at", "kappa2_over_g", "gamma_over_g"}, "losses");
        read(l, "kappa", c.losses.kappa);
        read(l, "gamma_at", c.losses.gamma_at);
        if (l["kappa2_over_g"]) c.losses.kappa = 0.5 * l["kappa2_over_g"].as<double>() * c.model.g;
        if (l["gamma_over_g"]) c.losses.gamma_at = l["gamma_over_g"].as<double>() * c.model.g;
        if (c.losses.kappa < 0.0 || c.losses.gamma_at < 0.0) config_fail(l, "loss rates must be non-negative");
    }

    if (const auto s = root["schedule"]) {
        only_keys(s, {"t_max", "n_save", "n_traj", "seed", "threads", "snapshots_per_save", "tol", "max_krylov"},
                  "schedule");
        auto& sc = c.schedule;
        read(s, "t_max", sc.t_max);
        read(s, "n_save", sc.n_save);
        read(s, "n_traj", sc.n_traj);
        read(s, "seed", sc.seed);
        read(s, "threads", sc.threads);
        read(s, "snapshots_per_save", sc.snapshots_per_save);
        read(s, "tol", sc.tol);
        read(s, "max_krylov", sc.max_krylov);
        if (sc.t_max < 0.0) config_fail(s, "t_max must be >= 0");
        if (sc.n_save < 1) config_fail(s, "n_save must be >= 1");
        if (sc.threads < 1) config_fail(s, "threads must be >= 1");
        if (!(sc.tol > 0.0)) config_fail(s, "tol must be positive");
    }

    if (const auto o = root["observables"]) {
        if (!o.IsSequence()) config_fail(o, "observables must be a list");
        for (const auto& item : o) c.observables.push_back(detail::read_observable(item));
    }

    if (const auto s = root["scan"]) {
        only_keys(s, {"h_z", "G", "q_min", "q_max", "jump_factor"}, "scan");
        c.scan.h_z.values = {c.model.h_z};
        c.scan.G.values = {c.model.g * std::sqrt(static_cast<double>(c.model.N))};
        if (s["h_z"]) c.scan.h_z = detail::read_axis(s["h_z"], "scan.h_z");
        if (s["G"]) c.scan.G = detail::read_axis(s["G"], "scan.G");
        read(s, "q_min", c.scan.q_min);
        read(s, "q_max", c.scan.q_max);
        read(s, "jump_factor", c.scan.jump_factor);
        if (c.scan.q_max >= 0 && c.scan.q_max < c.scan.q_min) config_fail(s, "q_max < q_min");
    }

    if (const auto s = root["postselect"]) {
        only_keys(s, {"max_dw"}, "postselect");
        read(s, "max_dw", c.max_dw);
    }

    if (const auto s = root["output"]) {
        only_keys(s, {"dir", "tag"}, "output");
        read(s, "dir", c.out_dir);
        read(s, "tag", c.tag);
    }
    return c;
}

[[nodiscard]] inline RunConfig load_config(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::BadFile&) {
        throw Error(ErrorCode::ConfigError, path + ": cannot open");
    } catch (const YAML::ParserException& e) {
        throw Error(ErrorCode::ConfigError, path + ": line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    try {
        auto c = parse_config(root);
        c.source = path;
        return c;
    } catch (const Error& e) {
        throw Error(ErrorCode::ConfigError, path + ": " + std::string(e.what()).substr(sizeof("CONFIG_ERROR: ") - 1));
    }
}

[[nodiscard]] inline std::string to_string(StateKind k) {
    switch (k) {
        case StateKind::Afm: return "afm";
        case StateKind::SingleDwA: return "dw_a";
        case StateKind::SingleDwB: return "dw_b";
        case StateKind::MesonA: return "meson_a";
        case StateKind::MesonB: return "meson_b";
        case StateKind::String: return "string";
        case StateKind::Custom: return "custom";
    }
    return "afm";
}

}  // namespace tcising::cli
