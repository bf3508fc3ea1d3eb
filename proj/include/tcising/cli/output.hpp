// SPDX-License-Identifier: Apache-2.0

/**
 * @file output.hpp
 * @brief CSV, JSON metadata and snapshot writers.
 *
 * Numbers are printed with std::to_chars (shortest round-trip form), so the
 * same data always produces the same bytes.
 *
 * Layouts:
 *   time series   t,label,index,value[,stderr]
 *   ground scan   h_z,G,g,best_q,energy,n_ph  and  h_z,G,q,energy
 *   post-select   t,total,accepted,fraction,fraction_err,bond,density_a,density_a_err,density_b,density_b_err
 *   snapshots     "# t=<time>" header, then one bitstring per line (site 0 first)
 */

#pragma once

#include <charconv>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tcising/cli/config.hpp"
#include "tcising/dynamics.hpp"
#include "tcising/measures.hpp"
#include "tcising/theory.hpp"
#include "tcising/trajectories.hpp"

#ifndef TCISING_VERSION
#define TCISING_VERSION "0.0.0"
#endif

namespace tcising::cli {

using nlohmann::json;

[[nodiscard]] inline std::string num(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, r.ptr);
}

/// One row per (time, observable entry).
class SeriesWriter {
public:
    SeriesWriter(std::ostream& os, bool with_stderr) : os_(os), err_(with_stderr) {
        os_ << "t,label,index,value" << (err_ ? ",stderr" : "") << '\n';
    }

    void row(double t, const std::string& label, int index, double value) {
        os_ << num(t) << ',' << label << ',' << index << ',' << num(value) << '\n';
    }
    void row(double t, const std::string& label, int index, double value, double se) {
        os_ << num(t) << ',' << label << ',' << index << ',' << num(value) << ',' << num(se) << '\n';
    }

private:
    std::ostream& os_;
    bool err_;
};

inline void write_ensemble_csv(std::ostream& os, const TrajectoryEnsemble& ens) {
    SeriesWriter w(os, true);
    for (std::size_t ti = 0; ti < ens.t_grid.size(); ++ti)
        for (const auto& tr : ens.traces) w.row(ens.t_grid[ti], tr.label, tr.index, tr.mean[ti], tr.stderr_[ti]);
}

inline void write_snapshots(std::ostream& os, const TrajectoryEnsemble& ens, int n_sites) {
    for (std::size_t ti = 0; ti < ens.snapshots.size(); ++ti) {
        os << "# t=" << num(ens.t_grid[ti]) << '\n';
        for (SpinWord s : ens.snapshots[ti]) os << to_bitstring(s, n_sites) << '\n';
    }
}

inline void write_postselect_csv(std::ostream& os, const std::vector<double>& t, const std::vector<PostselectBin>& bins,
                                 bool pinned) {
    os << "t,total,accepted,fraction,fraction_err,bond,density_a,density_a_err,density_b,density_b_err\n";
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const auto& b = bins[i];
        for (std::size_t k = 0; k < b.density_a.size(); ++k) {
            os << num(t[i]) << ',' << b.total << ',' << b.accepted << ',' << num(b.fraction) << ','
               << num(b.fraction_err) << ',' << first_bond(pinned) + static_cast<int>(k) << ',' << num(b.density_a[k])
               << ',' << num(b.density_a_err[k]) << ',' << num(b.density_b[k]) << ',' << num(b.density_b_err[k])
               << '\n';
        }
    }
}

inline void write_scan_csv(std::ostream& points, std::ostream& sectors, const ScanResult& res) {
    points << "h_z,G,g,best_q,energy,n_ph\n";
    sectors << "h_z,G,q,energy\n";
    for (const auto& p : res.points) {
        const double G = p.params.g * std::sqrt(static_cast<double>(p.params.N));
        points << num(p.params.h_z) << ',' << num(G) << ',' << num(p.params.g) << ',' << p.best_q << ','
               << num(p.energy) << ',' << num(p.photon_number) << '\n';
        for (const auto& [q, e] : p.sector_energies)
            sectors << num(p.params.h_z) << ',' << num(G) << ',' << q << ',' << num(e) << '\n';
    }
}

// --- metadata ---------------------------------------------------------------

[[nodiscard]] inline json to_json(const ModelParams& p) {
    return {{"N", p.N},
            {"delta", p.delta},
            {"h_z", p.h_z},
            {"V", p.V},
            {"g", p.g},
            {"G", p.g * std::sqrt(static_cast<double>(p.N))},
            {"lambda", p.lambda},
            {"h_x", p.h_x},
            {"range", p.range == Range::Nearest ? "nearest" : "power_law_6"},
            {"range_cutoff", p.range_cutoff},
            {"boundary", p.pinned() ? "rydberg_pinned" : "none"},
            {"n_max", p.n_max},
            {"hash", p.hash()}};
}

[[nodiscard]] inline json to_json(const RunConfig& c) {
    json obs = json::array();
    for (const auto& o : c.observables) obs.push_back({{"label", o.label()}, {"i", o.i}, {"j", o.j}});
    const auto& s = c.initial;
    return {{"model", to_json(c.model)},
            {"initial",
             {{"kind", to_string(s.kind)},
              {"position", s.position},
              {"r0", s.r0},
              {"n_ph", s.n_ph0},
              {"bits", to_bitstring(make_configuration(s, c.model), c.model.N)}}},
            {"losses", {{"kappa", c.losses.kappa}, {"gamma_at", c.losses.gamma_at}}},
            {"schedule",
             {{"t_max", c.schedule.t_max},
              {"n_save", c.schedule.n_save},
              {"n_traj", c.schedule.n_traj},
              {"seed", c.schedule.seed},
              {"snapshots_per_save", c.schedule.snapshots_per_save},
              {"tol", c.schedule.tol},
              {"max_krylov", c.schedule.max_krylov}}},
            {"observables", obs},
            {"postselect", {{"max_dw", c.max_dw}}},
            {"output", {{"dir", c.out_dir}, {"tag", c.tag}}},
            {"source", c.source}};
}

[[nodiscard]] inline json theory_json(const ModelParams& p) {
    json rates = json::array();
    for (const auto& r : theory::rates(p)) {
        json j = {{"name", r.name}, {"denominator", r.denominator}, {"validity", r.validity}};
        j["value"] = r.value ? json(*r.value) : json(nullptr);
        rates.push_back(j);
    }
    const auto tl = theory::two_level(p);
    return {{"rates", rates},
            {"meson_gap_a", theory::meson_gap(p, true)},
            {"meson_gap_b", theory::meson_gap(p, false)},
            {"two_level",
             {{"n_odd", tl.n_odd},
              {"coupling", tl.coupling},
              {"rabi_frequency", tl.rabi_frequency},
              {"amplitude_bound", tl.amplitude_bound},
              {"resonance_delta", tl.resonance_delta}}}};
}

[[nodiscard]] inline json metadata(const std::string& command, const RunConfig& c) {
    return {{"command", command},
            {"version", TCISING_VERSION},
            {"config", to_json(c)},
            {"theory", theory_json(c.model)},
            {"gauge_note", "g is stored as |g|; its sign is absorbed by a -> -a"},
            {"units", "energies and rates in units of V, times in 1/V"}};
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream os(path);
    TCISING_REQUIRE(os.good(), ErrorCode::ConfigError, "cannot write " + path);
    os << j.dump(2) << '\n';
}

}  // namespace tcising::cli
