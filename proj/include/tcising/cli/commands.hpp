// SPDX-License-Identifier: Apache-2.0

/**
 * @file commands.hpp
 * @brief ground-scan, quench and trajectories as library calls.
 *
 * Each command is a pure function of its RunConfig plus the output directory;
 * it writes <tag>.csv (and siblings) and a <tag>.json metadata record.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "tcising/cli/config.hpp"
#include "tcising/cli/output.hpp"
#include "tcising/dynamics.hpp"
#include "tcising/measures.hpp"
#include "tcising/model.hpp"
#include "tcising/states.hpp"
#include "tcising/trajectories.hpp"

namespace tcising::cli {

namespace fs = std::filesystem;

struct OutputPaths {
    fs::path dir;
    std::string tag;

    [[nodiscard]] std::string file(const std::string& suffix) const { return (dir / (tag + suffix)).string(); }
};

[[nodiscard]] inline OutputPaths prepare_output(const RunConfig& c) {
    OutputPaths p{c.out_dir, c.tag};
    std::error_code ec;
    fs::create_directories(p.dir, ec);
    TCISING_REQUIRE(!ec, ErrorCode::ConfigError, "cannot create output directory " + c.out_dir + ": " + ec.message());
    return p;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    TCISING_REQUIRE(os.good(), ErrorCode::ConfigError, "cannot write " + path);
    return os;
}

[[nodiscard]] inline std::vector<ObservableSpec> observables_or_default(const RunConfig& c) {
    if (!c.observables.empty()) return c.observables;
    return {{ObservableKind::DwA}, {ObservableKind::DwB}, {ObservableKind::NPh}};
}

/// Fixed-charge sector of the initial state, or the full space for the Ising comparison (h_x != 0).
[[nodiscard]] inline std::shared_ptr<const SectorBasis> quench_basis(const RunConfig& c) {
    const auto& p = c.model;
    if (p.h_x != 0.0) {
        const int n_max = p.n_max >= 0 ? p.n_max : c.initial.n_ph0;
        return std::make_shared<const SectorBasis>(SectorBasis::full(p.N, n_max));
    }
    return make_sector(p, initial_charge(c.initial, p));
}

// --- ground-scan ------------------------------------------------------------

[[nodiscard]] inline std::vector<ModelParams> scan_grid(const RunConfig& c) {
    std::vector<ModelParams> grid;
    const double root_n = std::sqrt(static_cast<double>(c.model.N));
    for (double hz : c.scan.h_z.values)
        for (double G : c.scan.G.values) {
            ModelParams p = c.model;
            p.h_z = hz;
            p.g = std::abs(G) / root_n;
            grid.push_back(p);
        }
    return grid;
}

inline ScanResult cmd_ground_scan(const RunConfig& c) {
    const auto out = prepare_output(c);
    const int q_max = c.scan.q_max >= 0 ? c.scan.q_max : 3 * c.model.N;
    const auto res = ground_scan(scan_grid(c), c.scan.q_min, q_max, c.scan.jump_factor);
    {
        auto pts = open_out(out.file(".csv"));
        auto sec = open_out(out.file("_sectors.csv"));
        write_scan_csv(pts, sec, res);
    }
    auto meta = metadata("ground-scan", c);
    meta["scan"] = {{"h_z", c.scan.h_z.values}, {"G", c.scan.G.values}, {"q_min", c.scan.q_min}, {"q_max", q_max},
                    {"jump_factor", c.scan.jump_factor}};
    json jumps = json::array();
    for (auto i : res.jumps) {
        const auto& a = res.points[i];
        const auto& b = res.points[i + 1];
        jumps.push_back({{"h_z", a.params.h_z},
                         {"G_before", a.params.g * std::sqrt(double(a.params.N))},
                         {"G_after", b.params.g * std::sqrt(double(b.params.N))},
                         {"q_before", a.best_q},
                         {"q_after", b.best_q},
                         {"n_ph_before", a.photon_number},
                         {"n_ph_after", b.photon_number}});
    }
    meta["photon_jumps"] = jumps;
    write_json(out.file(".json"), meta);
    return res;
}

// --- quench -----------------------------------------------------------------

struct QuenchSummary {
    std::size_t dim = 0;
    double max_norm_drift = 0.0;
    double max_charge_drift = 0.0;
    double max_energy_drift = 0.0;
};

inline QuenchSummary cmd_quench(const RunConfig& c) {
    TCISING_REQUIRE(c.losses.kappa == 0.0 && c.losses.gamma_at == 0.0, ErrorCode::ConfigError,
                    "quench is lossless; use the trajectories command for nonzero losses");
    const auto out = prepare_output(c);
    const auto basis = quench_basis(c);
    const auto h = build_hamiltonian(c.model, basis);
    const auto psi0 = make_state(c.initial, c.model, basis);
    const auto obs = observables_or_default(c);
    const bool pinned = c.model.pinned();

    EvolveOptions eo;
    eo.tol = c.schedule.tol;
    eo.max_krylov = c.schedule.max_krylov;
    const auto states = evolve(h, psi0, c.schedule.grid(), eo);

    QuenchSummary sum;
    sum.dim = basis->size();
    const double q0 = charge(psi0);
    const double e0 = std::real(psi0.amps.dot(h.matrix * psi0.amps));
    {
        auto os = open_out(out.file(".csv"));
        SeriesWriter w(os, false);
        for (const auto& psi : states) {
            for (const auto& o : obs)
                for (const auto& v : evaluate(o, psi, pinned)) w.row(psi.t, o.label(), v.index, v.value);
            sum.max_norm_drift = std::max(sum.max_norm_drift, std::abs(psi.norm() - 1.0));
            sum.max_charge_drift = std::max(sum.max_charge_drift, std::abs(charge(psi) - q0));
            const double e = std::real(psi.amps.dot(h.matrix * psi.amps));
            sum.max_energy_drift = std::max(sum.max_energy_drift, std::abs(e - e0));
        }
    }
    auto meta = metadata("quench", c);
    meta["basis"] = {{"dim", sum.dim}, {"charge", basis->charge() ? json(*basis->charge()) : json(nullptr)},
                     {"n_max", basis->n_max()}, {"cutoff_drops", h.cutoff_drops}};
    meta["conservation"] = {{"max_norm_drift", sum.max_norm_drift},
                            {"max_charge_drift", sum.max_charge_drift},
                            {"max_energy_drift", sum.max_energy_drift}};
    write_json(out.file(".json"), meta);
    return sum;
}

// --- trajectories -----------------------------------------------------------

inline TrajectoryEnsemble cmd_trajectories(const RunConfig& c) {
    TCISING_REQUIRE(c.schedule.n_traj > 0, ErrorCode::ConfigError, "schedule.n_traj must be > 0");
    TCISING_REQUIRE(c.model.h_x == 0.0, ErrorCode::ConfigError, "trajectories need the charge-conserving model (h_x = 0)");
    const auto out = prepare_output(c);
    const int q0 = initial_charge(c.initial, c.model);
    const auto band = make_loss_band(c.model, c.losses, q0, c.schedule.t_max);
    const auto h = build_hamiltonian(c.model, band);
    const auto jumps = build_jump_operators(c.model, c.losses, band);
    const auto psi0 = make_state(c.initial, c.model, band);
    const auto obs = observables_or_default(c);
    const bool pinned = c.model.pinned();

    TrajectoryOptions opt;
    opt.tol = c.schedule.tol;
    opt.max_krylov = c.schedule.max_krylov;
    opt.threads = c.schedule.threads;
    opt.pinned = pinned;
    opt.snapshots_per_save = c.schedule.snapshots_per_save;
    opt.loss_diagonal = loss_diagonal(c.losses, *band);
    const auto t_grid = c.schedule.grid();
    auto ens = trajectories(h, jumps, psi0, t_grid, c.schedule.n_traj, c.schedule.seed, obs, opt);

    {
        auto os = open_out(out.file(".csv"));
        write_ensemble_csv(os, ens);
    }
    json post = nullptr;
    if (opt.snapshots_per_save > 0) {
        {
            auto os = open_out(out.file("_snapshots.txt"));
            write_snapshots(os, ens, c.model.N);
        }
        const int max_dw = c.max_dw >= 0 ? c.max_dw
                                         : count_domain_walls(make_configuration(c.initial, c.model), c.model.N, pinned).total();
        const auto bins = postselect(ens.snapshots, c.model.N, pinned, max_dw);
        {
            auto os = open_out(out.file("_postselect.csv"));
            write_postselect_csv(os, t_grid, bins, pinned);
        }
        std::vector<double> tt, yy;
        std::size_t empty = 0;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            if (bins[i].empty) ++empty;
            if (t_grid[i] > 0.0) {
                tt.push_back(t_grid[i]);
                yy.push_back(bins[i].fraction);
            }
        }
        post = {{"max_dw", max_dw},
                {"empty_bins", empty},
                {"predicted_rate", c.losses.gamma_at * (popcount(make_configuration(c.initial, c.model)) - 1)}};
        if (tt.size() >= 2) {
            try {
                const auto fit = theory::fit_exponential(tt, yy);
                post["fitted_rate"] = fit.rate;
            } catch (const Error&) {
                post["fitted_rate"] = nullptr;
            }
        }
    }

    std::vector<std::size_t> per_channel(ens.channels.size(), 0);
    for (const auto& j : ens.jump_log) ++per_channel[static_cast<std::size_t>(j.channel)];
    json channels = json::array();
    for (std::size_t k = 0; k < ens.channels.size(); ++k)
        channels.push_back({{"label", ens.channels[k]}, {"jumps", per_channel[k]}});

    auto meta = metadata("trajectories", c);
    meta["band"] = {{"q_min", band->q_min()}, {"q_max", band->q_max()}, {"dim", band->size()}};
    meta["ensemble"] = {{"n_traj", ens.n_traj},
                        {"seed0", ens.seed0},
                        {"channels", channels},
                        {"mean_leak", ens.mean_leak},
                        {"max_leak", ens.max_leak}};
    meta["postselect"] = post;
    write_json(out.file(".json"), meta);
    return ens;
}

}  // namespace tcising::cli
