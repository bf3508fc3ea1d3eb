// SPDX-License-Identifier: Apache-2.0

/**
 * @file dynamics.hpp
 * @brief Ground states, unitary Krylov evolution and snapshot sampling.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "tcising/error.hpp"
#include "tcising/krylov.hpp"
#include "tcising/model.hpp"
#include "tcising/states.hpp"

namespace tcising {

/// Per-stream RNG derived from (seed0, stream index) so ensembles do not depend on scheduling.
[[nodiscard]] inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] inline std::mt19937_64 stream_rng(std::uint64_t seed0, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed0) ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

/// Uniform double in (0, 1), bit-exact across standard libraries.
[[nodiscard]] inline double uniform_open(std::mt19937_64& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

struct GroundState {
    double energy = 0.0;
    QuantumState state;
    double residual = 0.0;
};

/// Lowest eigenpair; residual ||H psi - E psi|| below 1e-9.
[[nodiscard]] inline GroundState ground_state(const SparseOperator& h, const krylov::LanczosOptions& opt = {}) {
    TCISING_REQUIRE(h.hermitian, ErrorCode::InvalidArgument, "ground_state needs a Hermitian operator");
    auto op = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { h.matrix.apply(x, y); };
    const auto r = krylov::lowest_eigenpair(op, static_cast<Eigen::Index>(h.dim()), opt);
    GroundState gs;
    gs.energy = r.value;
    gs.residual = r.residual;
    gs.state.basis = h.basis;
    gs.state.amps = r.vector.cast<cplx>();
    return gs;
}

struct ScanPoint {
    ModelParams params;
    int best_q = 0;
    double energy = 0.0;
    double photon_number = 0.0;
    std::vector<std::pair<int, double>> sector_energies;  ///< (Q, E_0(Q))
};

struct ScanResult {
    std::vector<ScanPoint> points;
    std::vector<std::size_t> jumps;  ///< i such that <n_ph> jumps between points i and i+1
};

/**
 * Lowest energy over charge sectors for each parameter point.
 *
 * A jump is flagged between neighbours with different winning charge whose
 * photon numbers differ by more than jump_factor times the largest neighbour
 * difference within a run of constant charge on either side. Pairs where
 * neither charge has such a run carry no reference scale and are not flagged.
 */
[[nodiscard]] inline ScanResult ground_scan(const std::vector<ModelParams>& grid, int q_min, int q_max,
                                            double jump_factor = 10.0, const krylov::LanczosOptions& opt = {}) {
    TCISING_REQUIRE(q_min <= q_max, ErrorCode::InvalidArgument, "empty charge range");
    ScanResult out;
    for (const auto& p : grid) {
        ScanPoint pt;
        pt.params = p;
        bool first = true;
        for (int q = q_min; q <= q_max; ++q) {
            auto basis = make_sector(p, q);
            const auto h = build_hamiltonian(p, basis);
            const auto gs = ground_state(h, opt);
            pt.sector_energies.emplace_back(q, gs.energy);
            if (first || gs.energy < pt.energy - 1e-12) {
                pt.energy = gs.energy;
                pt.best_q = q;
                double n = 0.0;
                for (std::size_t k = 0; k < gs.state.dim(); ++k)
                    n += std::norm(gs.state.amps[static_cast<Eigen::Index>(k)]) * (*basis)[k].n_ph;
                pt.photon_number = n;
                first = false;
            }
        }
        out.points.push_back(std::move(pt));
    }
    const auto& pts = out.points;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        if (pts[i].params.h_z != pts[i + 1].params.h_z) continue;  // row boundary of a 2D grid
        const double d = std::abs(pts[i + 1].photon_number - pts[i].photon_number);
        double within = 0.0;
        bool reference = false;
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            if (k == i || pts[k].params.h_z != pts[i].params.h_z || pts[k + 1].params.h_z != pts[i].params.h_z) continue;
            const bool same_side = (pts[k].best_q == pts[i].best_q && pts[k + 1].best_q == pts[i].best_q) ||
                                   (pts[k].best_q == pts[i + 1].best_q && pts[k + 1].best_q == pts[i + 1].best_q);
            if (same_side) {
                reference = true;
                within = std::max(within, std::abs(pts[k + 1].photon_number - pts[k].photon_number));
            }
        }
        if (pts[i].best_q != pts[i + 1].best_q && reference && d > jump_factor * within) out.jumps.push_back(i);
    }
    return out;
}

struct EvolveOptions {
    double tol = 1e-8;
    int max_krylov = 40;
};

/// psi(t) = exp(-i H (t - t0)) psi0 at each time of an ascending grid.
[[nodiscard]] inline std::vector<QuantumState> evolve(const SparseOperator& h, const QuantumState& psi0,
                                                      const std::vector<double>& t_grid,
                                                      const EvolveOptions& opt = {}) {
    TCISING_REQUIRE(psi0.dim() == h.dim(), ErrorCode::SectorMismatch, "state and Hamiltonian bases differ");
    krylov::PropagatorOptions popt;
    popt.tol = opt.tol;
    popt.max_dim = opt.max_krylov;
    popt.hermitian = h.hermitian;
    auto op = [&](const VectorC& x, VectorC& y) { h.matrix.apply(x, y); };

    std::vector<QuantumState> out;
    out.reserve(t_grid.size());
    QuantumState cur = psi0;
    double hint = 0.0;
    for (double t : t_grid) {
        TCISING_REQUIRE(t >= cur.t - 1e-12, ErrorCode::InvalidArgument, "time grid must be ascending");
        if (t > cur.t) krylov::propagate(op, cur.amps, t - cur.t, popt, &hint);
        cur.t = t;
        out.push_back(cur);
    }
    return out;
}

/// Probability of each spin configuration, photon register summed out.
[[nodiscard]] inline std::vector<std::pair<SpinWord, double>> configuration_probabilities(const QuantumState& psi) {
    std::vector<std::pair<SpinWord, double>> acc;
    acc.reserve(psi.dim());
    for (std::size_t k = 0; k < psi.dim(); ++k)
        acc.emplace_back((*psi.basis)[k].spins, std::norm(psi.amps[static_cast<Eigen::Index>(k)]));
    std::sort(acc.begin(), acc.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::pair<SpinWord, double>> out;
    for (const auto& [s, p] : acc) {
        if (!out.empty() && out.back().first == s)
            out.back().second += p;
        else
            out.emplace_back(s, p);
    }
    return out;
}

/// Born-rule samples of the spin register in the sz basis.
[[nodiscard]] inline std::vector<SpinWord> sample_snapshots(const QuantumState& psi, std::size_t n_samples,
                                                            std::mt19937_64& rng) {
    std::vector<double> cdf(psi.dim());
    double total = 0.0;
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        total += std::norm(psi.amps[static_cast<Eigen::Index>(k)]);
        cdf[k] = total;
    }
    TCISING_REQUIRE(total > 0.0, ErrorCode::InvalidArgument, "cannot sample a zero state");
    std::vector<SpinWord> out;
    out.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double u = uniform_open(rng) * total;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        out.push_back((*psi.basis)[static_cast<std::size_t>(it - cdf.begin())].spins);
    }
    return out;
}

}  // namespace tcising
