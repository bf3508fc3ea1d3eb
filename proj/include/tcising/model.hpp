// SPDX-License-Identifier: Apache-2.0

/**
 * @file model.hpp
 * @brief Sparse Hamiltonians and jump operators of the Tavis-Cummings-Ising chain.
 *
 *   H = delta a^+a - h_z sum_j (-1)^j sz_j + V sum_j sz_j sz_{j+1}
 *       + g sum_j (a s+_j + a^+ s-_j) + lambda a^+a sum_j sz_j
 *       [+ h_x sum_j sx_j] [+ V (sz_0 + sz_{N-1})]
 *
 * Sites are 0-indexed, sz = +1 for an up (Rydberg) spin. The staggered
 * field is written for 0-indexed sites, so h_z > 0 favours up spins on
 * even sites (the sign of (-1)^j with sites counted from 1). The bracketed
 * terms are the Ising comparison field and the boundary pinning that mimics
 * a Rydberg atom frozen just outside each end of the chain.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "tcising/basis.hpp"
#include "tcising/error.hpp"
#include "tcising/sparse.hpp"

namespace tcising {

enum class Range { Nearest, PowerLaw6 };
enum class BoundaryField { None, RydbergPinned };

struct ModelParams {
    int N = 2;
    double delta = 0.0;
    double h_z = 0.0;
    double V = 1.0;
    double g = 0.0;  ///< stored as |g|; the sign is a gauge (a -> -a)
    double lambda = 0.0;
    Range range = Range::Nearest;
    int range_cutoff = 0;  ///< POWER_LAW_6 only: drop |i-j| > cutoff, 0 keeps every pair
    BoundaryField boundary_field = BoundaryField::None;
    double h_x = 0.0;
    int n_max = -1;  ///< -1 = take the cutoff of the basis passed to the builder

    [[nodiscard]] bool pinned() const noexcept { return boundary_field == BoundaryField::RydbergPinned; }

    void validate() const {
        TCISING_REQUIRE(N >= 1 && N <= kMaxSites, ErrorCode::BeyondCapacity, "N must be in [1, 30]");
        TCISING_REQUIRE(V > 0.0, ErrorCode::InvalidArgument, "V must be positive");
        TCISING_REQUIRE(!(g != 0.0 && h_x != 0.0), ErrorCode::InvalidArgument,
                        "g and h_x are mutually exclusive (TC-Ising vs Ising comparison)");
        TCISING_REQUIRE(range_cutoff >= 0, ErrorCode::InvalidArgument, "range_cutoff must be >= 0");
    }

    /// Canonical text form, used for hashing and metadata.
    [[nodiscard]] std::string canonical() const {
        std::ostringstream os;
        os.precision(17);
        os << "N=" << N << ";delta=" << delta << ";h_z=" << h_z << ";V=" << V << ";g=" << g << ";lambda=" << lambda
           << ";range=" << (range == Range::Nearest ? "nearest" : "power_law_6") << ";range_cutoff=" << range_cutoff
           << ";boundary=" << (pinned() ? "rydberg_pinned" : "none") << ";h_x=" << h_x << ";n_max=" << n_max;
        return os.str();
    }

    [[nodiscard]] std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
        for (unsigned char c : canonical()) h = (h ^ c) * 1099511628211ULL;
        return h;
    }
};

struct LossRates {
    double kappa = 0.0;     ///< cavity half-linewidth, photon jump rate 2 kappa
    double gamma_at = 0.0;  ///< per-atom Rydberg decay rate
};

/// Cavity, laser and atom parameters (angular frequencies, any consistent unit).
struct PhysicalParams {
    double g0 = 0.0;
    double Omega = 0.0;
    double Delta = 0.0;
    double delta0 = 0.0;
    double V_NN = 0.0;
    std::vector<double> w;  ///< per-site tweezer Stark shifts, empty = all zero
    double Gamma_e = 0.0;
    double Gamma_r = 0.0;
    double kappa = 0.0;

    /// Blueprint values, in units of 2 pi x MHz.
    static PhysicalParams blueprint() {
        PhysicalParams p;
        p.g0 = 0.8;
        p.Omega = 50.0;
        p.Delta = 500.0;
        p.Gamma_e = 1.35;
        p.Gamma_r = 1.5e-3;
        p.kappa = 0.02;
        return p;
    }
};

/// Hamiltonian or jump operator bound to the basis it acts on.
struct SparseOperator {
    std::shared_ptr<const SectorBasis> basis;
    RealCsr matrix;
    bool hermitian = false;
    std::string label;
    std::uint64_t params_hash = 0;
    std::size_t cutoff_drops = 0;      ///< a^+ amplitudes lost at the photon cutoff
    std::size_t band_floor_drops = 0;  ///< jump amplitudes lost below the band

    [[nodiscard]] std::size_t dim() const noexcept { return matrix.rows(); }

    template <typename In, typename Out>
    void apply(const In& x, Out& y) const {
        matrix.apply(x, y);
    }
};

struct JumpOperator {
    std::string label;
    int site = -1;  ///< -1 for the cavity channel
    SparseOperator op;
};

namespace detail {

[[nodiscard]] inline double sz(SpinWord s, int j) noexcept { return spin_up(s, j) ? 1.0 : -1.0; }

/// Sign of the staggered field on site j; negative on even sites so h_z > 0 lowers even-site up spins.
[[nodiscard]] inline double stagger(int j) noexcept { return (j % 2 == 0) ? -1.0 : 1.0; }

}  // namespace detail

/// Diagonal matrix element of H for the product state |n_ph, s>.
[[nodiscard]] inline double classical_energy(const ModelParams& p, SpinWord s, int n_ph) {
    double e = p.delta * n_ph;
    double mag = 0.0;
    for (int j = 0; j < p.N; ++j) {
        const double z = detail::sz(s, j);
        e += p.h_z * detail::stagger(j) * z;
        mag += z;
    }
    if (p.range == Range::Nearest) {
        for (int j = 0; j + 1 < p.N; ++j) e += p.V * detail::sz(s, j) * detail::sz(s, j + 1);
    } else {
        for (int i = 0; i < p.N; ++i)
            for (int j = i + 1; j < p.N; ++j) {
                const int r = j - i;
                if (p.range_cutoff > 0 && r > p.range_cutoff) break;
                e += p.V / std::pow(static_cast<double>(r), 6) * detail::sz(s, i) * detail::sz(s, j);
            }
    }
    e += p.lambda * n_ph * mag;
    if (p.pinned()) e += p.V * (detail::sz(s, 0) + detail::sz(s, p.N - 1));
    return e;
}

/**
 * Assemble H on the given basis.
 *
 * a^+ amplitudes that would exceed the photon cutoff are dropped and counted
 * in cutoff_drops; a valid run keeps that counter at zero.
 */
[[nodiscard]] inline SparseOperator build_hamiltonian(const ModelParams& p, std::shared_ptr<const SectorBasis> basis) {
    p.validate();
    TCISING_REQUIRE(basis != nullptr, ErrorCode::InvalidArgument, "null basis");
    TCISING_REQUIRE(basis->sites() == p.N, ErrorCode::SectorMismatch, "basis and model disagree on N");
    TCISING_REQUIRE(p.n_max < 0 || p.n_max == basis->n_max(), ErrorCode::SectorMismatch,
                    "basis and model disagree on n_max");
    TCISING_REQUIRE(p.h_x == 0.0 || basis->is_full_space(), ErrorCode::SectorMismatch,
                    "h_x breaks the U(1) charge; use the full-space basis");

    const SectorBasis& b = *basis;
    const int n_max = b.n_max();
    std::vector<Triplet<double>> t;
    t.reserve(b.size() * static_cast<std::size_t>(p.N + 1));
    std::size_t dropped = 0;
    for (std::size_t col = 0; col < b.size(); ++col) {
        const BasisState st = b[col];
        t.push_back({col, col, classical_energy(p, st.spins, st.n_ph)});
        for (int j = 0; j < p.N; ++j) {
            const SpinWord bit = SpinWord{1} << j;
            if (p.g != 0.0) {
                if (!(st.spins & bit) && st.n_ph > 0) {
                    // a s+_j
                    auto row = b.find({st.n_ph - 1, st.spins | bit});
                    if (row) t.push_back({*row, col, p.g * std::sqrt(static_cast<double>(st.n_ph))});
                } else if (st.spins & bit) {
                    // a^+ s-_j
                    if (st.n_ph + 1 > n_max) {
                        ++dropped;
                    } else if (auto row = b.find({st.n_ph + 1, st.spins & ~bit})) {
                        t.push_back({*row, col, p.g * std::sqrt(static_cast<double>(st.n_ph + 1))});
                    }
                }
            }
            if (p.h_x != 0.0) {
                auto row = b.find({st.n_ph, st.spins ^ bit});
                TCISING_REQUIRE(row.has_value(), ErrorCode::SectorMismatch, "h_x term leaves the basis");
                t.push_back({*row, col, p.h_x});
            }
        }
    }
    SparseOperator h;
    h.basis = std::move(basis);
    h.matrix = RealCsr(b.size(), b.size(), std::move(t));
    h.hermitian = true;
    h.label = "H";
    h.params_hash = p.hash();
    h.cutoff_drops = dropped;
    return h;
}

[[nodiscard]] inline SparseOperator build_hamiltonian(const ModelParams& p, const SectorBasis& basis) {
    return build_hamiltonian(p, std::make_shared<const SectorBasis>(basis));
}

/// Diagonal operator a^+a on a basis.
[[nodiscard]] inline SparseOperator build_photon_number(std::shared_ptr<const SectorBasis> basis) {
    std::vector<double> d(basis->size());
    for (std::size_t k = 0; k < basis->size(); ++k) d[k] = (*basis)[k].n_ph;
    SparseOperator op;
    op.matrix = RealCsr::diagonal(d);
    op.basis = std::move(basis);
    op.hermitian = true;
    op.label = "n_ph";
    return op;
}

/// sqrt(2 kappa) a and sqrt(gamma_at) s-_j on a band; each lowers Q by one.
[[nodiscard]] inline std::vector<JumpOperator> build_jump_operators(const ModelParams& p, const LossRates& rates,
                                                                    std::shared_ptr<const SectorBasis> basis) {
    TCISING_REQUIRE(rates.kappa >= 0.0 && rates.gamma_at >= 0.0, ErrorCode::InvalidArgument,
                    "loss rates must be non-negative");
    TCISING_REQUIRE(basis->sites() == p.N, ErrorCode::SectorMismatch, "basis and model disagree on N");
    const SectorBasis& b = *basis;
    std::vector<JumpOperator> out;

    auto finish = [&](std::string label, int site, std::vector<Triplet<double>> t, std::size_t dropped) {
        JumpOperator j;
        j.label = std::move(label);
        j.site = site;
        j.op.basis = basis;
        j.op.matrix = RealCsr(b.size(), b.size(), std::move(t));
        j.op.label = j.label;
        j.op.params_hash = p.hash();
        j.op.band_floor_drops = dropped;
        out.push_back(std::move(j));
    };

    if (rates.kappa > 0.0) {
        const double c = std::sqrt(2.0 * rates.kappa);
        std::vector<Triplet<double>> t;
        std::size_t dropped = 0;
        for (std::size_t col = 0; col < b.size(); ++col) {
            const BasisState st = b[col];
            if (st.n_ph == 0) continue;
            if (auto row = b.find({st.n_ph - 1, st.spins}))
                t.push_back({*row, col, c * std::sqrt(static_cast<double>(st.n_ph))});
            else
                ++dropped;
        }
        finish("photon_loss", -1, std::move(t), dropped);
    }
    if (rates.gamma_at > 0.0) {
        const double c = std::sqrt(rates.gamma_at);
        for (int j = 0; j < p.N; ++j) {
            const SpinWord bit = SpinWord{1} << j;
            std::vector<Triplet<double>> t;
            std::size_t dropped = 0;
            for (std::size_t col = 0; col < b.size(); ++col) {
                const BasisState st = b[col];
                if (!(st.spins & bit)) continue;
                if (auto row = b.find({st.n_ph, st.spins & ~bit}))
                    t.push_back({*row, col, c});
                else
                    ++dropped;
            }
            finish("atom_decay_" + std::to_string(j), j, std::move(t), dropped);
        }
    }
    return out;
}

/// Output of the physical -> effective parameter map.
struct EffectiveParams {
    ModelParams model;
    LossRates losses;
    std::vector<double> h_site;  ///< h_j = w_j + V_NN - Omega^2/Delta
    double uniform_field = 0.0;  ///< 1/2 mean(h_j), not part of ModelParams
    double g_signed = 0.0;       ///< -g0 Omega / Delta before the gauge choice
    double gamma_over_g = 0.0;
    double kappa2_over_g = 0.0;
    std::vector<std::string> warnings;
    std::string gauge_note = "sign of g absorbed by a -> -a; model.g holds |g|";
};

/**
 * Map cavity/laser/atom parameters to effective couplings.
 *
 * The effective spin Hamiltonian carries 1/2 h_j sz_j and V_NN/4 sz sz, so
 * model.h_z is half the staggered component of h_j and model.V = V_NN / 4.
 */
[[nodiscard]] inline EffectiveParams effective_params(const PhysicalParams& phys, int N) {
    TCISING_REQUIRE(phys.Delta != 0.0, ErrorCode::DivZero, "intermediate-state detuning Delta must be nonzero");
    TCISING_REQUIRE(phys.w.empty() || static_cast<int>(phys.w.size()) == N, ErrorCode::InvalidArgument,
                    "w must have one entry per site");
    EffectiveParams e;
    const double ratio = phys.Omega / phys.Delta;
    e.model.N = N;
    e.model.delta = phys.delta0 - N * phys.g0 * phys.g0 / (2.0 * phys.Delta);
    e.g_signed = -phys.g0 * ratio;
    e.model.g = std::abs(e.g_signed);
    e.model.lambda = phys.g0 * phys.g0 / (2.0 * phys.Delta);
    e.model.V = phys.V_NN / 4.0;
    if (e.model.V <= 0.0) {
        e.model.V = 1.0;
        e.warnings.push_back("V_NN <= 0: model.V left at the unit value 1");
    }

    double staggered = 0.0;
    double uniform = 0.0;
    e.h_site.resize(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        const double wj = phys.w.empty() ? 0.0 : phys.w[static_cast<std::size_t>(j)];
        const double h = wj + phys.V_NN - phys.Omega * phys.Omega / phys.Delta;
        e.h_site[static_cast<std::size_t>(j)] = h;
        staggered += detail::stagger(j) * h;
        uniform += h;
    }
    e.model.h_z = 0.5 * staggered / N;
    e.uniform_field = 0.5 * uniform / N;

    e.losses.kappa = phys.kappa;
    e.losses.gamma_at = phys.Gamma_r + phys.Gamma_e * ratio * ratio;
    if (e.model.g != 0.0) {
        e.gamma_over_g = e.losses.gamma_at / e.model.g;
        e.kappa2_over_g = 2.0 * phys.kappa / e.model.g;
    }
    if (std::abs(ratio) > 0.2)
        e.warnings.push_back("Omega/Delta > 0.2: adiabatic elimination of the intermediate state is unreliable");
    for (double wj : phys.w)
        if (std::abs(wj) > 0.2 * std::abs(phys.Delta))
            e.warnings.push_back("|w_j| not small against Delta: effective map is unreliable");
    return e;
}

/// Sector basis with n_max = Q unless the model pins a smaller cutoff; n_max = Q is exact.
[[nodiscard]] inline std::shared_ptr<const SectorBasis> make_sector(const ModelParams& p, int charge) {
    const int n_max = p.n_max >= 0 ? p.n_max : charge;
    return std::make_shared<const SectorBasis>(SectorBasis::sector(p.N, charge, n_max));
}

[[nodiscard]] inline std::shared_ptr<const SectorBasis> make_band(const ModelParams& p, int q_min, int q_max) {
    const int n_max = p.n_max >= 0 ? p.n_max : q_max;
    return std::make_shared<const SectorBasis>(SectorBasis::band(p.N, q_min, q_max, n_max));
}

/// Diagonal of sum_k L_k^+ L_k = 2 kappa n_ph + gamma_at n_up, including amplitude that leaves the band.
[[nodiscard]] inline std::vector<double> loss_diagonal(const LossRates& rates, const SectorBasis& basis) {
    std::vector<double> d(basis.size());
    for (std::size_t k = 0; k < basis.size(); ++k)
        d[k] = 2.0 * rates.kappa * basis[k].n_ph + rates.gamma_at * popcount(basis[k].spins);
    return d;
}

/// Band for a lossy run starting at charge q0: extends downward far enough for the expected number of jumps.
[[nodiscard]] inline std::shared_ptr<const SectorBasis> make_loss_band(const ModelParams& p, const LossRates& rates,
                                                                       int q0, double t_max) {
    const int depth = static_cast<int>(std::ceil((2.0 * rates.kappa + p.N * rates.gamma_at) * t_max * 2.0));
    return make_band(p, std::max(0, q0 - depth), q0);
}

/// Write "dim params_hash" header then "row col re im" per entry.
inline void write_triplets(std::ostream& os, const SparseOperator& op) {
    os << "# tcising-operator " << op.label << "\n";
    os << "dim " << op.dim() << " hash " << std::hex << op.params_hash << std::dec << " nnz " << op.matrix.nnz() << "\n";
    os.precision(17);
    for (const auto& t : op.matrix.triplets()) os << t.row << ' ' << t.col << ' ' << t.value << " 0\n";
}

}  // namespace tcising
