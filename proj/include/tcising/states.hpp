// SPDX-License-Identifier: Apache-2.0

/**
 * @file states.hpp
 * @brief Classical initial states and configuration-level utilities.
 *
 * The reference antiferromagnet is the Neel configuration that minimises the
 * staggered field term: for h_z >= 0 the up spins sit on even sites, for
 * h_z < 0 on odd sites. All positions are absolute 0-indexed sites or bonds; bond b
 * joins sites b and b+1. With boundary pinning the virtual bonds -1 and N-1
 * join the chain ends to frozen up spins.
 */

#pragma once

#include <memory>
#include <string>
#include <utility>

#include "tcising/basis.hpp"
#include "tcising/error.hpp"
#include "tcising/model.hpp"
#include "tcising/sparse.hpp"

namespace tcising {

/// Complex amplitudes over a basis, at time t (units of 1/V).
struct QuantumState {
    std::shared_ptr<const SectorBasis> basis;
    VectorC amps;
    double t = 0.0;

    [[nodiscard]] double norm() const { return amps.norm(); }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(amps.size()); }
};

/// Density matrix over a basis (dense; small dimensions only).
struct DensityMatrix {
    std::shared_ptr<const SectorBasis> basis;
    MatrixC rho;
    double t = 0.0;

    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(rho.rows()); }
    [[nodiscard]] double trace() const { return rho.trace().real(); }

    [[nodiscard]] static DensityMatrix pure(const QuantumState& psi) {
        return {psi.basis, psi.amps * psi.amps.adjoint(), psi.t};
    }
};

enum class StateKind { Afm, SingleDwA, SingleDwB, MesonA, MesonB, String, Custom };

struct InitialStateSpec {
    StateKind kind = StateKind::Afm;
    int position = 0;  ///< bond for walls and strings (left wall), site for mesons
    int r0 = 0;        ///< STRING: flipped window length, equal to the wall separation in bonds
    int n_ph0 = 0;
    SpinWord custom_bits = 0;
};

[[nodiscard]] inline SpinWord reference_afm(int n_sites, double h_z) noexcept {
    SpinWord s = 0;
    const int first_up = h_z < 0.0 ? 1 : 0;
    for (int j = first_up; j < n_sites; j += 2) s |= SpinWord{1} << j;
    return s;
}

[[nodiscard]] inline SpinWord reference_afm(const ModelParams& p) noexcept { return reference_afm(p.N, p.h_z); }

struct WallCount {
    int a = 0;
    int b = 0;
    [[nodiscard]] int total() const noexcept { return a + b; }
    friend bool operator==(const WallCount&, const WallCount&) = default;
};

/// A = up-up bond, B = down-down bond; pinned chains add the two virtual bonds.
[[nodiscard]] inline WallCount count_domain_walls(SpinWord s, int n_sites, bool pinned = false) noexcept {
    WallCount c;
    for (int j = 0; j + 1 < n_sites; ++j) {
        const bool l = spin_up(s, j);
        const bool r = spin_up(s, j + 1);
        if (l && r) ++c.a;
        if (!l && !r) ++c.b;
    }
    if (pinned) {
        if (spin_up(s, 0)) ++c.a;
        if (spin_up(s, n_sites - 1)) ++c.a;
    }
    return c;
}

/// Bond range of the wall densities: [-1, N-1] when pinned, [0, N-2] otherwise.
[[nodiscard]] constexpr int first_bond(bool pinned) noexcept { return pinned ? -1 : 0; }
[[nodiscard]] constexpr int bond_count(int n_sites, bool pinned) noexcept { return n_sites - 1 + (pinned ? 2 : 0); }

/// Wall type on bond b (may be virtual): +1 = A, -1 = B, 0 = none.
[[nodiscard]] inline int wall_at(SpinWord s, int n_sites, int bond) noexcept {
    const bool l = bond < 0 ? true : spin_up(s, bond);
    const bool r = bond + 1 >= n_sites ? true : spin_up(s, bond + 1);
    if (l && r) return 1;
    if (!l && !r) return -1;
    return 0;
}

/// Configuration of a classical initial state (no photon part).
[[nodiscard]] inline SpinWord make_configuration(const InitialStateSpec& spec, const ModelParams& p) {
    const int n = p.N;
    const SpinWord afm = reference_afm(p);
    const bool pinned = p.pinned();
    switch (spec.kind) {
        case StateKind::Afm: return afm;
        case StateKind::Custom:
            TCISING_REQUIRE((spec.custom_bits & ~site_mask(n)) == 0, ErrorCode::InvalidArgument,
                            "custom bits exceed the chain");
            return spec.custom_bits;
        case StateKind::SingleDwA:
        case StateKind::SingleDwB: {
            const bool type_a = spec.kind == StateKind::SingleDwA;
            const int b = spec.position;
            const int lo = pinned ? -1 : 0;
            const int hi = pinned ? n - 1 : n - 2;
            TCISING_REQUIRE(b >= lo && b <= hi, ErrorCode::InvalidArgument, "wall bond outside the chain");
            TCISING_REQUIRE(type_a || (b >= 0 && b <= n - 2), ErrorCode::InvalidArgument,
                            "virtual bonds only host type-A walls");
            if (b >= 0) {
                TCISING_REQUIRE(spin_up(afm, b) == type_a, ErrorCode::BadParity,
                                "wall bond " + std::to_string(b) + " does not sit on a " +
                                    (type_a ? "up" : "down") + " site of the reference antiferromagnet");
            }
            // sites <= b alternate away from the wall, sites >= b+1 likewise
            SpinWord s = 0;
            for (int j = 0; j < n; ++j) {
                const int dist = j <= b ? b - j : j - b - 1;
                const bool up = (dist % 2 == 0) == type_a;
                if (up) s |= SpinWord{1} << j;
            }
            return s;
        }
        case StateKind::MesonA:
        case StateKind::MesonB: {
            const bool type_a = spec.kind == StateKind::MesonA;
            const int j = spec.position;
            const int lo = pinned ? 0 : 1;
            const int hi = pinned ? n - 1 : n - 2;
            TCISING_REQUIRE(j >= lo && j <= hi, ErrorCode::InvalidArgument, "meson site needs two neighbours");
            TCISING_REQUIRE(spin_up(afm, j) != type_a, ErrorCode::BadParity,
                            "meson site " + std::to_string(j) + " has the wrong sublattice for this type");
            return afm ^ (SpinWord{1} << j);
        }
        case StateKind::String: {
            const int b = spec.position;
            const int r0 = spec.r0;
            TCISING_REQUIRE(r0 >= 1 && r0 <= n - 3, ErrorCode::InvalidArgument, "string length must be in [1, N-3]");
            TCISING_REQUIRE(b >= 0 && b + r0 <= n - 2, ErrorCode::InvalidArgument,
                            "string window must be interior to the chain");
            SpinWord window = 0;
            for (int j = b + 1; j <= b + r0; ++j) window |= SpinWord{1} << j;
            return afm ^ window;
        }
    }
    return afm;
}

/// Unit-norm classical state with one nonzero amplitude.
[[nodiscard]] inline QuantumState make_state(const InitialStateSpec& spec, const ModelParams& p,
                                             std::shared_ptr<const SectorBasis> basis) {
    TCISING_REQUIRE(spec.n_ph0 >= 0, ErrorCode::InvalidArgument, "negative photon number");
    const BasisState st{spec.n_ph0, make_configuration(spec, p)};
    const auto k = basis->find(st);
    TCISING_REQUIRE(k.has_value(), ErrorCode::SectorMismatch,
                    "initial configuration has charge " + std::to_string(charge_of(st)) + " outside the basis");
    QuantumState psi;
    psi.basis = std::move(basis);
    psi.amps = VectorC::Zero(static_cast<Eigen::Index>(psi.basis->size()));
    psi.amps[static_cast<Eigen::Index>(*k)] = 1.0;
    return psi;
}

[[nodiscard]] inline int initial_charge(const InitialStateSpec& spec, const ModelParams& p) {
    return spec.n_ph0 + popcount(make_configuration(spec, p));
}

}  // namespace tcising
