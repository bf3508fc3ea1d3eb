// SPDX-License-Identifier: Apache-2.0

/**
 * @file measures.hpp
 * @brief Observables of hybrid states: projector densities, charge, photon
 *        number, string operator, entanglement entropies, post-selection.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tcising/basis.hpp"
#include "tcising/error.hpp"
#include "tcising/states.hpp"

namespace tcising {

enum class WallType { A, B };

namespace detail {

template <typename F>
void for_each_weight(const QuantumState& psi, F&& f) {
    const auto& b = *psi.basis;
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        const double w = std::norm(psi.amps[static_cast<Eigen::Index>(k)]);
        if (w != 0.0) f(b[k], w);
    }
}

template <typename F>
void for_each_weight(const DensityMatrix& rho, F&& f) {
    const auto& b = *rho.basis;
    for (std::size_t k = 0; k < rho.dim(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double w = rho.rho(i, i).real();
        if (w != 0.0) f(b[k], w);
    }
}

}  // namespace detail

/// <D_j> per bond; index i is bond first_bond(pinned) + i.
template <typename State>
[[nodiscard]] std::vector<double> dw_density(const State& psi, WallType type, bool pinned = false) {
    const int n = psi.basis->sites();
    const int first = first_bond(pinned);
    std::vector<double> out(static_cast<std::size_t>(std::max(0, bond_count(n, pinned))), 0.0);
    const int want = type == WallType::A ? 1 : -1;
    detail::for_each_weight(psi, [&](const BasisState& st, double w) {
        for (std::size_t i = 0; i < out.size(); ++i)
            if (wall_at(st.spins, n, first + static_cast<int>(i)) == want) out[i] += w;
    });
    return out;
}

struct MesonDensity {
    std::vector<double> per_site;  ///< boundary sites padded with zeros
    double number = 0.0;
};

/// <pi_j> = probability of three aligned spins centred on interior site j.
template <typename State>
[[nodiscard]] MesonDensity meson_density(const State& psi, WallType type) {
    const int n = psi.basis->sites();
    MesonDensity m;
    m.per_site.assign(static_cast<std::size_t>(n), 0.0);
    const bool up = type == WallType::A;
    detail::for_each_weight(psi, [&](const BasisState& st, double w) {
        for (int j = 1; j + 1 < n; ++j)
            if (spin_up(st.spins, j - 1) == up && spin_up(st.spins, j) == up && spin_up(st.spins, j + 1) == up)
                m.per_site[static_cast<std::size_t>(j)] += w;
    });
    for (double v : m.per_site) m.number += v;
    return m;
}

template <typename State>
[[nodiscard]] double photon_number(const State& psi) {
    double n = 0.0;
    detail::for_each_weight(psi, [&](const BasisState& st, double w) { n += w * st.n_ph; });
    return n;
}

template <typename State>
[[nodiscard]] double charge(const State& psi) {
    double q = 0.0;
    detail::for_each_weight(psi, [&](const BasisState& st, double w) { q += w * charge_of(st); });
    return q;
}

/// Population of the top Fock level, used to validate the cutoff.
template <typename State>
[[nodiscard]] double top_fock_population(const State& psi) {
    double p = 0.0;
    const int top = psi.basis->n_max();
    detail::for_each_weight(psi, [&](const BasisState& st, double w) {
        if (st.n_ph == top) p += w;
    });
    return p;
}

template <typename State>
[[nodiscard]] std::vector<double> sz_profile(const State& psi) {
    const int n = psi.basis->sites();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    detail::for_each_weight(psi, [&](const BasisState& st, double w) {
        for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] += spin_up(st.spins, j) ? w : -w;
    });
    return out;
}

/// <prod_{i<=l<=j} sx_l>
[[nodiscard]] inline double string_W(const QuantumState& psi, int i, int j) {
    const int n = psi.basis->sites();
    TCISING_REQUIRE(0 <= i && i <= j && j < n, ErrorCode::InvalidArgument, "string operator needs 0 <= i <= j < N");
    SpinWord mask = 0;
    for (int l = i; l <= j; ++l) mask |= SpinWord{1} << l;
    cplx acc = 0.0;
    const auto& b = *psi.basis;
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        const cplx a = psi.amps[static_cast<Eigen::Index>(k)];
        if (a == cplx{}) continue;
        if (auto m = b.find({b[k].n_ph, b[k].spins ^ mask}))
            acc += std::conj(psi.amps[static_cast<Eigen::Index>(*m)]) * a;
    }
    return acc.real();
}

/// Subsystem: a contiguous atom block [first, last] (empty if last < first), optionally plus the cavity.
struct Region {
    int first = 0;
    int last = -1;
    bool cavity = false;

    static Region atoms(int a, int b, bool with_cavity = false) { return {a, b, with_cavity}; }
    static Region cavity_only() { return {0, -1, true}; }
    [[nodiscard]] int atom_count() const noexcept { return last >= first ? last - first + 1 : 0; }
};

struct EntropyOptions {
    std::size_t max_reduced_dim = std::size_t{1} << 14;
    double eigen_floor = 1e-14;
};

/// Eigenvalues of the reduced density matrix of a pure state.
[[nodiscard]] inline Eigen::VectorXd reduced_spectrum(const QuantumState& psi, const Region& region,
                                                      const EntropyOptions& opt = {}) {
    const int n = psi.basis->sites();
    TCISING_REQUIRE(region.atom_count() == 0 || (region.first >= 0 && region.last < n), ErrorCode::InvalidArgument,
                    "region outside the chain");
    const int na = region.atom_count();
    const SpinWord amask = na > 0 ? (site_mask(na) << region.first) : 0;
    const auto& b = *psi.basis;

    auto keys = [&](const BasisState& st) {
        const std::uint64_t in_bits = (st.spins & amask) >> (na > 0 ? region.first : 0);
        const std::uint64_t out_bits = st.spins & ~amask;
        const std::uint64_t ph = static_cast<std::uint64_t>(st.n_ph);
        std::uint64_t row = in_bits, col = out_bits;
        if (region.cavity)
            row |= ph << 32;
        else
            col |= ph << 32;
        return std::pair{row, col};
    };

    std::unordered_map<std::uint64_t, Eigen::Index> rows, cols;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pos(psi.dim());
    for (std::size_t k = 0; k < psi.dim(); ++k) {
        const auto [r, c] = keys(b[k]);
        auto ri = rows.try_emplace(r, static_cast<Eigen::Index>(rows.size())).first->second;
        auto ci = cols.try_emplace(c, static_cast<Eigen::Index>(cols.size())).first->second;
        pos[k] = {ri, ci};
    }
    const std::size_t small = std::min(rows.size(), cols.size());
    TCISING_REQUIRE(small <= opt.max_reduced_dim, ErrorCode::DimTooLarge,
                    "reduced density matrix of size " + std::to_string(small) + " exceeds the limit");
    MatrixC m = MatrixC::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < psi.dim(); ++k) m(pos[k].first, pos[k].second) = psi.amps[static_cast<Eigen::Index>(k)];
    const MatrixC rho = rows.size() <= cols.size() ? MatrixC(m * m.adjoint()) : MatrixC(m.adjoint() * m);
    Eigen::SelfAdjointEigenSolver<MatrixC> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Von Neumann entropy in nats.
[[nodiscard]] inline double entropy(const QuantumState& psi, const Region& region, const EntropyOptions& opt = {}) {
    const Eigen::VectorXd p = reduced_spectrum(psi, region, opt);
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p[i] > opt.eigen_floor) s -= p[i] * std::log(p[i]);
    return s;
}

/// S(atoms 0..l-1) + S(atoms l..N-1) - S(cavity), for a pure global state.
[[nodiscard]] inline double mutual_information(const QuantumState& psi, int l, const EntropyOptions& opt = {}) {
    const int n = psi.basis->sites();
    TCISING_REQUIRE(l >= 1 && l <= n - 1, ErrorCode::InvalidArgument, "cut must satisfy 1 <= l <= N-1");
    return entropy(psi, Region::atoms(0, l - 1), opt) + entropy(psi, Region::atoms(l, n - 1), opt) -
           entropy(psi, Region::cavity_only(), opt);
}

/// Mean wall position of one configuration, nullopt without walls.
[[nodiscard]] inline std::optional<double> wall_centroid(SpinWord s, int n_sites, bool pinned) {
    double sum = 0.0;
    int count = 0;
    for (int bond = first_bond(pinned); bond < first_bond(pinned) + bond_count(n_sites, pinned); ++bond)
        if (wall_at(s, n_sites, bond) != 0) {
            sum += bond;
            ++count;
        }
    if (count == 0) return std::nullopt;
    return sum / count;
}

/// E|c - c0| over configurations, c = mean wall position of the configuration.
template <typename State>
[[nodiscard]] double wall_centroid_displacement(const State& psi, double c0, bool pinned = false) {
    const int n = psi.basis->sites();
    double acc = 0.0, weight = 0.0;
    detail::for_each_weight(psi, [&](const BasisState& st, double w) {
        if (auto c = wall_centroid(st.spins, n, pinned)) {
            acc += w * std::abs(*c - c0);
            weight += w;
        }
    });
    return weight > 0.0 ? acc / weight : 0.0;
}

/// Expected number of domain walls (A + B).
template <typename State>
[[nodiscard]] double wall_number(const State& psi, bool pinned = false) {
    const int n = psi.basis->sites();
    double acc = 0.0;
    detail::for_each_weight(psi, [&](const BasisState& st, double w) {
        acc += w * count_domain_walls(st.spins, n, pinned).total();
    });
    return acc;
}

struct PostselectBin {
    std::size_t total = 0;
    std::size_t accepted = 0;
    double fraction = 0.0;
    double fraction_err = 0.0;
    std::vector<double> density_a, density_a_err;
    std::vector<double> density_b, density_b_err;
    bool empty = false;  ///< EMPTY_ACCEPTANCE: nothing survived in this bin
};

/// Keep snapshots with at most max_dw walls; per-bond wall densities over the kept ones.
[[nodiscard]] inline std::vector<PostselectBin> postselect(const std::vector<std::vector<SpinWord>>& snapshots_per_time,
                                                           int n_sites, bool pinned, int max_dw) {
    std::vector<PostselectBin> out;
    const int nb = bond_count(n_sites, pinned);
    const int first = first_bond(pinned);
    for (const auto& snaps : snapshots_per_time) {
        PostselectBin bin;
        bin.total = snaps.size();
        std::vector<std::size_t> ca(static_cast<std::size_t>(nb), 0), cb(static_cast<std::size_t>(nb), 0);
        for (SpinWord s : snaps) {
            if (count_domain_walls(s, n_sites, pinned).total() > max_dw) continue;
            ++bin.accepted;
            for (int i = 0; i < nb; ++i) {
                const int w = wall_at(s, n_sites, first + i);
                if (w > 0) ++ca[static_cast<std::size_t>(i)];
                if (w < 0) ++cb[static_cast<std::size_t>(i)];
            }
        }
        if (bin.total > 0) {
            bin.fraction = static_cast<double>(bin.accepted) / static_cast<double>(bin.total);
            bin.fraction_err = std::sqrt(bin.fraction * (1.0 - bin.fraction) / static_cast<double>(bin.total));
        }
        bin.empty = bin.accepted == 0;
        auto fill = [&](const std::vector<std::size_t>& c, std::vector<double>& v, std::vector<double>& e) {
            v.assign(static_cast<std::size_t>(nb), 0.0);
            e.assign(static_cast<std::size_t>(nb), 0.0);
            if (bin.empty) return;
            const double n = static_cast<double>(bin.accepted);
            for (std::size_t i = 0; i < c.size(); ++i) {
                v[i] = static_cast<double>(c[i]) / n;
                e[i] = std::sqrt(v[i] * (1.0 - v[i]) / n);
            }
        };
        fill(ca, bin.density_a, bin.density_a_err);
        fill(cb, bin.density_b, bin.density_b_err);
        out.push_back(std::move(bin));
    }
    return out;
}

// --- observable specs -------------------------------------------------------

enum class ObservableKind {
    DwA, DwB, MesonA, MesonB, NPh, Charge, SzProfile, StringW, EntropyCut, MutualInfo, MesonNumber, WallNumber
};

struct ObservableSpec {
    ObservableKind kind = ObservableKind::NPh;
    int i = -1;  ///< site / cut argument, -1 = all
    int j = -1;

    [[nodiscard]] std::string label() const {
        switch (kind) {
            case ObservableKind::DwA: return "dw_a";
            case ObservableKind::DwB: return "dw_b";
            case ObservableKind::MesonA: return "meson_a";
            case ObservableKind::MesonB: return "meson_b";
            case ObservableKind::NPh: return "n_ph";
            case ObservableKind::Charge: return "charge";
            case ObservableKind::SzProfile: return "sz";
            case ObservableKind::StringW: return "string_w";
            case ObservableKind::EntropyCut: return "entropy";
            case ObservableKind::MutualInfo: return "mutual_info";
            case ObservableKind::MesonNumber: return i == 1 ? "meson_number_b" : "meson_number_a";
            case ObservableKind::WallNumber: return "wall_number";
        }
        return "unknown";
    }

    /// Whether the observable needs a pure state (entropies).
    [[nodiscard]] bool needs_pure_state() const noexcept {
        return kind == ObservableKind::EntropyCut || kind == ObservableKind::MutualInfo;
    }
};

struct ObservableValue {
    int index = 0;
    double value = 0.0;
};

/// Evaluate one spec; index is a bond, site or cut depending on the kind.
template <typename State>
[[nodiscard]] std::vector<ObservableValue> evaluate(const ObservableSpec& spec, const State& psi, bool pinned = false) {
    const int n = psi.basis->sites();
    if constexpr (!std::is_same_v<State, QuantumState>) {
        TCISING_REQUIRE(!spec.needs_pure_state() && spec.kind != ObservableKind::StringW, ErrorCode::InvalidArgument,
                        spec.label() + " is only defined for pure states");
    }
    std::vector<ObservableValue> out;
    auto bonds = [&](const std::vector<double>& v) {
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back({first_bond(pinned) + static_cast<int>(k), v[k]});
    };
    auto sites = [&](const std::vector<double>& v) {
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back({static_cast<int>(k), v[k]});
    };
    switch (spec.kind) {
        case ObservableKind::DwA: bonds(dw_density(psi, WallType::A, pinned)); break;
        case ObservableKind::DwB: bonds(dw_density(psi, WallType::B, pinned)); break;
        case ObservableKind::MesonA: sites(meson_density(psi, WallType::A).per_site); break;
        case ObservableKind::MesonB: sites(meson_density(psi, WallType::B).per_site); break;
        case ObservableKind::NPh: out.push_back({0, photon_number(psi)}); break;
        case ObservableKind::Charge: out.push_back({0, charge(psi)}); break;
        case ObservableKind::SzProfile: sites(sz_profile(psi)); break;
        case ObservableKind::StringW:
            if constexpr (std::is_same_v<State, QuantumState>) {
                const int a = spec.i < 0 ? 0 : spec.i;
                const int b = spec.j < 0 ? n - 1 : spec.j;
                out.push_back({b - a + 1, string_W(psi, a, b)});
            }
            break;
        case ObservableKind::EntropyCut:
            if constexpr (std::is_same_v<State, QuantumState>) {
                const bool cav = spec.j == 1;
                if (spec.i >= 0) {
                    out.push_back({spec.i, entropy(psi, Region::atoms(0, spec.i - 1, cav))});
                } else {
                    for (int l = cav ? 0 : 1; l <= n - 1; ++l)
                        out.push_back({l, entropy(psi, Region::atoms(0, l - 1, cav))});
                }
            }
            break;
        case ObservableKind::MutualInfo:
            if constexpr (std::is_same_v<State, QuantumState>) {
                if (spec.i >= 0) {
                    out.push_back({spec.i, mutual_information(psi, spec.i)});
                } else {
                    for (int l = 1; l <= n - 1; ++l) out.push_back({l, mutual_information(psi, l)});
                }
            }
            break;
        case ObservableKind::MesonNumber:
            out.push_back({0, meson_density(psi, spec.i == 1 ? WallType::B : WallType::A).number});
            break;
        case ObservableKind::WallNumber: out.push_back({0, wall_number(psi, pinned)}); break;
    }
    return out;
}

}  // namespace tcising
