// SPDX-License-Identifier: Apache-2.0

/**
 * @file basis.hpp
 * @brief Hybrid photon (x) spin basis, globally or restricted to U(1) charge sectors.
 *
 * A basis state is a pair (photon Fock number, spin word). Bit j of the spin
 * word is 1 when site j is up (Rydberg). The conserved charge is
 * Q = n_ph + popcount(spins).
 *
 * Ordering inside a charge sector is photon-major, then spin word ascending,
 * so every photon block is contiguous. A band (direct sum of sectors) stacks
 * the sectors by descending Q.
 */

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tcising/error.hpp"

namespace tcising {

using SpinWord = std::uint32_t;

inline constexpr int kMaxSites = 30;

struct BasisState {
    int n_ph = 0;
    SpinWord spins = 0;

    friend auto operator<=>(const BasisState&, const BasisState&) = default;
};

[[nodiscard]] constexpr int popcount(SpinWord s) noexcept { return std::popcount(s); }

[[nodiscard]] constexpr bool spin_up(SpinWord s, int site) noexcept { return (s >> site) & 1U; }

[[nodiscard]] constexpr SpinWord site_mask(int n_sites) noexcept {
    return n_sites >= 32 ? ~SpinWord{0} : ((SpinWord{1} << n_sites) - 1U);
}

[[nodiscard]] constexpr int charge_of(const BasisState& s) noexcept {
    return s.n_ph + popcount(s.spins);
}

/// Bitstring with site 0 first, '1' = up.
[[nodiscard]] inline std::string to_bitstring(SpinWord s, int n_sites) {
    std::string out(static_cast<std::size_t>(n_sites), '0');
    for (int j = 0; j < n_sites; ++j)
        if (spin_up(s, j)) out[static_cast<std::size_t>(j)] = '1';
    return out;
}

[[nodiscard]] inline SpinWord from_bitstring(const std::string& bits) {
    TCISING_REQUIRE(!bits.empty() && bits.size() <= kMaxSites, ErrorCode::BeyondCapacity,
                    "bitstring length must be in [1, 30]");
    SpinWord s = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        TCISING_REQUIRE(bits[j] == '0' || bits[j] == '1', ErrorCode::InvalidArgument,
                        "bitstring may only contain 0 and 1");
        if (bits[j] == '1') s |= SpinWord{1} << j;
    }
    return s;
}

namespace detail {

/// Pascal table C(n, k) for n, k <= kMaxSites.
struct BinomialTable {
    std::array<std::array<std::uint64_t, kMaxSites + 2>, kMaxSites + 2> c{};
    constexpr BinomialTable() {
        for (int n = 0; n <= kMaxSites + 1; ++n) {
            c[n][0] = 1;
            for (int k = 1; k <= n; ++k) c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0);
        }
    }
};

inline constexpr BinomialTable kBinomial{};

/// Rank of a fixed-popcount word in ascending numeric order (colex rank).
[[nodiscard]] constexpr std::uint64_t colex_rank(SpinWord s) noexcept {
    std::uint64_t rank = 0;
    int i = 1;
    while (s) {
        const int p = std::countr_zero(s);
        rank += kBinomial.c[p][i];
        s &= s - 1;
        ++i;
    }
    return rank;
}

/// Next word with the same popcount (Gosper's hack).
[[nodiscard]] constexpr SpinWord next_same_popcount(SpinWord v) noexcept {
    const SpinWord t = v | (v - 1);
    return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace detail

[[nodiscard]] constexpr std::uint64_t binomial(int n, int k) noexcept {
    if (k < 0 || n < 0 || k > n) return 0;
    return detail::kBinomial.c[n][k];
}

/**
 * Ordered basis of (photon, spin) product states.
 *
 * Three flavours share one representation: a single charge sector, a band of
 * consecutive sectors, and the full truncated space (charge() == nullopt).
 * Lookup is O(popcount) via combinatorial ranking, no hash table.
 */
class SectorBasis {
public:
    /// Single charge sector Q.
    static SectorBasis sector(int n_sites, int charge, int n_max) {
        return band(n_sites, charge, charge, n_max);
    }

    /// Direct sum of sectors q_min..q_max, blocks ordered by descending Q.
    static SectorBasis band(int n_sites, int q_min, int q_max, int n_max) {
        validate_common(n_sites, n_max);
        TCISING_REQUIRE(q_min >= 0 && q_min <= q_max, ErrorCode::InvalidArgument,
                        "band requires 0 <= q_min <= q_max");
        SectorBasis b;
        b.n_sites_ = n_sites;
        b.n_max_ = n_max;
        b.full_ = false;
        b.q_min_ = q_min;
        b.q_max_ = q_max;
        for (int q = q_max; q >= q_min; --q) {
            Block blk;
            blk.charge = q;
            blk.offset = b.states_.size();
            blk.n_lo = std::max(0, q - n_sites);
            blk.n_hi = std::min(q, n_max);
            std::size_t off = blk.offset;
            blk.photon_offset.assign(static_cast<std::size_t>(n_max) + 1, off);
            for (int n = 0; n <= n_max; ++n) {
                blk.photon_offset[static_cast<std::size_t>(n)] = off;
                if (n >= blk.n_lo && n <= blk.n_hi) off += binomial(n_sites, q - n);
            }
            for (int n = blk.n_lo; n <= blk.n_hi; ++n) append_words(b.states_, n_sites, q - n, n);
            blk.size = b.states_.size() - blk.offset;
            b.blocks_.push_back(std::move(blk));
        }
        TCISING_REQUIRE(!b.states_.empty(), ErrorCode::EmptySector,
                        "no state has charge in [" + std::to_string(q_min) + ", " + std::to_string(q_max) +
                            "] with N=" + std::to_string(n_sites) + ", n_max=" + std::to_string(n_max));
        return b;
    }

    /// Full truncated space, photon-major then spin word ascending.
    static SectorBasis full(int n_sites, int n_max) {
        validate_common(n_sites, n_max);
        SectorBasis b;
        b.n_sites_ = n_sites;
        b.n_max_ = n_max;
        b.full_ = true;
        b.q_min_ = 0;
        b.q_max_ = n_sites + n_max;
        const std::size_t words = std::size_t{1} << n_sites;
        b.states_.reserve(words * static_cast<std::size_t>(n_max + 1));
        for (int n = 0; n <= n_max; ++n)
            for (std::size_t s = 0; s < words; ++s) b.states_.push_back({n, static_cast<SpinWord>(s)});
        return b;
    }

    [[nodiscard]] int sites() const noexcept { return n_sites_; }
    [[nodiscard]] int n_max() const noexcept { return n_max_; }
    [[nodiscard]] std::size_t size() const noexcept { return states_.size(); }
    [[nodiscard]] bool is_full_space() const noexcept { return full_; }
    [[nodiscard]] int q_min() const noexcept { return q_min_; }
    [[nodiscard]] int q_max() const noexcept { return q_max_; }

    /// Fixed charge, or nullopt for bands spanning several sectors and the full space.
    [[nodiscard]] std::optional<int> charge() const noexcept {
        if (!full_ && q_min_ == q_max_) return q_min_;
        return std::nullopt;
    }

    [[nodiscard]] bool admits_charge(int q) const noexcept {
        if (full_) return q >= 0 && q <= n_sites_ + n_max_;
        return q >= q_min_ && q <= q_max_;
    }

    [[nodiscard]] const BasisState& operator[](std::size_t k) const { return states_[k]; }
    [[nodiscard]] const std::vector<BasisState>& states() const noexcept { return states_; }

    /// Block offsets of a band, one entry per charge in descending order.
    struct BlockInfo {
        int charge;
        std::size_t offset;
        std::size_t size;
    };
    [[nodiscard]] std::vector<BlockInfo> blocks() const {
        std::vector<BlockInfo> out;
        for (const auto& b : blocks_) out.push_back({b.charge, b.offset, b.size});
        return out;
    }

    /// Position of a state, nullopt if it is not part of this basis.
    [[nodiscard]] std::optional<std::size_t> find(const BasisState& s) const noexcept {
        if (s.n_ph < 0 || s.n_ph > n_max_ || (s.spins & ~site_mask(n_sites_)) != 0) return std::nullopt;
        if (full_) return static_cast<std::size_t>(s.n_ph) * (std::size_t{1} << n_sites_) + s.spins;
        const int q = charge_of(s);
        if (q < q_min_ || q > q_max_) return std::nullopt;
        const Block& blk = blocks_[static_cast<std::size_t>(q_max_ - q)];
        if (s.n_ph < blk.n_lo || s.n_ph > blk.n_hi) return std::nullopt;
        return blk.photon_offset[static_cast<std::size_t>(s.n_ph)] + detail::colex_rank(s.spins);
    }

    [[nodiscard]] std::size_t index(const BasisState& s) const {
        auto k = find(s);
        TCISING_REQUIRE(k.has_value(), ErrorCode::SectorMismatch, "state not in basis");
        return *k;
    }

private:
    struct Block {
        int charge = 0;
        std::size_t offset = 0;
        std::size_t size = 0;
        int n_lo = 0;
        int n_hi = -1;
        std::vector<std::size_t> photon_offset;
    };

    static void validate_common(int n_sites, int n_max) {
        TCISING_REQUIRE(n_sites <= kMaxSites, ErrorCode::BeyondCapacity,
                        "at most 30 sites fit in a spin word, got " + std::to_string(n_sites));
        TCISING_REQUIRE(n_sites >= 1, ErrorCode::InvalidArgument, "need at least one site");
        TCISING_REQUIRE(n_max >= 0, ErrorCode::InvalidArgument, "photon cutoff must be >= 0");
    }

    static void append_words(std::vector<BasisState>& out, int n_sites, int k, int n_ph) {
        if (k < 0 || k > n_sites) return;
        if (k == 0) {
            out.push_back({n_ph, 0});
            return;
        }
        const SpinWord last = ((SpinWord{1} << k) - 1U) << (n_sites - k);
        for (SpinWord w = (SpinWord{1} << k) - 1U;; w = detail::next_same_popcount(w)) {
            out.push_back({n_ph, w});
            if (w == last) break;
        }
    }

    int n_sites_ = 0;
    int n_max_ = 0;
    bool full_ = false;
    int q_min_ = 0;
    int q_max_ = 0;
    std::vector<BasisState> states_;
    std::vector<Block> blocks_;
};

/// Closed-form sector dimension, sum_n C(N, Q-n) over admissible photon numbers.
[[nodiscard]] constexpr std::uint64_t sector_dimension(int n_sites, int charge, int n_max) noexcept {
    std::uint64_t d = 0;
    for (int n = 0; n <= std::min(charge, n_max); ++n) d += binomial(n_sites, charge - n);
    return d;
}

}  // namespace tcising
