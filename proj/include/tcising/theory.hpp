// SPDX-License-Identifier: Apache-2.0

/**
 * @file theory.hpp
 * @brief Closed-form predictions: second-order hopping rates, the
 *        meson-polariton two-level model, the loss budget and the
 *        three-level versus two-level atom comparison. Also the small
 *        fitting helpers used to compare them against simulated traces.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tcising/error.hpp"
#include "tcising/lindblad.hpp"
#include "tcising/model.hpp"
#include "tcising/sparse.hpp"
#include "tcising/states.hpp"

namespace tcising::theory {

struct RatePrediction {
    std::string name;
    std::optional<double> value;  ///< empty when the denominator is resonant
    double denominator = 0.0;
    std::string validity;
};

namespace detail {

inline RatePrediction make_rate(std::string name, double g, double denom) {
    RatePrediction r;
    r.name = std::move(name);
    r.denominator = denom;
    if (std::abs(denom) < g || denom == 0.0) {
        r.validity = "resonant: |denominator| < g, second-order rate undefined";
    } else {
        r.value = g * g / std::abs(denom);
        r.validity = "valid for g << |denominator|";
    }
    return r;
}

}  // namespace detail

/// J_A = g^2/delta, J_B = g^2/(delta + 4V), J_s+- = g^2/(delta +- 2 h_z); magnitudes.
[[nodiscard]] inline std::vector<RatePrediction> rates(const ModelParams& p) {
    return {detail::make_rate("J_A", p.g, p.delta), detail::make_rate("J_B", p.g, p.delta + 4.0 * p.V),
            detail::make_rate("J_S_PLUS", p.g, p.delta + 2.0 * p.h_z),
            detail::make_rate("J_S_MINUS", p.g, p.delta - 2.0 * p.h_z)};
}

/// Single rate by name; RESONANT_DENOMINATOR if the formula is outside its regime.
[[nodiscard]] inline double rate(const ModelParams& p, const std::string& name) {
    for (const auto& r : rates(p)) {
        if (r.name != name) continue;
        if (!r.value) throw Error(ErrorCode::ResonantDenominator, name + ": " + r.validity);
        return *r.value;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown rate " + name);
}

/// Interior sites that host a type-A meson on the reference antiferromagnet.
[[nodiscard]] inline int meson_a_sites(const ModelParams& p) {
    const SpinWord afm = reference_afm(p);
    int count = 0;
    for (int j = 1; j + 1 < p.N; ++j)
        if (!spin_up(afm, j)) ++count;
    return count;
}

/// Classical energy cost of a bulk meson on the reference antiferromagnet.
[[nodiscard]] inline double meson_gap(const ModelParams& p, bool type_a = true) {
    ModelParams q = p;
    q.N = std::max(p.N, 41);
    q.boundary_field = BoundaryField::None;
    const SpinWord afm = reference_afm(q);
    int j = q.N / 2;
    if (spin_up(afm, j) == type_a) ++j;
    return classical_energy(q, afm ^ (SpinWord{1} << j), 0) - classical_energy(q, afm, 0);
}

struct TwoLevel {
    Eigen::Matrix2d matrix;
    int n_odd = 0;
    double coupling = 0.0;          ///< g sqrt(N_odd)
    double rabi_frequency = 0.0;    ///< generalized, angular
    double amplitude_bound = 0.0;   ///< max <n_ph> from a local meson start
    double resonance_delta = 0.0;   ///< delta at which the two levels cross
};

/// {|AFM, 1 photon>, |collective meson, 0 photons>} reduction.
[[nodiscard]] inline TwoLevel two_level(const ModelParams& p) {
    TwoLevel t;
    t.n_odd = meson_a_sites(p);
    const double gap = meson_gap(p, true);
    t.resonance_delta = gap;
    t.coupling = p.g * std::sqrt(static_cast<double>(t.n_odd));
    t.matrix << p.delta, t.coupling, t.coupling, gap;
    const double det = p.delta - gap;
    t.rabi_frequency = std::sqrt(det * det + 4.0 * t.coupling * t.coupling);
    t.amplitude_bound =
        t.rabi_frequency > 0.0 && t.n_odd > 0 ? 4.0 * p.g * p.g / (t.rabi_frequency * t.rabi_frequency) : 0.0;
    return t;
}

struct LossBudget {
    double g = 0.0;
    double gamma_r = 0.0;  ///< Rydberg decay at the requested principal number
    double gamma_at = 0.0;
    double gamma_over_g = 0.0;
    double kappa2_over_g = 0.0;
};

/// gamma_at = Gamma_r (70/n)^3 + Gamma_e (Omega/Delta)^2, with Gamma_r given at n = 70.
[[nodiscard]] inline LossBudget loss_budget(const PhysicalParams& phys, double n = 70.0) {
    TCISING_REQUIRE(phys.Delta != 0.0, ErrorCode::DivZero, "Delta must be nonzero");
    TCISING_REQUIRE(n > 0.0, ErrorCode::InvalidArgument, "principal number must be positive");
    LossBudget b;
    const double ratio = phys.Omega / phys.Delta;
    b.g = std::abs(phys.g0 * ratio);
    TCISING_REQUIRE(b.g != 0.0, ErrorCode::DivZero, "effective coupling g vanishes");
    b.gamma_r = phys.Gamma_r * std::pow(70.0 / n, 3);
    b.gamma_at = b.gamma_r + phys.Gamma_e * ratio * ratio;
    b.gamma_over_g = b.gamma_at / b.g;
    b.kappa2_over_g = 2.0 * phys.kappa / b.g;
    return b;
}

// --- single-atom three-level check ------------------------------------------

struct ThreeLevelResult {
    std::vector<double> t;
    std::vector<double> p_r_three;
    std::vector<double> p_r_two;
    double rydberg_detuning = 0.0;  ///< two-photon detuning placing |r,0> on resonance with |g,1>
    double g_eff = 0.0;
    double gamma_at = 0.0;
    double envelope_rel_diff = 0.0;  ///< max relative difference of matched local maxima
    int peaks_compared = 0;
};

namespace detail {

/// Levels g=0, e=1, r=2 times photon n in {0,1}; index = 3 n + level.
inline RealCsr three_level_h(const PhysicalParams& phys, double det_r) {
    std::vector<Triplet<double>> t;
    auto idx = [](int n, int level) { return static_cast<std::size_t>(3 * n + level); };
    for (int n = 0; n <= 1; ++n) {
        t.push_back({idx(n, 1), idx(n, 1), phys.Delta});
        t.push_back({idx(n, 2), idx(n, 2), det_r});
        t.push_back({idx(n, 1), idx(n, 2), phys.Omega});
        t.push_back({idx(n, 2), idx(n, 1), phys.Omega});
    }
    t.push_back({idx(1, 0), idx(0, 1), phys.g0});  // a^+ |g><e|
    t.push_back({idx(0, 1), idx(1, 0), phys.g0});
    return RealCsr(6, 6, std::move(t));
}

/// Splitting of the two states near zero energy in the {|g,1>, |e,0>, |r,0>} block.
inline double low_splitting(const PhysicalParams& phys, double det_r) {
    Eigen::Matrix3d m;
    m << 0.0, phys.g0, 0.0, phys.g0, phys.Delta, phys.Omega, 0.0, phys.Omega, det_r;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    Eigen::Vector3d ev = es.eigenvalues();
    std::sort(ev.data(), ev.data() + 3, [](double a, double b) { return std::abs(a) < std::abs(b); });
    return std::abs(ev[1] - ev[0]);
}

inline std::vector<std::pair<double, double>> local_maxima(const std::vector<double>& t, const std::vector<double>& y) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        if (y[i] > y[i - 1] && y[i] >= y[i + 1]) out.emplace_back(t[i], y[i]);
    return out;
}

}  // namespace detail

/**
 * Rydberg population after starting in |r, 0 photons>: full three-level atom
 * with Gamma_e and Gamma_r against the two-level atom with gamma_at.
 * Units follow the inputs (rates and times in matching units).
 */
[[nodiscard]] inline ThreeLevelResult three_level_check(const PhysicalParams& phys, const std::vector<double>& t_grid,
                                                        const LindbladOptions& opt = {}) {
    TCISING_REQUIRE(phys.Delta != 0.0, ErrorCode::DivZero, "Delta must be nonzero");
    ThreeLevelResult res;
    res.t = t_grid;
    const double ratio = phys.Omega / phys.Delta;
    res.g_eff = std::abs(phys.g0 * ratio);
    res.gamma_at = phys.Gamma_r + phys.Gamma_e * ratio * ratio;

    // golden-section search for the avoided crossing
    const double guess = (phys.Omega * phys.Omega - phys.g0 * phys.g0) / phys.Delta;
    double a = guess - 20.0 * res.g_eff - 1e-9, b = guess + 20.0 * res.g_eff + 1e-9;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double c = b - phi * (b - a), d = a + phi * (b - a);
        if (detail::low_splitting(phys, c) < detail::low_splitting(phys, d))
            b = d;
        else
            a = c;
    }
    res.rydberg_detuning = 0.5 * (a + b);

    {
        const RealCsr h = detail::three_level_h(phys, res.rydberg_detuning);
        std::vector<RealCsr> jumps;
        auto lower = [](std::size_t from_level, double rate) {
            std::vector<Triplet<double>> t;
            for (int n = 0; n <= 1; ++n)
                t.push_back({static_cast<std::size_t>(3 * n), static_cast<std::size_t>(3 * n) + from_level, std::sqrt(rate)});
            return RealCsr(6, 6, std::move(t));
        };
        if (phys.Gamma_e > 0.0) jumps.push_back(lower(1, phys.Gamma_e));
        if (phys.Gamma_r > 0.0) jumps.push_back(lower(2, phys.Gamma_r));
        MatrixC rho0 = MatrixC::Zero(6, 6);
        rho0(2, 2) = 1.0;
        for (const auto& r : lindblad_dense(h, jumps, rho0, t_grid, opt))
            res.p_r_three.push_back(r(2, 2).real() + r(5, 5).real());
    }
    {
        // levels g=0, r=1 times photon n in {0,1}; index = 2 n + level
        std::vector<Triplet<double>> t{{2, 1, res.g_eff}, {1, 2, res.g_eff}};
        const RealCsr h(4, 4, std::move(t));
        std::vector<RealCsr> jumps;
        if (res.gamma_at > 0.0)
            jumps.emplace_back(4, 4, std::vector<Triplet<double>>{{0, 1, std::sqrt(res.gamma_at)}, {2, 3, std::sqrt(res.gamma_at)}});
        MatrixC rho0 = MatrixC::Zero(4, 4);
        rho0(1, 1) = 1.0;
        for (const auto& r : lindblad_dense(h, jumps, rho0, t_grid, opt))
            res.p_r_two.push_back(r(1, 1).real() + r(3, 3).real());
    }

    const auto m3 = detail::local_maxima(res.t, res.p_r_three);
    const auto m2 = detail::local_maxima(res.t, res.p_r_two);
    const std::size_t k = std::min(m3.size(), m2.size());
    for (std::size_t i = 0; i < k; ++i) {
        const double ref = m2[i].second;
        if (ref <= 0.0) continue;
        res.envelope_rel_diff = std::max(res.envelope_rel_diff, std::abs(m3[i].second - ref) / ref);
        ++res.peaks_compared;
    }
    return res;
}

// --- fitting helpers --------------------------------------------------------

/// Angular frequency of the strongest Fourier component of y(t) in [w_lo, w_hi].
[[nodiscard]] inline double dominant_frequency(const std::vector<double>& t, const std::vector<double>& y, double w_lo,
                                               double w_hi, int n_grid = 4000) {
    TCISING_REQUIRE(t.size() == y.size() && t.size() > 2, ErrorCode::InvalidArgument, "need a sampled trace");
    TCISING_REQUIRE(w_hi > w_lo && w_lo >= 0.0, ErrorCode::InvalidArgument, "bad frequency window");
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    auto power = [&](double w) {
        cplx acc = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) acc += (y[i] - mean) * std::exp(cplx(0.0, -w * t[i]));
        return std::norm(acc);
    };
    double best_w = w_lo, best_p = -1.0;
    const double dw = (w_hi - w_lo) / n_grid;
    for (int i = 0; i <= n_grid; ++i) {
        const double w = w_lo + i * dw;
        const double pw = power(w);
        if (pw > best_p) {
            best_p = pw;
            best_w = w;
        }
    }
    // parabolic refinement
    if (best_w > w_lo && best_w < w_hi) {
        const double p0 = power(best_w - dw), p1 = best_p, p2 = power(best_w + dw);
        const double den = p0 - 2.0 * p1 + p2;
        if (den < 0.0) best_w += 0.5 * dw * (p0 - p2) / den;
    }
    return best_w;
}

struct ExpFit {
    double rate = 0.0;       ///< y ~ A exp(-rate t)
    double amplitude = 0.0;
};

/// Least-squares fit of log y against t over positive samples.
[[nodiscard]] inline ExpFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
        if (!(y[i] > 0.0)) continue;
        const double ly = std::log(y[i]);
        sx += t[i];
        sy += ly;
        sxx += t[i] * t[i];
        sxy += t[i] * ly;
        ++n;
    }
    TCISING_REQUIRE(n >= 2, ErrorCode::InvalidArgument, "exponential fit needs two positive samples");
    const double den = n * sxx - sx * sx;
    TCISING_REQUIRE(den != 0.0, ErrorCode::DivZero, "degenerate time samples");
    const double slope = (n * sxy - sx * sy) / den;
    ExpFit f;
    f.rate = -slope;
    f.amplitude = std::exp((sy - slope * sx) / n);
    return f;
}

}  // namespace tcising::theory
