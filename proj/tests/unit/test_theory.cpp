// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "tcising/theory.hpp"

using namespace tcising;

TEST(Theory, RateFormulas) {
    ModelParams p;
    p.N = 10;
    p.g = 0.1;
    p.delta = 1.0;
    p.h_z = 0.2;
    EXPECT_NEAR(theory::rate(p, "J_A"), 0.01, 1e-15);
    EXPECT_NEAR(theory::rate(p, "J_B"), 0.01 / 5.0, 1e-15);
    EXPECT_NEAR(theory::rate(p, "J_S_PLUS"), 0.01 / 1.4, 1e-15);
    EXPECT_NEAR(theory::rate(p, "J_S_MINUS"), 0.01 / 0.6, 1e-15);
    EXPECT_THROW((void)theory::rate(p, "J_X"), Error);
}

TEST(Theory, ResonantDenominatorIsReported) {
    ModelParams p;
    p.N = 10;
    p.g = 0.1;
    p.delta = 0.0;
    const auto all = theory::rates(p);
    EXPECT_FALSE(all[0].value.has_value());
    EXPECT_TRUE(all[1].value.has_value());
    try {
        (void)theory::rate(p, "J_A");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ResonantDenominator);
    }
}

TEST(Theory, MesonGap) {
    ModelParams p;
    p.N = 13;
    p.h_z = 0.2;
    EXPECT_NEAR(theory::meson_gap(p, true), 4.4, 1e-12);
    p.h_z = -0.2;
    EXPECT_NEAR(theory::meson_gap(p, true), 4.4, 1e-12);
    p.h_z = 0.0;
    EXPECT_NEAR(theory::meson_gap(p, false), 4.0, 1e-12);
}

TEST(Theory, TwoLevelReduction) {
    ModelParams p;
    p.N = 13;
    p.g = 0.1;
    p.h_z = 0.2;
    p.delta = 4.4;
    const auto t = theory::two_level(p);
    EXPECT_EQ(t.n_odd, 6);
    EXPECT_NEAR(t.coupling, 0.1 * std::sqrt(6.0), 1e-15);
    EXPECT_NEAR(t.resonance_delta, 4.4, 1e-12);
    EXPECT_NEAR(t.rabi_frequency, 2.0 * t.coupling, 1e-12);
    EXPECT_NEAR(t.amplitude_bound, 1.0 / 6.0, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(t.matrix);
    EXPECT_NEAR(es.eigenvalues()[1] - es.eigenvalues()[0], t.rabi_frequency, 1e-12);
}

TEST(Theory, LossBudgetNumbers) {
    auto phys = PhysicalParams::blueprint();
    auto b = theory::loss_budget(phys);
    EXPECT_NEAR(b.g, 0.08, 1e-15);
    EXPECT_NEAR(b.gamma_over_g, 0.1875, 1e-12);
    EXPECT_NEAR(b.kappa2_over_g, 0.5, 1e-12);
    phys.Gamma_r = 1e-3;
    b = theory::loss_budget(phys);
    EXPECT_NEAR(b.gamma_over_g, 0.18125, 1e-12);
    // Rydberg decay scales as n^-3
    EXPECT_NEAR(theory::loss_budget(phys, 140.0).gamma_r, 1e-3 / 8.0, 1e-15);
    phys.Delta = 0.0;
    EXPECT_THROW((void)theory::loss_budget(phys), Error);
}

TEST(Theory, ExponentialFitIsExactOnExponentials) {
    std::vector<double> t, y;
    for (int i = 0; i < 50; ++i) {
        t.push_back(0.3 * i);
        y.push_back(2.5 * std::exp(-0.7 * t.back()));
    }
    y.push_back(0.0);  // ignored
    t.push_back(100.0);
    const auto f = theory::fit_exponential(t, y);
    EXPECT_NEAR(f.rate, 0.7, 1e-12);
    EXPECT_NEAR(f.amplitude, 2.5, 1e-12);
}

TEST(Theory, DominantFrequency) {
    std::vector<double> t, y;
    for (int i = 0; i < 2000; ++i) {
        t.push_back(0.05 * i);
        y.push_back(0.3 + std::cos(1.37 * t.back()) + 0.2 * std::sin(4.1 * t.back()));
    }
    EXPECT_NEAR(theory::dominant_frequency(t, y, 0.1, 3.0), 1.37, 2e-3);
    EXPECT_NEAR(theory::dominant_frequency(t, y, 3.0, 6.0), 4.1, 2e-3);
    EXPECT_THROW((void)theory::dominant_frequency(t, y, 3.0, 1.0), Error);
}

TEST(Theory, ThreeLevelAtomMatchesTwoLevelEnvelope) {
    const auto phys = PhysicalParams::blueprint();
    std::vector<double> grid;
    for (int i = 0; i <= 800; ++i) grid.push_back(0.25 * i);
    const auto r = theory::three_level_check(phys, grid);
    EXPECT_NEAR(r.g_eff, 0.08, 1e-15);
    EXPECT_NEAR(r.gamma_at, 0.015, 1e-15);
    ASSERT_EQ(r.p_r_three.size(), grid.size());
    EXPECT_NEAR(r.p_r_three.front(), 1.0, 1e-12);
    EXPECT_GE(r.peaks_compared, 2);
    EXPECT_LT(r.envelope_rel_diff, 0.1);
}
