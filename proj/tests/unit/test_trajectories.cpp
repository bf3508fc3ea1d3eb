// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "tcising/dynamics.hpp"
#include "tcising/lindblad.hpp"
#include "tcising/trajectories.hpp"

using namespace tcising;

namespace {

struct Lossy {
    ModelParams p;
    LossRates loss;
    std::shared_ptr<const SectorBasis> band;
    SparseOperator h;
    std::vector<JumpOperator> jumps;
    QuantumState psi0;
    TrajectoryOptions opt;
};

Lossy lossy(int n, double kappa, double gamma, int q_floor = 0) {
    Lossy s;
    s.p.N = n;
    s.p.g = 0.3;
    s.p.delta = 0.2;
    s.loss = {kappa, gamma};
    InitialStateSpec st;
    st.kind = StateKind::SingleDwA;
    st.position = 0;
    st.n_ph0 = 1;
    const int q0 = initial_charge(st, s.p);
    s.band = make_band(s.p, std::min(q_floor, q0), q0);
    s.h = build_hamiltonian(s.p, s.band);
    s.jumps = build_jump_operators(s.p, s.loss, s.band);
    s.psi0 = make_state(st, s.p, s.band);
    s.opt.loss_diagonal = loss_diagonal(s.loss, *s.band);
    return s;
}

std::vector<double> grid(int n, double dt) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(dt * i);
    return t;
}

}  // namespace

TEST(Trajectories, WithoutLossesEveryTrajectoryIsTheUnitaryOne) {
    auto s = lossy(4, 0.0, 0.0);
    s.jumps.clear();
    s.opt.loss_diagonal.clear();
    const auto ts = grid(8, 1.0);
    const auto ens = trajectories(s.h, s.jumps, s.psi0, ts, 5, 1, {{ObservableKind::NPh}}, s.opt);
    const auto ref = evolve(s.h, s.psi0, ts);
    ASSERT_EQ(ens.traces.size(), 1u);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        EXPECT_NEAR(ens.traces[0].mean[i], photon_number(ref[i]), 1e-7);
        EXPECT_NEAR(ens.traces[0].stderr_[i], 0.0, 1e-7);
    }
    EXPECT_TRUE(ens.jump_log.empty());
}

TEST(Trajectories, EnsembleAgreesWithLindblad) {
    const auto s = lossy(3, 0.1, 0.05);
    const auto ts = grid(8, 2.0);
    const std::vector<ObservableSpec> obs{{ObservableKind::NPh}, {ObservableKind::Charge}};
    const std::size_t n = 2000;
    const auto ens = trajectories(s.h, s.jumps, s.psi0, ts, n, 7, obs, s.opt);
    const auto rho = lindblad_dense(s.h, s.jumps, DensityMatrix::pure(s.psi0), ts);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double a = photon_number(rho[i]);
        const double q = charge(rho[i]);
        EXPECT_LT(std::abs(ens.traces[0].mean[i] - a), 5.0 * std::max(ens.traces[0].stderr_[i], 1.0 / n)) << ts[i];
        EXPECT_LT(std::abs(ens.traces[1].mean[i] - q), 5.0 * std::max(ens.traces[1].stderr_[i], 1.0 / n)) << ts[i];
    }
}

TEST(Trajectories, SingleAtomWaitingTimesAreExponential) {
    ModelParams p;
    p.N = 1;
    const LossRates loss{0.0, 0.2};
    const auto band = make_band(p, 0, 1);
    const auto h = build_hamiltonian(p, band);
    const auto jumps = build_jump_operators(p, loss, band);
    InitialStateSpec st;
    st.kind = StateKind::Custom;
    st.custom_bits = 1;
    const auto psi0 = make_state(st, p, band);
    TrajectoryOptions opt;
    opt.loss_diagonal = loss_diagonal(loss, *band);
    const std::size_t n = 4000;
    const auto ens = trajectories(h, jumps, psi0, {0.0, 80.0}, n, 3, {{ObservableKind::NPh}}, opt);
    std::vector<double> times;
    for (const auto& j : ens.jump_log) times.push_back(j.t);
    ASSERT_GT(times.size(), n - 2);
    std::sort(times.begin(), times.end());
    // Kolmogorov-Smirnov distance against 1 - exp(-gamma t)
    double d = 0.0;
    const double m = static_cast<double>(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double cdf = 1.0 - std::exp(-0.2 * times[i]);
        d = std::max({d, std::abs(cdf - i / m), std::abs(cdf - (i + 1) / m)});
    }
    EXPECT_LT(d, 1.63 / std::sqrt(m));  // 1% critical value
}

TEST(Trajectories, ResultsDoNotDependOnThreadCount) {
    auto s = lossy(4, 0.1, 0.03);
    s.opt.block = 16;
    s.opt.snapshots_per_save = 3;
    const auto ts = grid(6, 2.0);
    const std::vector<ObservableSpec> obs{{ObservableKind::NPh}, {ObservableKind::DwA}};
    auto one = s.opt;
    one.threads = 1;
    auto three = s.opt;
    three.threads = 3;
    const auto a = trajectories(s.h, s.jumps, s.psi0, ts, 50, 11, obs, one);
    const auto b = trajectories(s.h, s.jumps, s.psi0, ts, 50, 11, obs, three);
    ASSERT_EQ(a.traces.size(), b.traces.size());
    for (std::size_t e = 0; e < a.traces.size(); ++e) {
        EXPECT_EQ(a.traces[e].mean, b.traces[e].mean);
        EXPECT_EQ(a.traces[e].stderr_, b.traces[e].stderr_);
    }
    EXPECT_EQ(a.snapshots, b.snapshots);
    ASSERT_EQ(a.jump_log.size(), b.jump_log.size());
    for (std::size_t k = 0; k < a.jump_log.size(); ++k) {
        EXPECT_EQ(a.jump_log[k].trajectory, b.jump_log[k].trajectory);
        EXPECT_EQ(a.jump_log[k].t, b.jump_log[k].t);
        EXPECT_EQ(a.jump_log[k].channel, b.jump_log[k].channel);
    }
}

TEST(Trajectories, DenseAndKrylovPathsAgree) {
    auto s = lossy(4, 0.1, 0.04);
    s.opt.tol = 1e-11;
    const auto ts = grid(5, 3.0);
    const std::vector<ObservableSpec> obs{{ObservableKind::NPh}, {ObservableKind::DwA}};
    auto dense = s.opt;
    auto krylov = s.opt;
    krylov.dense_limit = 0;
    const auto a = trajectories(s.h, s.jumps, s.psi0, ts, 40, 5, obs, dense);
    const auto b = trajectories(s.h, s.jumps, s.psi0, ts, 40, 5, obs, krylov);
    ASSERT_EQ(a.jump_log.size(), b.jump_log.size());
    for (std::size_t k = 0; k < a.jump_log.size(); ++k) {
        EXPECT_NEAR(a.jump_log[k].t, b.jump_log[k].t, 1e-6);
        EXPECT_EQ(a.jump_log[k].channel, b.jump_log[k].channel);
    }
    for (std::size_t e = 0; e < a.traces.size(); ++e)
        for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(a.traces[e].mean[i], b.traces[e].mean[i], 1e-6);
}

TEST(Trajectories, NarrowBandIsReported) {
    // band holds only the initial charge: every jump leaves it
    auto s = lossy(3, 0.2, 0.1, 99);
    try {
        (void)trajectories(s.h, s.jumps, s.psi0, grid(4, 5.0), 20, 1, {{ObservableKind::NPh}}, s.opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BandFloorExceeded);
    }
}

TEST(Trajectories, PureStateObservablesAreRejected) {
    const auto s = lossy(3, 0.1, 0.0);
    EXPECT_THROW((void)trajectories(s.h, s.jumps, s.psi0, grid(2, 1.0), 2, 1, {{ObservableKind::EntropyCut, 1}}, s.opt),
                 Error);
}
