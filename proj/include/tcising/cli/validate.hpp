// SPDX-License-Identifier: Apache-2.0

/**
 * @file validate.hpp
 * @brief Fast oracle suite behind the `validate` subcommand.
 */

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "tcising/dynamics.hpp"
#include "tcising/lindblad.hpp"
#include "tcising/measures.hpp"
#include "tcising/model.hpp"
#include "tcising/states.hpp"
#include "tcising/theory.hpp"
#include "tcising/trajectories.hpp"

namespace tcising::cli {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace oracle {

inline std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2e", x);
    return buf;
}

inline CheckResult sector_counts() {
    CheckResult r{"sector_counts", true, ""};
    std::size_t checked = 0;
    for (int n = 1; n <= 8; ++n)
        for (int n_max = 0; n_max <= 3; ++n_max)
            for (int q = 0; q <= n + n_max; ++q) {
                std::size_t brute = 0;
                for (int ph = 0; ph <= n_max; ++ph)
                    for (SpinWord s = 0; s < (SpinWord{1} << n); ++s)
                        if (charge_of({ph, s}) == q) ++brute;
                const auto formula = sector_dimension(n, q, n_max);
                std::size_t built = 0;
                if (brute > 0) built = SectorBasis::sector(n, q, n_max).size();
                if (formula != brute || built != brute) {
                    r.pass = false;
                    r.detail = "N=" + std::to_string(n) + " n_max=" + std::to_string(n_max) + " Q=" + std::to_string(q);
                    return r;
                }
                ++checked;
            }
    r.detail = std::to_string(checked) + " sectors exact";
    return r;
}

inline CheckResult krylov_vs_dense() {
    ModelParams p;
    p.N = 6;
    p.g = 0.37;
    p.delta = 0.8;
    p.h_z = 0.3;
    p.lambda = 0.05;
    InitialStateSpec s;
    s.kind = StateKind::SingleDwA;
    s.position = 2;
    const auto basis = make_sector(p, initial_charge(s, p));
    const auto h = build_hamiltonian(p, basis);
    const auto psi0 = make_state(s, p, basis);
    const std::vector<double> ts{0.5, 3.0, 17.0};
    const auto states = evolve(h, psi0, ts, {1e-12, 40});
    const MatrixC dense = h.matrix.to_dense().template cast<cplx>();
    double worst = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const MatrixC u = (cplx(0.0, -ts[i]) * dense).exp();
        worst = std::max(worst, (u * psi0.amps - states[i].amps).norm());
    }
    return {"krylov_vs_dense", worst < 1e-8, "max |psi_K - psi_exact| = " + sci(worst)};
}

inline CheckResult charge_conservation() {
    ModelParams p;
    p.N = 10;
    p.g = 0.12;
    p.delta = 1.0;
    InitialStateSpec s;
    s.kind = StateKind::SingleDwA;
    s.position = 4;
    const auto basis = make_sector(p, initial_charge(s, p));
    const auto h = build_hamiltonian(p, basis);
    const auto psi0 = make_state(s, p, basis);
    std::vector<double> ts;
    for (int i = 0; i <= 50; ++i) ts.push_back(2.0 * i);
    const auto states = evolve(h, psi0, ts);
    const double q0 = charge(psi0);
    const double e0 = std::real(psi0.amps.dot(h.matrix * psi0.amps));
    double dq = 0.0, de = 0.0, dn = 0.0;
    for (const auto& st : states) {
        dq = std::max(dq, std::abs(charge(st) - q0));
        de = std::max(de, std::abs(std::real(st.amps.dot(h.matrix * st.amps)) - e0));
        dn = std::max(dn, std::abs(st.norm() - 1.0));
    }
    const bool ok = dq < 1e-8 && de < 1e-8 && dn < 1e-8;
    return {"charge_conservation", ok, "dQ=" + sci(dq) + " dE=" + sci(de) + " dnorm=" + sci(dn)};
}

inline CheckResult trajectories_vs_lindblad() {
    ModelParams p;
    p.N = 3;
    p.g = 0.3;
    p.delta = 0.2;
    const LossRates loss{0.1, 0.05};
    InitialStateSpec s;
    s.kind = StateKind::SingleDwA;
    s.position = 0;
    s.n_ph0 = 1;
    const int q0 = initial_charge(s, p);
    const auto band = make_band(p, 0, q0);
    const auto h = build_hamiltonian(p, band);
    const auto jumps = build_jump_operators(p, loss, band);
    const auto psi0 = make_state(s, p, band);
    std::vector<double> ts;
    for (int i = 0; i <= 10; ++i) ts.push_back(1.5 * i);
    const auto rho = lindblad_dense(h, jumps, DensityMatrix::pure(psi0), ts);
    const std::vector<ObservableSpec> obs{{ObservableKind::NPh}, {ObservableKind::DwA}};
    TrajectoryOptions opt;
    opt.loss_diagonal = loss_diagonal(loss, *band);
    const std::size_t n_traj = 1000;
    const auto ens = trajectories(h, jumps, psi0, ts, n_traj, 2024, obs, opt);
    double worst = 0.0;
    for (std::size_t ti = 0; ti < ts.size(); ++ti) {
        std::size_t e = 0;
        for (const auto& o : obs)
            for (const auto& v : evaluate(o, rho[ti])) {
                const auto& tr = ens.traces[e++];
                const double se = std::max(tr.stderr_[ti], 1.0 / static_cast<double>(n_traj));
                worst = std::max(worst, std::abs(tr.mean[ti] - v.value) / se);
            }
    }
    return {"trajectories_vs_lindblad", worst < 5.0, "worst deviation " + sci(worst) + " standard errors"};
}

inline CheckResult loss_budget_numbers() {
    auto phys = PhysicalParams::blueprint();
    const auto main = theory::loss_budget(phys);
    phys.Gamma_r = 1.0e-3;
    const auto supp = theory::loss_budget(phys);
    const bool ok = std::abs(supp.gamma_over_g - 0.18125) < 1e-12 && std::abs(main.kappa2_over_g - 0.5) < 1e-12;
    return {"loss_budget", ok,
            "gamma_at/g=" + std::to_string(supp.gamma_over_g) + " (Gamma_r=1 kHz), " +
                std::to_string(main.gamma_over_g) + " (1.5 kHz); 2kappa/g=" + std::to_string(main.kappa2_over_g)};
}

}  // namespace oracle

[[nodiscard]] inline std::vector<CheckResult> run_validation() {
    const std::vector<std::function<CheckResult()>> checks{oracle::sector_counts, oracle::krylov_vs_dense,
                                                          oracle::charge_conservation, oracle::trajectories_vs_lindblad,
                                                          oracle::loss_budget_numbers};
    std::vector<CheckResult> out;
    for (const auto& c : checks) {
        const auto t0 = std::chrono::steady_clock::now();
        CheckResult r;
        try {
            r = c();
        } catch (const std::exception& e) {
            r.name = r.name.empty() ? "check" : r.name;
            r.pass = false;
            r.detail = e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace tcising::cli
