// SPDX-License-Identifier: Apache-2.0

/**
 * @file krylov.hpp
 * @brief Krylov-subspace kernels: restarted Lanczos for the lowest eigenpair
 *        and Arnoldi/Lanczos propagation of exp(-i H tau) psi.
 *
 * Operators are passed as callables `op(const Vec& x, Vec& y)` computing
 * y = H x, so the same code drives Hamiltonians and the non-Hermitian
 * trajectory generator.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <utility>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "tcising/error.hpp"
#include "tcising/sparse.hpp"

namespace tcising::krylov {

struct PropagatorOptions {
    double tol = 1e-8;   ///< per-step error estimate bound
    int max_dim = 40;    ///< Krylov dimension cap
    int min_dim = 4;
    bool hermitian = true;
};

/**
 * One Krylov step from a fixed start vector.
 *
 * build() grows the Arnoldi basis until the error estimate for the requested
 * step passes, halving the step if the dimension cap is reached. evaluate()
 * then gives exp(-i H tau) psi for any tau up to the accepted step at the
 * cost of a small matrix exponential, which the trajectory engine uses to
 * locate jump times without further matvecs.
 */
class KrylovStep {
public:
    template <typename Op>
    double build(const Op& op, const VectorC& psi, double tau_wanted, const PropagatorOptions& opt) {
        opt_ = opt;
        const Eigen::Index n = psi.size();
        beta0_ = psi.norm();
        m_ = 0;
        decomposed_m_ = -1;
        exact_ = false;
        if (beta0_ == 0.0 || tau_wanted <= 0.0) {
            basis_ = psi;
            exact_ = true;
            tau_max_ = tau_wanted;
            return tau_wanted;
        }
        const int cap = static_cast<int>(std::min<Eigen::Index>(opt.max_dim, n));
        basis_.resize(n, cap + 1);
        hess_ = MatrixC::Zero(cap + 1, cap);
        basis_.col(0) = psi / beta0_;
        VectorC w(n);
        double tau = tau_wanted;
        // first convergence check where the previous step converged
        int next_check = std::min(cap, std::max({1, opt.min_dim, last_m_ - 2}));
        for (int j = 0; j < cap; ++j) {
            op(basis_.col(j), w);
            // classical Gram-Schmidt, twice
            for (int pass = 0; pass < 2; ++pass) {
                VectorC h = basis_.leftCols(j + 1).adjoint() * w;
                w.noalias() -= basis_.leftCols(j + 1) * h;
                hess_.col(j).head(j + 1) += h;
            }
            const double nb = w.norm();
            hess_(j + 1, j) = nb;
            m_ = j + 1;
            if (nb <= 1e-12 * std::max(1.0, hess_.col(j).head(j + 1).norm())) {
                exact_ = true;
                break;
            }
            basis_.col(j + 1) = w / nb;
            if (m_ == next_check || m_ == cap) {
                decompose();
                if (error_estimate(tau) <= opt.tol) break;
                next_check = std::min(cap, m_ + std::max(2, m_ / 4));
            }
        }
        if (decomposed_m_ != m_) decompose();
        last_m_ = m_;
        if (!exact_) {
            int halvings = 0;
            while (error_estimate(tau) > opt.tol) {
                tau *= 0.5;
                TCISING_REQUIRE(++halvings < 60, ErrorCode::StepFailure,
                                "Krylov error estimate cannot meet tolerance with the dimension cap");
            }
        }
        tau_max_ = tau;
        return tau;
    }

    [[nodiscard]] double accepted_step() const noexcept { return tau_max_; }
    [[nodiscard]] int dimension() const noexcept { return m_; }

    /// exp(-i H tau) psi for 0 <= tau <= accepted_step().
    [[nodiscard]] VectorC evaluate(double tau) const {
        if (m_ == 0) return basis_.col(0);
        const VectorC y = small_exp_e1(tau);
        return beta0_ * (basis_.leftCols(m_) * y);
    }

    [[nodiscard]] double error_estimate(double tau) const {
        if (exact_ || m_ == 0) return 0.0;
        const VectorC y = small_exp_e1(tau);
        return beta0_ * std::abs(hess_(m_, m_ - 1)) * std::abs(y[m_ - 1]);
    }

private:
    /// Spectral form of the leading m x m block: exp(-i tau H_m) e1 = Q diag(exp(-i tau lam)) c.
    void decompose() {
        const int m = m_;
        decomposed_m_ = m;
        dense_fallback_ = false;
        if (opt_.hermitian) {
            Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) {
                t(i, i) = hess_(i, i).real();
                if (i + 1 < m) t(i + 1, i) = t(i, i + 1) = hess_(i + 1, i).real();
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
            lam_ = es.eigenvalues().cast<cplx>();
            q_ = es.eigenvectors().cast<cplx>();
            coef_ = es.eigenvectors().row(0).transpose().cast<cplx>();
            return;
        }
        Eigen::ComplexEigenSolver<MatrixC> es(hess_.topLeftCorner(m, m));
        if (es.info() == Eigen::Success) {
            lam_ = es.eigenvalues();
            q_ = es.eigenvectors();
            Eigen::PartialPivLU<MatrixC> lu(q_);
            coef_ = lu.solve(VectorC::Unit(m, 0));
            // guard against a nearly defective projection
            const double amp = (q_.cwiseAbs().colwise().sum().transpose().array() * coef_.cwiseAbs().array()).maxCoeff();
            if (std::isfinite(amp) && amp < 1e6) return;
        }
        dense_fallback_ = true;
    }

    [[nodiscard]] VectorC small_exp_e1(double tau) const {
        if (dense_fallback_) {
            const MatrixC e = (cplx(0.0, -tau) * hess_.topLeftCorner(m_, m_)).exp();
            return e.col(0);
        }
        VectorC d(m_);
        for (int k = 0; k < m_; ++k) d[k] = std::exp(cplx(0.0, -tau) * lam_[k]) * coef_[k];
        return q_ * d;
    }

    PropagatorOptions opt_;
    MatrixC basis_;
    MatrixC hess_;
    VectorC lam_;
    MatrixC q_;
    VectorC coef_;
    double beta0_ = 0.0;
    double tau_max_ = 0.0;
    int m_ = 0;
    int last_m_ = 0;
    int decomposed_m_ = -1;
    bool exact_ = false;
    bool dense_fallback_ = false;
};

struct PropagationStats {
    int steps = 0;
    int matvecs = 0;
};

/// psi <- exp(-i H T) psi with adaptive substeps.
template <typename Op>
PropagationStats propagate(const Op& op, VectorC& psi, double T, const PropagatorOptions& opt,
                           double* step_hint = nullptr) {
    PropagationStats stats;
    double remaining = T;
    double tau = (step_hint && *step_hint > 0.0) ? std::min(*step_hint, T) : T;
    KrylovStep step;
    while (remaining > 1e-14 * std::max(1.0, T)) {
        tau = std::min(tau, remaining);
        const double accepted = step.build(op, psi, tau, opt);
        psi = step.evaluate(accepted);
        remaining -= accepted;
        ++stats.steps;
        stats.matvecs += step.dimension();
        tau = accepted < tau ? accepted : accepted * 1.5;
    }
    if (step_hint) *step_hint = tau;
    return stats;
}

struct EigenResult {
    double value = 0.0;
    Eigen::VectorXd vector;
    double residual = 0.0;
    int restarts = 0;
};

struct LanczosOptions {
    int krylov_dim = 80;
    int max_restarts = 2000;
    double residual_tol = 1e-9;
    std::uint64_t seed = 0x5eed;
};

/// Lowest eigenpair of a real symmetric operator, explicitly restarted Lanczos.
template <typename Op>
EigenResult lowest_eigenpair(const Op& op, Eigen::Index n, const LanczosOptions& opt = {}) {
    TCISING_REQUIRE(n > 0, ErrorCode::InvalidArgument, "empty operator");
    Eigen::VectorXd x(n);
    std::mt19937_64 rng(opt.seed);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = 0.5 + static_cast<double>(rng() >> 11) * 0x1.0p-53;
    x.normalize();

    const int m_cap = static_cast<int>(std::min<Eigen::Index>(opt.krylov_dim, n));
    Eigen::MatrixXd basis(n, m_cap + 1);
    Eigen::VectorXd w(n);
    EigenResult res;
    for (int restart = 0; restart <= opt.max_restarts; ++restart) {
        Eigen::VectorXd alpha(m_cap), beta(m_cap);
        basis.col(0) = x;
        int m = 0;
        for (int j = 0; j < m_cap; ++j) {
            op(basis.col(j), w);
            alpha[j] = basis.col(j).dot(w);
            for (int pass = 0; pass < 2; ++pass) {
                Eigen::VectorXd h = basis.leftCols(j + 1).transpose() * w;
                w.noalias() -= basis.leftCols(j + 1) * h;
            }
            beta[j] = w.norm();
            m = j + 1;
            if (beta[j] <= 1e-13 * std::max(1.0, std::abs(alpha[j]))) break;
            basis.col(j + 1) = w / beta[j];
        }
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            t(i, i) = alpha[i];
            if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        x = basis.leftCols(m) * es.eigenvectors().col(0);
        x.normalize();
        op(x, w);
        const double theta = x.dot(w);
        res.value = theta;
        res.residual = (w - theta * x).norm();
        res.restarts = restart;
        if (res.residual < opt.residual_tol) {
            res.vector = x;
            return res;
        }
    }
    throw Error(ErrorCode::NoConvergence,
                "Lanczos did not reach residual " + std::to_string(opt.residual_tol) + " (last " +
                    std::to_string(res.residual) + ")");
}

}  // namespace tcising::krylov
