// SPDX-License-Identifier: Apache-2.0

/**
 * @file lindblad.hpp
 * @brief Dense master-equation integration for small systems.
 *
 * d rho/dt = -i[H, rho] + sum_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho}),
 * integrated with adaptive Dormand-Prince 5(4). The right-hand side is
 * evaluated as B + B^+ + sum_k L_k (L_k rho)^+ with B = -i H_eff rho and
 * H_eff = H - (i/2) sum_k L_k^+ L_k, which keeps every stage Hermitian.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>

#include "tcising/error.hpp"
#include "tcising/model.hpp"
#include "tcising/sparse.hpp"
#include "tcising/states.hpp"

namespace tcising {

struct LindbladOptions {
    double rtol = 1e-9;
    double atol = 1e-11;
    double initial_step = 1e-2;
    std::size_t max_dim = 400;
    std::size_t max_steps = 50'000'000;
};

namespace detail {

using SparseC = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

template <typename Scalar>
SparseC to_complex_sparse(const CsrMatrix<Scalar>& m) {
    return m.to_eigen().template cast<cplx>();
}

class LindbladRhs {
public:
    LindbladRhs(SparseC h, std::vector<SparseC> jumps) : jumps_(std::move(jumps)) {
        SparseC k(h.rows(), h.cols());
        for (const auto& l : jumps_) k += SparseC(l.adjoint() * l);
        heff_ = h - cplx(0.0, 0.5) * k;
        heff_.makeCompressed();
    }

    void operator()(const MatrixC& rho, MatrixC& out) const {
        MatrixC b = cplx(0.0, -1.0) * (heff_ * rho);
        out = b + b.adjoint();
        for (const auto& l : jumps_) {
            const MatrixC lr = l * rho;
            out.noalias() += l * MatrixC(lr.adjoint());
        }
    }

private:
    SparseC heff_;
    std::vector<SparseC> jumps_;
};

}  // namespace detail

/// Generic entry point over raw operators; rho(t) at each time of an ascending grid.
template <typename Scalar>
[[nodiscard]] std::vector<MatrixC> lindblad_dense(const CsrMatrix<Scalar>& h, const std::vector<CsrMatrix<Scalar>>& jumps,
                                                  const MatrixC& rho0, const std::vector<double>& t_grid,
                                                  const LindbladOptions& opt = {}) {
    const auto d = h.rows();
    TCISING_REQUIRE(d <= opt.max_dim, ErrorCode::DimTooLarge,
                    "dense master equation limited to dimension " + std::to_string(opt.max_dim));
    TCISING_REQUIRE(rho0.rows() == static_cast<Eigen::Index>(d) && rho0.cols() == static_cast<Eigen::Index>(d),
                    ErrorCode::SectorMismatch, "density matrix and Hamiltonian dimensions differ");
    std::vector<detail::SparseC> ls;
    for (const auto& l : jumps) {
        TCISING_REQUIRE(l.rows() == d && l.cols() == d, ErrorCode::SectorMismatch, "jump operator dimension");
        ls.push_back(detail::to_complex_sparse(l));
    }
    const detail::LindbladRhs f(detail::to_complex_sparse(h), std::move(ls));

    // Dormand-Prince 5(4) tableau
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                            b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<MatrixC> out;
    out.reserve(t_grid.size());
    MatrixC y = rho0;
    double t = t_grid.empty() ? 0.0 : std::min(0.0, t_grid.front());
    double hstep = opt.initial_step;
    MatrixC k1, k2, k3, k4, k5, k6, k7, tmp;
    f(y, k1);
    std::size_t steps = 0;
    for (double t_target : t_grid) {
        TCISING_REQUIRE(t_target >= t - 1e-12, ErrorCode::InvalidArgument, "time grid must be ascending");
        while (t_target - t > 1e-13 * std::max(1.0, std::abs(t_target))) {
            TCISING_REQUIRE(++steps < opt.max_steps, ErrorCode::StepFailure, "master equation step budget exhausted");
            const bool last = hstep >= t_target - t;
            const double hh = last ? t_target - t : hstep;
            tmp = y + hh * a21 * k1;
            f(tmp, k2);
            tmp = y + hh * (a31 * k1 + a32 * k2);
            f(tmp, k3);
            tmp = y + hh * (a41 * k1 + a42 * k2 + a43 * k3);
            f(tmp, k4);
            tmp = y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(tmp, k5);
            tmp = y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(tmp, k6);
            MatrixC ynew = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            f(ynew, k7);
            const MatrixC err = hh * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double scale = opt.atol + opt.rtol * std::max(y.cwiseAbs().maxCoeff(), ynew.cwiseAbs().maxCoeff());
            const double en = err.cwiseAbs().maxCoeff() / scale;
            if (!std::isfinite(en)) throw Error(ErrorCode::StepFailure, "non-finite master equation error estimate");
            if (en <= 1.0) {
                t = last ? t_target : t + hh;
                y = std::move(ynew);
                y = 0.5 * (y + y.adjoint()).eval();
                k1 = k7;
            }
            const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
            if (!(last && en <= 1.0)) hstep = hh * fac;
            TCISING_REQUIRE(hstep > 1e-14, ErrorCode::StepFailure, "master equation step underflow");
        }
        out.push_back(y);
    }
    return out;
}

/// Model-level entry point: operators bound to one basis.
[[nodiscard]] inline std::vector<DensityMatrix> lindblad_dense(const SparseOperator& h,
                                                               const std::vector<JumpOperator>& jumps,
                                                               const DensityMatrix& rho0,
                                                               const std::vector<double>& t_grid,
                                                               const LindbladOptions& opt = {}) {
    std::vector<RealCsr> ls;
    ls.reserve(jumps.size());
    for (const auto& j : jumps) ls.push_back(j.op.matrix);
    std::vector<double> shifted(t_grid.size());
    std::transform(t_grid.begin(), t_grid.end(), shifted.begin(), [&](double t) { return t - rho0.t; });
    auto mats = lindblad_dense(h.matrix, ls, rho0.rho, shifted, opt);
    std::vector<DensityMatrix> out;
    out.reserve(mats.size());
    for (std::size_t i = 0; i < mats.size(); ++i) out.push_back({h.basis, std::move(mats[i]), t_grid[i]});
    return out;
}

}  // namespace tcising
