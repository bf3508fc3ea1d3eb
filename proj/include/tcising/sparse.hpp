// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "tcising/error.hpp"

namespace tcising {

using cplx = std::complex<double>;
using VectorC = Eigen::VectorXcd;
using VectorR = Eigen::VectorXd;
using MatrixC = Eigen::MatrixXcd;

template <typename Scalar>
struct Triplet {
    std::size_t row;
    std::size_t col;
    Scalar value;
};

/**
 * Compressed sparse row matrix with sorted column indices.
 *
 * Built once from triplets (duplicates summed, explicit zeros dropped) and
 * immutable afterwards, so concurrent matvecs are safe.
 */
template <typename Scalar>
class CsrMatrix {
public:
    CsrMatrix() = default;

    CsrMatrix(std::size_t rows, std::size_t cols, std::vector<Triplet<Scalar>> triplets)
        : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {
        for (const auto& t : triplets)
            TCISING_REQUIRE(t.row < rows && t.col < cols, ErrorCode::InvalidArgument, "triplet index out of range");
        std::sort(triplets.begin(), triplets.end(),
                  [](const auto& a, const auto& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
        for (std::size_t k = 0; k < triplets.size();) {
            std::size_t m = k;
            Scalar sum{};
            while (m < triplets.size() && triplets[m].row == triplets[k].row && triplets[m].col == triplets[k].col)
                sum += triplets[m++].value;
            if (sum != Scalar{}) {
                col_idx_.push_back(triplets[k].col);
                values_.push_back(sum);
                ++row_ptr_[triplets[k].row + 1];
            }
            k = m;
        }
        std::partial_sum(row_ptr_.begin(), row_ptr_.end(), row_ptr_.begin());
    }

    /// Diagonal matrix.
    static CsrMatrix diagonal(const std::vector<Scalar>& d) {
        std::vector<Triplet<Scalar>> t;
        t.reserve(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
        return CsrMatrix(d.size(), d.size(), std::move(t));
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t nnz() const noexcept { return values_.size(); }
    [[nodiscard]] const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
    [[nodiscard]] const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
    [[nodiscard]] const std::vector<Scalar>& values() const noexcept { return values_; }

    /// y = A x
    template <typename In, typename Out>
    void apply(const In& x, Out& y) const {
        y.resize(static_cast<Eigen::Index>(rows_));
        for (std::size_t i = 0; i < rows_; ++i) {
            typename Out::Scalar acc{};
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                acc += values_[k] * x[static_cast<Eigen::Index>(col_idx_[k])];
            y[static_cast<Eigen::Index>(i)] = acc;
        }
    }

    template <typename In>
    [[nodiscard]] auto operator*(const In& x) const {
        Eigen::Matrix<typename In::Scalar, Eigen::Dynamic, 1> y;
        apply(x, y);
        return y;
    }

    [[nodiscard]] std::vector<Triplet<Scalar>> triplets() const {
        std::vector<Triplet<Scalar>> out;
        out.reserve(nnz());
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) out.push_back({i, col_idx_[k], values_[k]});
        return out;
    }

    [[nodiscard]] CsrMatrix adjoint() const {
        auto t = triplets();
        for (auto& e : t) {
            std::swap(e.row, e.col);
            if constexpr (!std::is_floating_point_v<Scalar>) e.value = std::conj(e.value);
        }
        return CsrMatrix(cols_, rows_, std::move(t));
    }

    /// Diagonal of A^dagger A, i.e. sum_i |A_ij|^2 per column j, when A^dagger A is diagonal.
    [[nodiscard]] std::vector<double> column_norms_squared() const {
        std::vector<double> out(cols_, 0.0);
        for (std::size_t k = 0; k < nnz(); ++k) out[col_idx_[k]] += std::norm(values_[k]);
        return out;
    }

    [[nodiscard]] Scalar at(std::size_t i, std::size_t j) const {
        const auto b = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
        const auto e = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
        const auto it = std::lower_bound(b, e, j);
        return (it != e && *it == j) ? values_[static_cast<std::size_t>(it - col_idx_.begin())] : Scalar{};
    }

    /// max_ij |A_ij - conj(A_ji)|
    [[nodiscard]] double hermiticity_defect() const {
        if (rows_ != cols_) return INFINITY;
        double worst = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
                Scalar mirror = at(col_idx_[k], i);
                if constexpr (!std::is_floating_point_v<Scalar>) mirror = std::conj(mirror);
                worst = std::max(worst, std::abs(values_[k] - mirror));
            }
        return worst;
    }

    [[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> to_dense() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> d =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(static_cast<Eigen::Index>(rows_),
                                                                        static_cast<Eigen::Index>(cols_));
        for (const auto& t : triplets()) d(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.value;
        return d;
    }

    [[nodiscard]] Eigen::SparseMatrix<Scalar, Eigen::RowMajor> to_eigen() const {
        std::vector<Eigen::Triplet<Scalar>> t;
        t.reserve(nnz());
        for (const auto& e : triplets())
            t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.value);
        Eigen::SparseMatrix<Scalar, Eigen::RowMajor> m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
        m.setFromTriplets(t.begin(), t.end());
        return m;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<Scalar> values_;
};

using RealCsr = CsrMatrix<double>;

}  // namespace tcising
