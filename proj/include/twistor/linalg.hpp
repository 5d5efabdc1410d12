#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "scalar.hpp"

namespace twistor {

/// Default relative cutoff for numerical rank: singular values below
/// kRankRelTol * sigma_max count as zero.
inline constexpr double kRankRelTol = 1e-7;

template <class F>
using DenseMatrix = std::vector<std::vector<F>>;

/// Singular values of a real or complex Eigen matrix, largest first.
template <class M>
Eigen::VectorXd singularValues(const M& a) {
    if (a.rows() == 0 || a.cols() == 0) return {};
    Eigen::JacobiSVD<M> svd(a);
    return svd.singularValues();
}

/// Numerical rank with a cutoff relative to the largest singular value.
/// An all-zero matrix (or one below absFloor) has rank 0.
template <class M>
int numericRank(const M& a, double relTol = kRankRelTol, double absFloor = 1e-300) {
    Eigen::VectorXd s = singularValues(a);
    if (s.size() == 0 || s(0) <= absFloor) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > relTol * s(0)) ++r;
    return r;
}

/// Orthonormal basis (columns) of the numerical right nullspace.
inline Eigen::MatrixXd nullspaceBasis(const Eigen::MatrixXd& a, double relTol = kRankRelTol) {
    const Eigen::Index n = a.cols();
    if (a.rows() == 0) return Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int r = 0;
    if (s.size() > 0 && s(0) > 1e-300)
        for (Eigen::Index i = 0; i < s.size(); ++i)
            if (s(i) > relTol * s(0)) ++r;
    return svd.matrixV().rightCols(n - r);
}

/// Orthonormal basis (columns) of the numerical left nullspace.
inline Eigen::MatrixXd leftNullspaceBasis(const Eigen::MatrixXd& a, double relTol = kRankRelTol) {
    Eigen::MatrixXd t = a.transpose();
    return nullspaceBasis(t, relTol);
}

namespace detail {
template <class F>
bool exactZero(const F& x) { return x == F(0); }
} // namespace detail

/// Exact rank by Gaussian elimination over a field
/// (Rational or Complex<Rational>).
template <class F>
int exactRank(DenseMatrix<F> a) {
    const std::size_t rows = a.size();
    if (rows == 0) return 0;
    const std::size_t cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        while (piv < rows && detail::exactZero(a[piv][c])) ++piv;
        if (piv == rows) continue;
        std::swap(a[r], a[piv]);
        F inv = F(1) / a[r][c];
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (detail::exactZero(a[i][c])) continue;
            F f = a[i][c] * inv;
            for (std::size_t k = c; k < cols; ++k) a[i][k] -= f * a[r][k];
        }
        ++r;
    }
    return static_cast<int>(r);
}

inline Eigen::MatrixXcd toEigen(const DenseMatrix<Cd>& a, std::size_t cols) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(a.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = toStd(a[i][j]);
    return m;
}

/// Rank of a complex matrix: exact for Gaussian rationals, SVD for doubles.
inline int matrixRank(const DenseMatrix<Cq>& a, std::size_t) { return exactRank(a); }
inline int matrixRank(const DenseMatrix<Cd>& a, std::size_t cols) {
    if (a.empty() || cols == 0) return 0;
    return numericRank(toEigen(a, cols));
}

} // namespace twistor
