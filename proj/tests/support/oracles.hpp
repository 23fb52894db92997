#pragma once

// Independent reference computations for tests. Nothing here calls library code.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using idx = std::int64_t;

struct Matrix {
    idx rows = 0, cols = 0, ld = 1;
    std::vector<double> v;

    Matrix() = default;
    Matrix(idx r, idx c, idx l = 0) : rows(r), cols(c), ld(l ? l : (r ? r : 1)), v(static_cast<std::size_t>(ld * (c ? c : 1)), 0.0) {}

    double& operator()(idx i, idx j) { return v[static_cast<std::size_t>(i + j * ld)]; }
    double operator()(idx i, idx j) const { return v[static_cast<std::size_t>(i + j * ld)]; }
    double* data() { return v.data(); }
};

inline Matrix random_matrix(std::mt19937_64& g, idx r, idx c, idx ld = 0) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix m(r, c, ld);
    for (auto& x : m.v) x = u(g);
    return m;
}

/// Triangular with a dominant diagonal, so its inverse is well conditioned.
inline Matrix random_triangular(std::mt19937_64& g, idx n, bool lower, idx ld = 0) {
    Matrix m = random_matrix(g, n, n, ld);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (idx j = 0; j < n; ++j) {
        for (idx i = 0; i < n; ++i)
            if (lower ? i < j : i > j) m(i, j) = 0.0;
        m(j, j) = static_cast<double>(n) + 1.0 + u(g);
    }
    return m;
}

inline double op(const Matrix& a, char t, idx i, idx j) { return t == 'N' ? a(i, j) : a(j, i); }

/// C := alpha op(A) op(B) + beta C with long double accumulation.
inline void gemm(char ta, char tb, idx m, idx n, idx k, double alpha, const Matrix& a, const Matrix& b, double beta,
                 Matrix& c) {
    for (idx i = 0; i < m; ++i)
        for (idx j = 0; j < n; ++j) {
            long double s = 0;
            for (idx p = 0; p < k; ++p) s += static_cast<long double>(op(a, ta, i, p)) * op(b, tb, p, j);
            c(i, j) = static_cast<double>(alpha * s + (beta == 0.0 ? 0.0L : static_cast<long double>(beta) * c(i, j)));
        }
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix c(a.rows, b.cols);
    gemm('N', 'N', a.rows, b.cols, a.cols, 1.0, a, b, 0.0, c);
    return c;
}

inline double frobenius(const Matrix& a) {
    long double s = 0;
    for (idx j = 0; j < a.cols; ++j)
        for (idx i = 0; i < a.rows; ++i) s += static_cast<long double>(a(i, j)) * a(i, j);
    return static_cast<double>(std::sqrt(s));
}

inline double diff_frobenius(const Matrix& a, const Matrix& b) {
    long double s = 0;
    for (idx j = 0; j < a.cols; ++j)
        for (idx i = 0; i < a.rows; ++i) {
            long double d = static_cast<long double>(a(i, j)) - b(i, j);
            s += d * d;
        }
    return static_cast<double>(std::sqrt(s));
}

/// Copy of the rows x cols window as a tight matrix.
inline Matrix window(const Matrix& a) {
    Matrix out(a.rows, a.cols);
    for (idx j = 0; j < a.cols; ++j)
        for (idx i = 0; i < a.rows; ++i) out(i, j) = a(i, j);
    return out;
}

inline Matrix identity(idx n) {
    Matrix m(n, n);
    for (idx i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

/// Triangle of `a` (diagonal replaced by ones when unit).
inline Matrix triangle(const Matrix& a, bool lower, bool unit) {
    Matrix t(a.rows, a.cols);
    for (idx j = 0; j < a.cols; ++j)
        for (idx i = 0; i < a.rows; ++i) {
            if (i == j) t(i, j) = unit ? 1.0 : a(i, j);
            else if (lower ? i > j : i < j) t(i, j) = a(i, j);
        }
    return t;
}

/// Exact flop counts by explicit enumeration of the multiply-add steps.
inline std::uint64_t getrf_flops_by_loop(idx m, idx n) {
    std::uint64_t f = 0;
    for (idx k = 0; k < std::min(m, n); ++k) {
        f += static_cast<std::uint64_t>(m - k - 1);  // scaling of the column
        for (idx j = k + 1; j < n; ++j) f += 2 * static_cast<std::uint64_t>(m - k - 1);
    }
    return f;
}

inline std::uint64_t trsm_flops_by_loop(bool left, idx m, idx n) {
    // one multiply-add per (row, column, inner) triple plus one division per entry
    std::uint64_t f = 0;
    const idx t = left ? m : n;
    const idx other = left ? n : m;
    for (idx c = 0; c < other; ++c)
        for (idx i = 0; i < t; ++i) f += 2 * static_cast<std::uint64_t>(i) + 1;
    return f;
}

inline std::uint64_t trti2_flops_by_loop(idx n) {
    // column j: one reciprocal, then a triangular matrix-vector product of order n-j-1
    // (k^2 flops) and a scaling of k entries.
    std::uint64_t f = 0;
    for (idx j = 0; j < n; ++j) {
        const std::uint64_t k = static_cast<std::uint64_t>(n - j - 1);
        f += 1 + k * k + k;
    }
    return f;
}

}  // namespace oracle
