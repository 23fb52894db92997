#pragma once

// Reference column-major BLAS/LAPACK subset. Every routine touches only the
// rows x cols window of each operand, honouring the leading dimension.

#include "kernbench/thread_pool.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace kernbench::ref {

using index_t = std::int64_t;

namespace detail {

inline bool is_trans(char t) { return t == 'T' || t == 't' || t == 'C' || t == 'c'; }
inline bool is_lower(char u) { return u == 'L' || u == 'l'; }
inline bool is_left(char s) { return s == 'L' || s == 'l'; }
inline bool is_unit(char d) { return d == 'U' || d == 'u'; }

/// op(A) for a triangular A, with the unit diagonal substituted when requested.
template <typename T>
struct TriangularOp {
    const T* a;
    index_t lda;
    bool trans;
    bool unit;
    bool lower;  // triangle of op(A), not of A

    T operator()(index_t i, index_t j) const {
        if (i == j && unit) return T(1);
        if (lower ? j > i : j < i) return T(0);
        return trans ? a[j + i * lda] : a[i + j * lda];
    }
};

template <typename T>
TriangularOp<T> tri_op(char uplo, char transa, char diag, const T* a, index_t lda) {
    bool trans = is_trans(transa);
    return {a, lda, trans, is_unit(diag), is_lower(uplo) != trans};
}

}  // namespace detail

/// C := alpha op(A) op(B) + beta C. Rows of C are split across `pool` when given.
template <typename T>
void gemm(char transa, char transb, index_t m, index_t n, index_t k, T alpha, const T* a,
          index_t lda, const T* b, index_t ldb, T beta, T* c, index_t ldc,
          ThreadPool* pool = nullptr) {
    const bool ta = detail::is_trans(transa);
    const bool tb = detail::is_trans(transb);
    auto rows = [=](index_t i0, index_t i1) {
        for (index_t j = 0; j < n; ++j) {
            T* cj = c + j * ldc;
            for (index_t i = i0; i < i1; ++i) cj[i] = beta == T(0) ? T(0) : beta * cj[i];
            if (alpha == T(0)) continue;
            for (index_t p = 0; p < k; ++p) {
                T bpj = alpha * (tb ? b[j + p * ldb] : b[p + j * ldb]);
                if (!ta) {
                    const T* ap = a + p * lda;
                    for (index_t i = i0; i < i1; ++i) cj[i] += ap[i] * bpj;
                } else {
                    for (index_t i = i0; i < i1; ++i) cj[i] += a[p + i * lda] * bpj;
                }
            }
        }
    };
    if (pool == nullptr || pool->size() <= 1 || m < 2) {
        rows(0, m);
        return;
    }
    const index_t parts = std::min<index_t>(static_cast<index_t>(pool->size()), m);
    std::vector<std::function<void()>> tasks;
    for (index_t t = 0; t < parts; ++t) {
        index_t i0 = m * t / parts, i1 = m * (t + 1) / parts;
        tasks.emplace_back([=] { rows(i0, i1); });
    }
    pool->run_all(std::move(tasks));
}

/// y := alpha op(A) x + beta y
template <typename T>
void gemv(char trans, index_t m, index_t n, T alpha, const T* a, index_t lda, const T* x,
          index_t incx, T beta, T* y, index_t incy) {
    const bool t = detail::is_trans(trans);
    const index_t leny = t ? n : m, lenx = t ? m : n;
    for (index_t i = 0; i < leny; ++i) y[i * incy] = beta == T(0) ? T(0) : beta * y[i * incy];
    for (index_t i = 0; i < leny; ++i) {
        T acc = 0;
        for (index_t j = 0; j < lenx; ++j)
            acc += (t ? a[j + i * lda] : a[i + j * lda]) * x[j * incx];
        y[i * incy] += alpha * acc;
    }
}

/// y := alpha x + y
template <typename T>
void axpy(index_t n, T alpha, const T* x, index_t incx, T* y, index_t incy) {
    for (index_t i = 0; i < n; ++i) y[i * incy] += alpha * x[i * incx];
}

/// Solves op(A) X = alpha B (left) or X op(A) = alpha B (right); B is overwritten by X.
template <typename T>
void trsm(char side, char uplo, char transa, char diag, index_t m, index_t n, T alpha,
          const T* a, index_t lda, T* b, index_t ldb) {
    auto t = detail::tri_op(uplo, transa, diag, a, lda);
    for (index_t j = 0; j < n; ++j)
        for (index_t i = 0; i < m; ++i) b[i + j * ldb] *= alpha;
    if (detail::is_left(side)) {
        for (index_t j = 0; j < n; ++j) {
            T* x = b + j * ldb;
            if (t.lower) {
                for (index_t i = 0; i < m; ++i) {
                    T s = x[i];
                    for (index_t p = 0; p < i; ++p) s -= t(i, p) * x[p];
                    x[i] = s / t(i, i);
                }
            } else {
                for (index_t i = m - 1; i >= 0; --i) {
                    T s = x[i];
                    for (index_t p = i + 1; p < m; ++p) s -= t(i, p) * x[p];
                    x[i] = s / t(i, i);
                }
            }
        }
    } else {
        // row-wise x op(A) = b
        if (!t.lower) {
            for (index_t j = 0; j < n; ++j)
                for (index_t i = 0; i < m; ++i) {
                    T s = b[i + j * ldb];
                    for (index_t p = 0; p < j; ++p) s -= b[i + p * ldb] * t(p, j);
                    b[i + j * ldb] = s / t(j, j);
                }
        } else {
            for (index_t j = n - 1; j >= 0; --j)
                for (index_t i = 0; i < m; ++i) {
                    T s = b[i + j * ldb];
                    for (index_t p = j + 1; p < n; ++p) s -= b[i + p * ldb] * t(p, j);
                    b[i + j * ldb] = s / t(j, j);
                }
        }
    }
}

/// B := alpha op(A) B (left) or alpha B op(A) (right), in place.
template <typename T>
void trmm(char side, char uplo, char transa, char diag, index_t m, index_t n, T alpha,
          const T* a, index_t lda, T* b, index_t ldb) {
    auto t = detail::tri_op(uplo, transa, diag, a, lda);
    if (detail::is_left(side)) {
        auto row = [&](index_t i, index_t j) {
            T s = 0;
            index_t lo = t.lower ? 0 : i, hi = t.lower ? i : m - 1;
            for (index_t p = lo; p <= hi; ++p) s += t(i, p) * b[p + j * ldb];
            b[i + j * ldb] = alpha * s;
        };
        for (index_t j = 0; j < n; ++j) {
            if (t.lower)
                for (index_t i = m - 1; i >= 0; --i) row(i, j);
            else
                for (index_t i = 0; i < m; ++i) row(i, j);
        }
    } else {
        auto col = [&](index_t j) {
            index_t lo = t.lower ? j : 0, hi = t.lower ? n - 1 : j;
            for (index_t i = 0; i < m; ++i) {
                T s = 0;
                for (index_t p = lo; p <= hi; ++p) s += b[i + p * ldb] * t(p, j);
                b[i + j * ldb] = alpha * s;
            }
        };
        if (t.lower)
            for (index_t j = 0; j < n; ++j) col(j);
        else
            for (index_t j = n - 1; j >= 0; --j) col(j);
    }
}

/// Solves op(A) x = b for a single right-hand side with stride incx.
template <typename T>
void trsv(char uplo, char trans, char diag, index_t n, const T* a, index_t lda, T* x,
          index_t incx) {
    auto t = detail::tri_op(uplo, trans, diag, a, lda);
    if (t.lower) {
        for (index_t i = 0; i < n; ++i) {
            T s = x[i * incx];
            for (index_t p = 0; p < i; ++p) s -= t(i, p) * x[p * incx];
            x[i * incx] = s / t(i, i);
        }
    } else {
        for (index_t i = n - 1; i >= 0; --i) {
            T s = x[i * incx];
            for (index_t p = i + 1; p < n; ++p) s -= t(i, p) * x[p * incx];
            x[i * incx] = s / t(i, i);
        }
    }
}

/// C := alpha op(A) op(A)^T + beta C on the `uplo` triangle of C only.
template <typename T>
void syrk(char uplo, char trans, index_t n, index_t k, T alpha, const T* a, index_t lda, T beta,
          T* c, index_t ldc) {
    const bool t = detail::is_trans(trans);
    const bool lower = detail::is_lower(uplo);
    auto at = [&](index_t i, index_t p) { return t ? a[p + i * lda] : a[i + p * lda]; };
    for (index_t j = 0; j < n; ++j) {
        index_t i0 = lower ? j : 0, i1 = lower ? n : j + 1;
        for (index_t i = i0; i < i1; ++i) {
            T s = 0;
            for (index_t p = 0; p < k; ++p) s += at(i, p) * at(j, p);
            T& cij = c[i + j * ldc];
            cij = alpha * s + (beta == T(0) ? T(0) : beta * cij);
        }
    }
}

/// LU with partial pivoting, in place. `ipiv` receives 0-based pivot rows
/// (size min(m, n)). Returns 0, or 1 + the index of the first exactly-zero pivot.
template <typename T>
index_t getrf(index_t m, index_t n, T* a, index_t lda, index_t* ipiv) {
    index_t info = 0;
    const index_t steps = std::min(m, n);
    for (index_t k = 0; k < steps; ++k) {
        index_t p = k;
        for (index_t i = k + 1; i < m; ++i)
            if (std::abs(a[i + k * lda]) > std::abs(a[p + k * lda])) p = i;
        ipiv[k] = p;
        if (a[p + k * lda] == T(0)) {
            if (info == 0) info = k + 1;
            continue;
        }
        if (p != k)
            for (index_t j = 0; j < n; ++j) std::swap(a[k + j * lda], a[p + j * lda]);
        const T pivot = a[k + k * lda];
        for (index_t i = k + 1; i < m; ++i) a[i + k * lda] /= pivot;
        for (index_t j = k + 1; j < n; ++j) {
            const T akj = a[k + j * lda];
            for (index_t i = k + 1; i < m; ++i) a[i + j * lda] -= a[i + k * lda] * akj;
        }
    }
    return info;
}

/// Applies row interchanges ipiv[0..count) to the n columns of B.
template <typename T>
void apply_pivots(index_t count, const index_t* ipiv, index_t n, T* b, index_t ldb) {
    for (index_t k = 0; k < count; ++k)
        if (ipiv[k] != k)
            for (index_t j = 0; j < n; ++j) std::swap(b[k + j * ldb], b[ipiv[k] + j * ldb]);
}

/// Solves A X = B via getrf. Returns getrf's info; B is left untouched on failure.
template <typename T>
index_t gesv(index_t n, index_t nrhs, T* a, index_t lda, T* b, index_t ldb) {
    std::vector<index_t> ipiv(static_cast<std::size_t>(n));
    index_t info = getrf(n, n, a, lda, ipiv.data());
    if (info != 0) return info;
    apply_pivots(n, ipiv.data(), nrhs, b, ldb);
    trsm<T>('L', 'L', 'N', 'U', n, nrhs, T(1), a, lda, b, ldb);
    trsm<T>('L', 'U', 'N', 'N', n, nrhs, T(1), a, lda, b, ldb);
    return 0;
}

/// Unblocked in-place triangular inverse. Returns 1 + index of a zero diagonal, else 0.
template <typename T>
index_t trti2(char uplo, char diag, index_t n, T* a, index_t lda) {
    const bool unit = detail::is_unit(diag);
    if (!unit)
        for (index_t j = 0; j < n; ++j)
            if (a[j + j * lda] == T(0)) return j + 1;
    auto at = [&](index_t i, index_t j) -> T& { return a[i + j * lda]; };
    if (detail::is_lower(uplo)) {
        for (index_t j = n - 1; j >= 0; --j) {
            T ajj = T(-1);
            if (!unit) {
                at(j, j) = T(1) / at(j, j);
                ajj = -at(j, j);
            }
            // x := L22^{-1}(already inverted) * x on rows j+1..n-1, bottom up
            for (index_t i = n - 1; i > j; --i) {
                T s = 0;
                for (index_t p = j + 1; p <= i; ++p)
                    s += (p == i && unit ? T(1) : at(i, p)) * at(p, j);
                at(i, j) = ajj * s;
            }
        }
    } else {
        for (index_t j = 0; j < n; ++j) {
            T ajj = T(-1);
            if (!unit) {
                at(j, j) = T(1) / at(j, j);
                ajj = -at(j, j);
            }
            for (index_t i = 0; i < j; ++i) {
                T s = 0;
                for (index_t p = i; p < j; ++p)
                    s += (p == i && unit ? T(1) : at(i, p)) * at(p, j);
                at(i, j) = ajj * s;
            }
        }
    }
    return 0;
}

/// Blocked in-place triangular inverse built from trmm and trti2.
template <typename T>
index_t trtri(char uplo, char diag, index_t n, T* a, index_t lda, index_t nb = 64) {
    if (!detail::is_unit(diag))
        for (index_t j = 0; j < n; ++j)
            if (a[j + j * lda] == T(0)) return j + 1;
    auto at = [&](index_t i, index_t j) { return a + i + j * lda; };
    for (index_t j = 0; j < n; j += nb) {
        const index_t jb = std::min(nb, n - j);
        if (detail::is_lower(uplo)) {
            trmm<T>('R', 'L', 'N', diag, jb, j, T(1), at(0, 0), lda, at(j, 0), lda);
            trti2<T>('L', diag, jb, at(j, j), lda);
            trmm<T>('L', 'L', 'N', diag, jb, j, T(-1), at(j, j), lda, at(j, 0), lda);
        } else {
            trmm<T>('L', 'U', 'N', diag, j, jb, T(1), at(0, 0), lda, at(0, j), lda);
            trti2<T>('U', diag, jb, at(j, j), lda);
            trmm<T>('R', 'U', 'N', diag, j, jb, T(-1), at(j, j), lda, at(0, j), lda);
        }
    }
    return 0;
}

}  // namespace kernbench::ref
