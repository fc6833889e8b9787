#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "rrs/errors.hpp"
#include "rrs/matrix.hpp"
#include "rrs/vec.hpp"

namespace rrs {

/// Matrices whose smaller dimension exceeds this are rejected by the dense
/// oracles below; they exist for desk-scale verification, not production SVD.
inline constexpr std::size_t kDenseOracleLimit = 600;

struct SymmetricEigen {
    std::vector<double> values;  // ascending
    std::vector<double> vectors; // row-major n x n; column k is the eigenvector of values[k]
};

/// Cyclic Jacobi eigendecomposition of a dense symmetric matrix (row-major).
/// Deterministic and dependency-free; converges quadratically at desk scale.
inline SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n,
                                   bool want_vectors = true, double tol = 1e-12) {
    if (a.size() != n * n) throw argument_error("jacobi_eigen: bad matrix size");
    std::vector<double> v;
    if (want_vectors) {
        v.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    }
    double fnorm = 0.0;
    for (double x : a) fnorm += x * x;
    fnorm = std::sqrt(fnorm);
    const double stop = tol * std::max(fnorm, std::numeric_limits<double>::min());

    const int max_sweeps = 60;
    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a[p * n + q] * a[p * n + q];
        if (std::sqrt(off) <= stop) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (apq == 0.0) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a[k * n + p];
                    const double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[p * n + k] = a[k * n + p];
                    a[k * n + q] = s * akp + c * akq;
                    a[q * n + k] = a[k * n + q];
                }
                if (want_vectors) {
                    for (std::size_t k = 0; k < n; ++k) {
                        const double vkp = v[k * n + p];
                        const double vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    if (sweep == max_sweeps) throw numeric_error("jacobi_eigen: no convergence in 60 sweeps");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });
    SymmetricEigen out;
    out.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) out.values[k] = a[order[k] * n + order[k]];
    if (want_vectors) {
        out.vectors.assign(n * n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) out.vectors[i * n + k] = v[i * n + order[k]];
    }
    return out;
}

/// Dense A^T A (n x n, row-major), accumulated row by row so CSR rows cost
/// O(nnz^2) each.
inline std::vector<double> gram_ata(const Matrix& a) {
    const std::size_t n = a.cols();
    std::vector<double> g(n * n, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (const auto [j1, v1] : a.row(i))
            for (const auto [j2, v2] : a.row(i)) g[j1 * n + j2] += v1 * v2;
    return g;
}

/// Dense A A^T (m x m, row-major) from pairwise row dot products.
inline std::vector<double> gram_aat(const Matrix& a) {
    const std::size_t m = a.rows();
    std::vector<double> g(m * m, 0.0);
    // gather each row densely once; pair dots on the gathered form
    std::vector<std::vector<RowEntry>> rows(m);
    for (std::size_t i = 0; i < m; ++i)
        for (const auto e : a.row(i)) rows[i].push_back(e);
    std::vector<double> scatter(a.cols(), 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (const auto& e : rows[i]) scatter[e.col] = e.value;
        for (std::size_t j = i; j < m; ++j) {
            double s = 0.0;
            for (const auto& e : rows[j]) s += e.value * scatter[e.col];
            g[i * m + j] = s;
            g[j * m + i] = s;
        }
        for (const auto& e : rows[i]) scatter[e.col] = 0.0;
    }
    return g;
}

struct SpectralReport {
    double sigma_min = 0.0; // smallest of the min(m,n) singular values
    double sigma_max = 0.0;
    double frobenius = 0.0;
    double l_norm = 0.0; // spectral norm of I - (2/||A||_F^2) A^T A, computed from the spectrum
    double cond = 0.0;   // sigma_max / sigma_min
};

/// Exact spectral quantities from the Gram matrix of the smaller dimension.
/// For m < n the spectrum of I - (2/||A||_F^2) A^T A includes the eigenvalue
/// 1 with multiplicity n - m (zero singular values), which makes l_norm = 1
/// for underdetermined systems.
inline SpectralReport spectral_report(const Matrix& a,
                                      std::size_t dense_limit = kDenseOracleLimit) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m == 0 || n == 0) throw argument_error("spectral_report: empty matrix");
    const std::size_t k = std::min(m, n);
    if (k > dense_limit)
        throw numeric_error("spectral_report: min(m,n) exceeds the dense threshold (" +
                            std::to_string(dense_limit) + "); intended for desk-scale matrices");

    std::vector<double> gram = n <= m ? gram_ata(a) : gram_aat(a);
    auto eig = jacobi_eigen(std::move(gram), k, /*want_vectors=*/false);

    SpectralReport r;
    r.frobenius = std::sqrt(a.frobenius_sq());
    const double f2 = a.frobenius_sq();
    if (f2 <= 0.0) throw numeric_error("spectral_report: zero matrix");
    double lam_min = std::numeric_limits<double>::infinity();
    double lam_max = 0.0;
    double l_norm = n > k ? 1.0 : 0.0; // zero singular values contribute eigenvalue 1
    for (double lam : eig.values) {
        lam = std::max(lam, 0.0); // Gram eigenvalues are nonnegative up to roundoff
        lam_min = std::min(lam_min, lam);
        lam_max = std::max(lam_max, lam);
        l_norm = std::max(l_norm, std::abs(1.0 - 2.0 * lam / f2));
    }
    r.sigma_min = std::sqrt(lam_min);
    r.sigma_max = std::sqrt(lam_max);
    r.l_norm = l_norm;
    r.cond = r.sigma_max / r.sigma_min;
    return r;
}

/// Upper bound 1 - 2*sigma_min^2/||A||_F^2 on l_norm; exposed for reporting.
inline double l_norm_bound(const SpectralReport& r) {
    return 1.0 - 2.0 * r.sigma_min * r.sigma_min / (r.frobenius * r.frobenius);
}

struct BoundReport {
    std::size_t q = 0;
    double gamma = 0.0;          // per-restart contraction constant
    double rs_coefficient = 0.0; // 1 + ||A||_F / sigma_min
};

/// Per-restart contraction constant: 1/q + (2/q^2) sum_{i=1..q-1} (q-i) l^i,
/// by direct summation. Equals 1 at q = 1 (empty sum) or l = 1.
inline double gamma_bound(std::size_t q, double l_norm) {
    if (q < 1) throw argument_error("gamma_bound: q must be >= 1");
    if (!(l_norm >= 0.0 && l_norm <= 1.0))
        throw argument_error("gamma_bound: l_norm must lie in [0, 1]");
    const double qd = static_cast<double>(q);
    double sum = 0.0;
    double power = 1.0;
    for (std::size_t i = 1; i < q; ++i) {
        power *= l_norm;
        sum += static_cast<double>(q - i) * power;
    }
    return 1.0 / qd + 2.0 / (qd * qd) * sum;
}

/// 1 + ||A||_F / sigma_min, the M-independent factor of the plain surrounding
/// method's expectation bound (its rate is this over sqrt(M)).
inline double rs_bound_coefficient(const SpectralReport& r) {
    if (!(r.sigma_min > 0.0))
        throw numeric_error("rs_bound_coefficient: sigma_min is zero (rank-deficient)");
    return 1.0 + r.frobenius / r.sigma_min;
}

namespace detail {

/// In-place Cholesky solve of a dense SPD system; breaks down when a pivot
/// falls below 1e-13 * trace.
inline Vector spd_solve(std::vector<double> g, std::size_t n, Vector rhs) {
    if (g.size() != n * n || rhs.size() != n) throw argument_error("spd_solve: bad sizes");
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += g[i * n + i];
    const double breakdown = 1e-13 * trace;
    for (std::size_t k = 0; k < n; ++k) {
        double d = g[k * n + k];
        for (std::size_t j = 0; j < k; ++j) d -= g[k * n + j] * g[k * n + j];
        if (!(d > breakdown))
            throw numeric_error("spd_solve: Gram matrix numerically singular");
        d = std::sqrt(d);
        g[k * n + k] = d;
        for (std::size_t i = k + 1; i < n; ++i) {
            double s = g[i * n + k];
            for (std::size_t j = 0; j < k; ++j) s -= g[i * n + j] * g[k * n + j];
            g[i * n + k] = s / d;
        }
    }
    for (std::size_t i = 0; i < n; ++i) { // L y = rhs
        double s = rhs[i];
        for (std::size_t j = 0; j < i; ++j) s -= g[i * n + j] * rhs[j];
        rhs[i] = s / g[i * n + i];
    }
    for (std::size_t ii = n; ii-- > 0;) { // L^T x = y
        double s = rhs[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= g[j * n + ii] * rhs[j];
        rhs[ii] = s / g[ii * n + ii];
    }
    return rhs;
}

} // namespace detail

/// Minimum-norm solution A^+ b of a consistent system: solves (A A^T) y = b,
/// x = A^T y when m <= n, or the normal equations when m > n. Verifies the
/// residual afterwards.
inline Vector min_norm_solution(const Matrix& a, const Vector& b,
                                std::size_t dense_limit = kDenseOracleLimit) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (b.size() != m) throw argument_error("min_norm_solution: rhs length mismatch");
    if (std::min(m, n) > dense_limit)
        throw numeric_error("min_norm_solution: min(m,n) exceeds the dense threshold");

    Vector x;
    if (m <= n) {
        Vector y = detail::spd_solve(gram_aat(a), m, b);
        x.assign(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) a.row_axpy(i, y[i], x);
    } else {
        Vector atb(n, 0.0);
        for (std::size_t i = 0; i < m; ++i) a.row_axpy(i, b[i], atb);
        x = detail::spd_solve(gram_ata(a), n, std::move(atb));
    }
    const double resid = norm(sub(a.multiply(x), b));
    if (resid > 1e-8 * std::max(norm(b), 1e-300))
        throw numeric_error("min_norm_solution: residual check failed, system inconsistent");
    return x;
}

/// Orthogonal projection of v onto range(A^T), via the eigenvectors of A^T A
/// whose eigenvalue exceeds rel_tol * lambda_max. Oracle for row-space
/// confinement checks.
inline Vector project_row_space(const Matrix& a, const Vector& v, double rel_tol = 1e-10) {
    const std::size_t n = a.cols();
    if (v.size() != n) throw argument_error("project_row_space: length mismatch");
    if (n > kDenseOracleLimit) throw numeric_error("project_row_space: dimension over threshold");
    auto eig = jacobi_eigen(gram_ata(a), n, /*want_vectors=*/true);
    const double lam_max = eig.values.empty() ? 0.0 : eig.values.back();
    Vector out(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (eig.values[k] <= rel_tol * lam_max) continue;
        double coef = 0.0;
        for (std::size_t i = 0; i < n; ++i) coef += eig.vectors[i * n + k] * v[i];
        for (std::size_t i = 0; i < n; ++i) out[i] += coef * eig.vectors[i * n + k];
    }
    return out;
}

/// ERR = ||x - x_ref||^2 / ||x0 - x_ref||^2, the squared relative error used
/// as the stopping metric.
inline double err(const Vector& x, const Vector& x_ref, const Vector& x0) {
    const double den = distance_sq(x0, x_ref);
    if (den == 0.0) throw argument_error("err: x0 equals x_ref, denominator degenerate");
    return distance_sq(x, x_ref) / den;
}

/// 10 log10(signal power / error power) in dB; +infinity when the estimate
/// matches the clean signal exactly.
inline double snr(const Vector& x_clean, const Vector& x_hat) {
    const double sig = sq_norm(x_clean);
    if (sig == 0.0) throw argument_error("snr: clean signal is zero");
    const double noise = distance_sq(x_clean, x_hat);
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(sig / noise);
}

} // namespace rrs
