#pragma once

// Test-only oracles and helpers, independent of the library's decomposition
// code paths.

#include <cmath>
#include <random>
#include <vector>

#include "psvd/givens.hpp"
#include "psvd/matrix.hpp"

namespace testutil {

inline psvd::DenseMatrix random_gaussian(std::size_t m, std::size_t n, std::uint32_t seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> nd;
    psvd::DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = nd(rng);
    return a;
}

inline psvd::DenseMatrix embed_rotation(std::size_t n, const psvd::GivensRotation& g)
{
    psvd::DenseMatrix m = psvd::DenseMatrix::identity(n);
    m(g.i, g.i) = g.c;
    m(g.i, g.j) = -g.s;
    m(g.j, g.i) = g.s;
    m(g.j, g.j) = g.c;
    return m;
}

inline double reconstruction_error(const psvd::DenseMatrix& a, const psvd::DenseMatrix& u,
                                   const std::vector<double>& sigma, const psvd::DenseMatrix& v)
{
    psvd::DenseMatrix s(u.cols(), v.cols(), 0.0);
    for (std::size_t i = 0; i < sigma.size(); ++i) s(i, i) = sigma[i];
    const psvd::DenseMatrix rec = multiply(multiply(u, s), transpose(v));
    double err = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) err = std::max(err, std::abs(rec(i, j) - a(i, j)));
    return err;
}

inline double orthogonality_error(const psvd::DenseMatrix& q)
{
    return max_abs_deviation_from_identity(multiply(transpose(q), q));
}

// Cyclic Jacobi eigenvalue solver for symmetric matrices; the independent
// oracle for singular values via eig(A^T A).
inline std::vector<double> jacobi_eigenvalues(psvd::DenseMatrix s)
{
    const std::size_t n = s.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(s(p, q)));
        if (off < 1e-14) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = s(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = s(k, p), akq = s(k, q);
                    s(k, p) = c * akp - sn * akq;
                    s(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = s(p, k), aqk = s(q, k);
                    s(p, k) = c * apk - sn * aqk;
                    s(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = s(i, i);
    std::sort(eig.begin(), eig.end(), std::greater<>());
    return eig;
}

// Singular values of A as sqrt of the eigenvalues of A^T A, descending.
inline std::vector<double> oracle_singular_values(const psvd::DenseMatrix& a)
{
    const psvd::DenseMatrix ata = multiply(transpose(a), a);
    std::vector<double> eig = jacobi_eigenvalues(ata);
    for (double& e : eig) e = std::sqrt(std::max(0.0, e));
    return eig;
}

}  // namespace testutil
