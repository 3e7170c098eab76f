#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "psvd/matrix.hpp"
#include "psvd/op_counter.hpp"

namespace psvd {

// Plane rotation in ratio (tangent) form: the 2x2 block restricted to
// planes (i, j) is
//
//     1/sqrt(1+r^2) * [ 1  -r ]
//                     [ r   1 ]
//
// i.e. c = 1/sqrt(1+r^2), s = r*c. A quarter turn (c = 0) is represented
// with r = +-infinity.
struct GivensRotation {
    std::size_t i = 0;
    std::size_t j = 0;
    double r = 0.0;
    double c = 1.0;
    double s = 0.0;
};

// Cost per spec convention: 1 mul (r*r), 1 add (1+r^2), 1 sqrt, 1 div.
inline GivensRotation givens_from_ratio(std::size_t i, std::size_t j, double r, OpCounter& ops)
{
    if (i >= j) throw std::invalid_argument("givens_from_ratio: requires i < j");
    if (!std::isfinite(r)) throw std::invalid_argument("givens_from_ratio: ratio must be finite");
    ops.mul += 1;
    ops.add += 1;
    ops.sqrt += 1;
    ops.div += 1;
    GivensRotation g;
    g.i = i;
    g.j = j;
    g.r = r;
    const double rr = r * r;
    if (std::isinf(rr)) {
        // |r| beyond ~1e154: the block is a quarter turn in working precision.
        g.c = 0.0;
        g.s = r > 0 ? 1.0 : -1.0;
    } else {
        g.c = 1.0 / std::sqrt(1.0 + rr);
        g.s = r * g.c;
    }
    return g;
}

// c = 0, s = sign: the totalization of the ratio recurrence when the pivot
// entry is zero but the running value is not.
inline GivensRotation givens_quarter_turn(std::size_t i, std::size_t j, double sign)
{
    if (i >= j) throw std::invalid_argument("givens_quarter_turn: requires i < j");
    GivensRotation g;
    g.i = i;
    g.j = j;
    g.r = sign > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    g.c = 0.0;
    g.s = sign > 0 ? 1.0 : -1.0;
    return g;
}

// G^T = G(-r).
inline GivensRotation transposed(const GivensRotation& g)
{
    GivensRotation t = g;
    t.r = -g.r;
    t.s = -g.s;
    return t;
}

// Rows i, j <- (c*row_i - s*row_j, s*row_i + c*row_j). 4 mul + 2 add per column.
inline void apply_givens_left(DenseMatrix& m, const GivensRotation& g, OpCounter& ops)
{
    if (g.j >= m.rows()) throw std::invalid_argument("apply_givens_left: plane index out of range");
    double* ri = m.row_ptr(g.i);
    double* rj = m.row_ptr(g.j);
    const double c = g.c, s = g.s;
    for (std::size_t k = 0; k < m.cols(); ++k) {
        const double x = ri[k], y = rj[k];
        ri[k] = c * x - s * y;
        rj[k] = s * x + c * y;
    }
    ops.mul += 4 * m.cols();
    ops.add += 2 * m.cols();
}

// Columns i, j <- (c*col_i + s*col_j, -s*col_i + c*col_j), i.e. M <- M*G.
inline void apply_givens_right(DenseMatrix& m, const GivensRotation& g, OpCounter& ops)
{
    if (g.j >= m.cols()) throw std::invalid_argument("apply_givens_right: plane index out of range");
    const double c = g.c, s = g.s;
    for (std::size_t k = 0; k < m.rows(); ++k) {
        double* row = m.row_ptr(k);
        const double x = row[g.i], y = row[g.j];
        row[g.i] = c * x + s * y;
        row[g.j] = -s * x + c * y;
    }
    ops.mul += 4 * m.rows();
    ops.add += 2 * m.rows();
}

struct AnnihilationSequence {
    // Adjacent-plane rotations in application order: (d-2,d-1) first, (0,1) last.
    std::vector<GivensRotation> rotations;
    double norm = 0.0;         // ||a||_2
    double final_value = 0.0;  // signed pivot after all rotations: +-norm
};

// Ratio recurrence of the photonics-optimized QR: walking the vector bottom-up,
// r = -d/a_{l-1} and d <- (a_{l-1} - r*d)/sqrt(1+r^2) accumulate the running
// norm in d, so generating all ratios is O(d) scalar work. The ordered product
// of the returned rotations maps a to (+-||a||, 0, ..., 0).
inline AnnihilationSequence annihilation_sequence(std::span<const double> a, OpCounter& ops)
{
    const std::size_t d = a.size();
    if (d == 0) throw std::invalid_argument("annihilation_sequence: empty vector");
    AnnihilationSequence out;
    out.rotations.reserve(d - 1);
    double run = a[d - 1];
    for (std::size_t l = d - 1; l >= 1; --l) {
        const double pivot = a[l - 1];
        // Uniform cost per rotation regardless of branch: ratio (1 div + 1 add
        // for the negation) plus the recurrence update
        // d <- (a_{l-1} - r d)/sqrt(1+r^2) (2 mul, 2 add, 1 sqrt, 1 div);
        // the rotation build itself counts inside givens_from_ratio.
        ops.div += 2;
        ops.add += 3;
        ops.mul += 2;
        ops.sqrt += 1;
        GivensRotation g;
        if (pivot == 0.0 && run == 0.0) {
            g = givens_from_ratio(l - 1, l, 0.0, ops);
        } else if (pivot == 0.0) {
            g = givens_quarter_turn(l - 1, l, run > 0 ? 1.0 : -1.0);
            ops.mul += 1;  // keep the build cost uniform with givens_from_ratio
            ops.add += 1;
            ops.sqrt += 1;
            ops.div += 1;
        } else {
            g = givens_from_ratio(l - 1, l, -run / pivot, ops);
        }
        // The recurrence value equals the rotation acting on (pivot, run).
        run = g.c * pivot - g.s * run;
        out.rotations.push_back(g);
    }
    out.final_value = run;
    out.norm = std::abs(run);
    return out;
}

}  // namespace psvd
