#pragma once

#include <cstdint>

#include "psvd/op_counter.hpp"

namespace psvd {

enum class Algorithm { qr_svd, grk_svd };
enum class ExecModel { dsc, dmc, hybrid };
enum class Phase { whole, bidiag, qr_iter };

inline const char* algorithm_name(Algorithm a) { return a == Algorithm::qr_svd ? "qr-svd" : "grk-svd"; }

inline const char* model_name(ExecModel m)
{
    switch (m) {
    case ExecModel::dsc: return "dsc";
    case ExecModel::dmc: return "dmc";
    case ExecModel::hybrid: return "hybrid";
    }
    return "?";
}

namespace count_tables {

// Which column of the published count tables a row belongs to. The
// gpu_actual column holds the elementary operations actually executed by
// the GPU in the D-MC model (total minus the CPU-side parallelized count);
// it prices energy, never time.
enum class Column : std::uint8_t { dsc, dmc, hybrid, gpu_actual };

// One monomial (num/den) * m^pm * n^pn * C^pc of a count polynomial.
// den is 1 or 3; evaluation keeps everything in exact thirds and rounds
// half-up once at the end.
struct Term {
    Algorithm alg;
    Column col;
    Phase phase;  // qr_svd rows are whole; grk_svd rows are bidiag or qr_iter
    OpKind kind;
    std::int32_t num;
    std::int32_t den;
    std::uint8_t pm;
    std::uint8_t pn;
    std::uint8_t pc;
};

inline constexpr Algorithm QR = Algorithm::qr_svd;
inline constexpr Algorithm GRK = Algorithm::grk_svd;
inline constexpr Phase WH = Phase::whole;
inline constexpr Phase BD = Phase::bidiag;
inline constexpr Phase QI = Phase::qr_iter;

// Transcription of the operation-count tables (per-iteration terms carry
// pc = 1). Verified against the pinned examples and the identity
// gpu_actual = total - parallelized.
inline constexpr Term kTerms[] = {
    // ---- QR-SVD, single core (total counts) ----
    {QR, Column::dsc, WH, OpKind::add, 1, 1, 3, 1, 1},
    {QR, Column::dsc, WH, OpKind::add, 1, 1, 3, 0, 1},
    {QR, Column::dsc, WH, OpKind::add, 2, 1, 2, 1, 1},
    {QR, Column::dsc, WH, OpKind::add, -1, 3, 1, 3, 1},
    {QR, Column::dsc, WH, OpKind::add, 19, 3, 1, 1, 1},
    {QR, Column::dsc, WH, OpKind::add, -1, 1, 1, 0, 1},
    {QR, Column::dsc, WH, OpKind::add, 2, 3, 0, 4, 1},
    {QR, Column::dsc, WH, OpKind::add, 5, 3, 0, 3, 1},
    {QR, Column::dsc, WH, OpKind::add, 1, 3, 0, 2, 1},
    {QR, Column::dsc, WH, OpKind::add, 19, 3, 0, 1, 1},
    {QR, Column::dsc, WH, OpKind::add, -7, 1, 0, 0, 1},
    {QR, Column::dsc, WH, OpKind::mul, 1, 1, 3, 1, 1},
    {QR, Column::dsc, WH, OpKind::mul, 1, 1, 3, 0, 1},
    {QR, Column::dsc, WH, OpKind::mul, 3, 1, 2, 1, 1},
    {QR, Column::dsc, WH, OpKind::mul, -1, 3, 1, 3, 1},
    {QR, Column::dsc, WH, OpKind::mul, -1, 1, 1, 2, 1},
    {QR, Column::dsc, WH, OpKind::mul, 16, 3, 1, 1, 1},
    {QR, Column::dsc, WH, OpKind::mul, -1, 1, 1, 0, 1},
    {QR, Column::dsc, WH, OpKind::mul, 2, 3, 0, 4, 1},
    {QR, Column::dsc, WH, OpKind::mul, 7, 3, 0, 3, 1},
    {QR, Column::dsc, WH, OpKind::mul, 1, 3, 0, 2, 1},
    {QR, Column::dsc, WH, OpKind::mul, 8, 3, 0, 1, 1},
    {QR, Column::dsc, WH, OpKind::mul, -5, 1, 0, 0, 1},
    {QR, Column::dsc, WH, OpKind::div, 2, 1, 0, 1, 1},
    {QR, Column::dsc, WH, OpKind::div, -1, 1, 0, 0, 1},
    {QR, Column::dsc, WH, OpKind::sqrt, 4, 1, 0, 1, 1},
    {QR, Column::dsc, WH, OpKind::sqrt, -2, 1, 0, 0, 1},
    // ---- QR-SVD, multi core (parallelized counts) ----
    {QR, Column::dmc, WH, OpKind::add, 3, 1, 1, 1, 1},
    {QR, Column::dmc, WH, OpKind::add, 5, 1, 0, 1, 1},
    {QR, Column::dmc, WH, OpKind::add, -4, 1, 0, 0, 1},
    {QR, Column::dmc, WH, OpKind::add_gpu, 2, 1, 1, 1, 1},
    {QR, Column::dmc, WH, OpKind::add_gpu, 1, 1, 1, 0, 1},
    {QR, Column::dmc, WH, OpKind::add_gpu, 9, 1, 0, 1, 1},
    {QR, Column::dmc, WH, OpKind::add_gpu, -5, 1, 0, 0, 1},
    {QR, Column::dmc, WH, OpKind::mul, 3, 1, 1, 1, 1},
    {QR, Column::dmc, WH, OpKind::mul, 3, 1, 0, 1, 1},
    {QR, Column::dmc, WH, OpKind::mul, -3, 1, 0, 0, 1},
    {QR, Column::dmc, WH, OpKind::mul_gpu, 2, 1, 1, 1, 1},
    {QR, Column::dmc, WH, OpKind::mul_gpu, 1, 1, 1, 0, 1},
    {QR, Column::dmc, WH, OpKind::mul_gpu, 7, 1, 0, 1, 1},
    {QR, Column::dmc, WH, OpKind::mul_gpu, -4, 1, 0, 0, 1},
    {QR, Column::dmc, WH, OpKind::div, 2, 1, 0, 1, 1},
    {QR, Column::dmc, WH, OpKind::div, -1, 1, 0, 0, 1},
    {QR, Column::dmc, WH, OpKind::sqrt, 4, 1, 0, 1, 1},
    {QR, Column::dmc, WH, OpKind::sqrt, -2, 1, 0, 0, 1},
    // ---- QR-SVD, actual GPU work ----
    {QR, Column::gpu_actual, WH, OpKind::add, 1, 1, 3, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, 1, 1, 3, 0, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, 2, 1, 2, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, -1, 3, 1, 3, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, 10, 3, 1, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, -1, 1, 1, 0, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, 2, 3, 0, 4, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, 5, 3, 0, 3, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, 1, 3, 0, 2, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, 4, 3, 0, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::add, -3, 1, 0, 0, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, 1, 1, 3, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, 1, 1, 3, 0, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, 3, 1, 2, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, -1, 3, 1, 3, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, -1, 1, 1, 2, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, 7, 3, 1, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, -1, 1, 1, 0, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, 2, 3, 0, 4, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, 7, 3, 0, 3, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, 1, 3, 0, 2, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, -1, 3, 0, 1, 1},
    {QR, Column::gpu_actual, WH, OpKind::mul, -2, 1, 0, 0, 1},
    // ---- QR-SVD, hybrid ----
    {QR, Column::hybrid, WH, OpKind::add, 5, 1, 1, 1, 1},
    {QR, Column::hybrid, WH, OpKind::add, -5, 1, 0, 1, 1},
    {QR, Column::hybrid, WH, OpKind::mul, 4, 1, 1, 1, 1},
    {QR, Column::hybrid, WH, OpKind::mul, -4, 1, 0, 1, 1},
    {QR, Column::hybrid, WH, OpKind::div, 3, 1, 1, 1, 1},
    {QR, Column::hybrid, WH, OpKind::div, -3, 1, 0, 1, 1},
    {QR, Column::hybrid, WH, OpKind::sqrt, 2, 1, 1, 1, 1},
    {QR, Column::hybrid, WH, OpKind::sqrt, -2, 1, 0, 1, 1},
    {QR, Column::hybrid, WH, OpKind::chip_config, 1, 1, 1, 0, 1},
    {QR, Column::hybrid, WH, OpKind::chip_config, 1, 1, 0, 1, 1},
    {QR, Column::hybrid, WH, OpKind::chip_op, 1, 1, 2, 0, 1},
    {QR, Column::hybrid, WH, OpKind::chip_op, 2, 1, 1, 1, 1},
    {QR, Column::hybrid, WH, OpKind::chip_op, 1, 1, 0, 2, 1},
    // ---- GRK-SVD, single core, bidiagonalization ----
    {GRK, Column::dsc, BD, OpKind::add, 1, 1, 3, 1, 0},
    {GRK, Column::dsc, BD, OpKind::add, 2, 1, 2, 1, 0},
    {GRK, Column::dsc, BD, OpKind::add, -1, 3, 1, 3, 0},
    {GRK, Column::dsc, BD, OpKind::add, -1, 1, 1, 2, 0},
    {GRK, Column::dsc, BD, OpKind::add, 19, 3, 1, 1, 0},
    {GRK, Column::dsc, BD, OpKind::add, -1, 1, 1, 0, 0},
    {GRK, Column::dsc, BD, OpKind::add, 2, 3, 0, 4, 0},
    {GRK, Column::dsc, BD, OpKind::add, -1, 3, 0, 3, 0},
    {GRK, Column::dsc, BD, OpKind::add, -2, 3, 0, 2, 0},
    {GRK, Column::dsc, BD, OpKind::add, 4, 3, 0, 1, 0},
    {GRK, Column::dsc, BD, OpKind::add, -8, 1, 0, 0, 0},
    {GRK, Column::dsc, BD, OpKind::mul, 1, 1, 3, 1, 0},
    {GRK, Column::dsc, BD, OpKind::mul, 3, 1, 2, 1, 0},
    {GRK, Column::dsc, BD, OpKind::mul, -1, 3, 1, 3, 0},
    {GRK, Column::dsc, BD, OpKind::mul, -2, 1, 1, 2, 0},
    {GRK, Column::dsc, BD, OpKind::mul, 16, 3, 1, 1, 0},
    {GRK, Column::dsc, BD, OpKind::mul, -1, 1, 1, 0, 0},
    {GRK, Column::dsc, BD, OpKind::mul, 2, 3, 0, 4, 0},
    {GRK, Column::dsc, BD, OpKind::mul, 1, 3, 0, 3, 0},
    {GRK, Column::dsc, BD, OpKind::mul, -5, 3, 0, 2, 0},
    {GRK, Column::dsc, BD, OpKind::mul, -1, 3, 0, 1, 0},
    {GRK, Column::dsc, BD, OpKind::mul, -5, 1, 0, 0, 0},
    {GRK, Column::dsc, BD, OpKind::div, 2, 1, 0, 1, 0},
    {GRK, Column::dsc, BD, OpKind::div, -2, 1, 0, 0, 0},
    {GRK, Column::dsc, BD, OpKind::sqrt, 4, 1, 0, 1, 0},
    {GRK, Column::dsc, BD, OpKind::sqrt, -4, 1, 0, 0, 0},
    // ---- GRK-SVD, single core, QR iteration ----
    {GRK, Column::dsc, QI, OpKind::add, 2, 1, 1, 1, 1},
    {GRK, Column::dsc, QI, OpKind::add, -2, 1, 1, 0, 1},
    {GRK, Column::dsc, QI, OpKind::add, 2, 1, 0, 2, 1},
    {GRK, Column::dsc, QI, OpKind::add, 17, 1, 0, 1, 1},
    {GRK, Column::dsc, QI, OpKind::add, -16, 1, 0, 0, 1},
    {GRK, Column::dsc, QI, OpKind::mul, 4, 1, 1, 1, 1},
    {GRK, Column::dsc, QI, OpKind::mul, -4, 1, 1, 0, 1},
    {GRK, Column::dsc, QI, OpKind::mul, 4, 1, 0, 2, 1},
    {GRK, Column::dsc, QI, OpKind::mul, 24, 1, 0, 1, 1},
    {GRK, Column::dsc, QI, OpKind::mul, -27, 1, 0, 0, 1},
    {GRK, Column::dsc, QI, OpKind::div, 4, 1, 0, 1, 1},
    {GRK, Column::dsc, QI, OpKind::div, -3, 1, 0, 0, 1},
    {GRK, Column::dsc, QI, OpKind::sqrt, 2, 1, 0, 1, 1},
    {GRK, Column::dsc, QI, OpKind::sqrt, -1, 1, 0, 0, 1},
    // ---- GRK-SVD, multi core, bidiagonalization ----
    {GRK, Column::dmc, BD, OpKind::add, 3, 1, 1, 1, 0},
    {GRK, Column::dmc, BD, OpKind::add, 2, 1, 0, 1, 0},
    {GRK, Column::dmc, BD, OpKind::add, -5, 1, 0, 0, 0},
    {GRK, Column::dmc, BD, OpKind::add_gpu, 2, 1, 1, 1, 0},
    {GRK, Column::dmc, BD, OpKind::add_gpu, 6, 1, 0, 1, 0},
    {GRK, Column::dmc, BD, OpKind::add_gpu, -8, 1, 0, 0, 0},
    {GRK, Column::dmc, BD, OpKind::mul, 3, 1, 1, 1, 0},
    {GRK, Column::dmc, BD, OpKind::mul, -3, 1, 0, 0, 0},
    {GRK, Column::dmc, BD, OpKind::mul_gpu, 2, 1, 1, 1, 0},
    {GRK, Column::dmc, BD, OpKind::mul_gpu, 4, 1, 0, 1, 0},
    {GRK, Column::dmc, BD, OpKind::mul_gpu, -6, 1, 0, 0, 0},
    {GRK, Column::dmc, BD, OpKind::div, 2, 1, 0, 1, 0},
    {GRK, Column::dmc, BD, OpKind::div, -2, 1, 0, 0, 0},
    {GRK, Column::dmc, BD, OpKind::sqrt, 4, 1, 0, 1, 0},
    {GRK, Column::dmc, BD, OpKind::sqrt, -4, 1, 0, 0, 0},
    // ---- GRK-SVD, multi core, QR iteration ----
    {GRK, Column::dmc, QI, OpKind::add, 7, 1, 0, 1, 1},
    {GRK, Column::dmc, QI, OpKind::add_gpu, 4, 1, 0, 1, 1},
    {GRK, Column::dmc, QI, OpKind::add_gpu, -4, 1, 0, 0, 1},
    {GRK, Column::dmc, QI, OpKind::mul, 4, 1, 0, 1, 1},
    {GRK, Column::dmc, QI, OpKind::mul, 5, 1, 0, 0, 1},
    {GRK, Column::dmc, QI, OpKind::mul_gpu, 8, 1, 0, 1, 1},
    {GRK, Column::dmc, QI, OpKind::mul_gpu, -8, 1, 0, 0, 1},
    {GRK, Column::dmc, QI, OpKind::div, 4, 1, 0, 1, 1},
    {GRK, Column::dmc, QI, OpKind::div, -3, 1, 0, 0, 1},
    {GRK, Column::dmc, QI, OpKind::sqrt, 2, 1, 0, 1, 1},
    {GRK, Column::dmc, QI, OpKind::sqrt, -1, 1, 0, 0, 1},
    // ---- GRK-SVD, hybrid, bidiagonalization ----
    {GRK, Column::hybrid, BD, OpKind::add, 5, 1, 1, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::add, -10, 1, 0, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::add, 5, 1, 0, 0, 0},
    {GRK, Column::hybrid, BD, OpKind::mul, 4, 1, 1, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::mul, -8, 1, 0, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::mul, 4, 1, 0, 0, 0},
    {GRK, Column::hybrid, BD, OpKind::div, 3, 1, 1, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::div, -6, 1, 0, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::div, 3, 1, 0, 0, 0},
    {GRK, Column::hybrid, BD, OpKind::sqrt, 2, 1, 1, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::sqrt, -4, 1, 0, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::sqrt, 2, 1, 0, 0, 0},
    {GRK, Column::hybrid, BD, OpKind::chip_config, 2, 1, 0, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::chip_op, 2, 1, 1, 1, 0},
    {GRK, Column::hybrid, BD, OpKind::chip_op, 2, 1, 0, 2, 0},
    // ---- GRK-SVD, hybrid, QR iteration ----
    {GRK, Column::hybrid, QI, OpKind::add, 18, 1, 0, 1, 1},
    {GRK, Column::hybrid, QI, OpKind::add, -16, 1, 0, 0, 1},
    {GRK, Column::hybrid, QI, OpKind::mul, 28, 1, 0, 1, 1},
    {GRK, Column::hybrid, QI, OpKind::mul, -27, 1, 0, 0, 1},
    {GRK, Column::hybrid, QI, OpKind::div, 4, 1, 0, 1, 1},
    {GRK, Column::hybrid, QI, OpKind::div, -3, 1, 0, 0, 1},
    {GRK, Column::hybrid, QI, OpKind::sqrt, 2, 1, 0, 1, 1},
    {GRK, Column::hybrid, QI, OpKind::sqrt, -1, 1, 0, 0, 1},
    {GRK, Column::hybrid, QI, OpKind::chip_config, 2, 1, 0, 0, 1},
    {GRK, Column::hybrid, QI, OpKind::chip_op, 1, 1, 1, 0, 1},
    {GRK, Column::hybrid, QI, OpKind::chip_op, 1, 1, 0, 1, 1},
    // ---- GRK-SVD, actual GPU work, bidiagonalization ----
    {GRK, Column::gpu_actual, BD, OpKind::add, 1, 1, 3, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, 2, 1, 2, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, -1, 3, 1, 3, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, -1, 1, 1, 2, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, 10, 3, 1, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, -1, 1, 1, 0, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, 2, 3, 0, 4, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, -1, 3, 0, 3, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, -2, 3, 0, 2, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, -2, 3, 0, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::add, -3, 1, 0, 0, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, 1, 1, 3, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, 3, 1, 2, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, -1, 3, 1, 3, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, -2, 1, 1, 2, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, 7, 3, 1, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, -1, 1, 1, 0, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, 2, 3, 0, 4, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, 1, 3, 0, 3, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, -5, 3, 0, 2, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, -1, 3, 0, 1, 0},
    {GRK, Column::gpu_actual, BD, OpKind::mul, -2, 1, 0, 0, 0},
    // ---- GRK-SVD, actual GPU work, QR iteration ----
    {GRK, Column::gpu_actual, QI, OpKind::add, 2, 1, 1, 1, 1},
    {GRK, Column::gpu_actual, QI, OpKind::add, -2, 1, 1, 0, 1},
    {GRK, Column::gpu_actual, QI, OpKind::add, 2, 1, 0, 2, 1},
    {GRK, Column::gpu_actual, QI, OpKind::add, 10, 1, 0, 1, 1},
    {GRK, Column::gpu_actual, QI, OpKind::add, -16, 1, 0, 0, 1},
    {GRK, Column::gpu_actual, QI, OpKind::mul, 4, 1, 1, 1, 1},
    {GRK, Column::gpu_actual, QI, OpKind::mul, -4, 1, 1, 0, 1},
    {GRK, Column::gpu_actual, QI, OpKind::mul, 4, 1, 0, 2, 1},
    {GRK, Column::gpu_actual, QI, OpKind::mul, 20, 1, 0, 1, 1},
    {GRK, Column::gpu_actual, QI, OpKind::mul, -32, 1, 0, 0, 1},
};

}  // namespace count_tables

}  // namespace psvd
