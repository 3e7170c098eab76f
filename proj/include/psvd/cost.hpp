#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "psvd/count_tables.hpp"
#include "psvd/op_counter.hpp"

namespace psvd {

// Relative time weights, the absolute unit duration, and the energy
// parameters. Defaults reproduce the published model: one time unit is a
// 4 GHz CPU cycle (0.25 ns), a chip operation prices at 12.5 ns, CPU energy
// at 375 pJ per time unit, GPU energy at 32.24 pJ per operation, and chip
// energies scale with the mesh size n as 640 n(n-1) pJ per configuration
// and 320 n pJ per pass.
struct CostTables {
    std::array<double, kOpKindCount> relative_time = {1, 1, 20, 15, 4, 4, 10000, 50};
    double unit_duration = 0.25e-9;       // seconds per time unit
    double cpu_energy_per_unit = 375.0;   // pJ
    double gpu_energy_per_op = 32.24;     // pJ
    double chip_config_energy_coeff = 640.0;
    double chip_op_energy_coeff = 320.0;

    double weight(OpKind k) const { return relative_time[static_cast<std::size_t>(k)]; }
    double chip_config_energy(std::size_t n) const
    {
        return chip_config_energy_coeff * static_cast<double>(n) * static_cast<double>(n - 1);
    }
    double chip_op_energy(std::size_t n) const
    {
        return chip_op_energy_coeff * static_cast<double>(n);
    }

    void validate() const
    {
        for (double w : relative_time)
            if (!(w > 0.0)) throw std::invalid_argument("cost tables: weights must be positive");
        if (!(unit_duration > 0.0) || !(cpu_energy_per_unit > 0.0) || !(gpu_energy_per_op > 0.0) ||
            !(chip_config_energy_coeff > 0.0) || !(chip_op_energy_coeff > 0.0))
            throw std::invalid_argument("cost tables: parameters must be positive");
    }
};

// Flat key-value override format: one `key value` pair per line, keys are
// operation kinds (time weights) or parameter names; '#' starts a comment.
inline CostTables load_cost_tables(std::istream& in, CostTables base = {})
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        double value = 0.0;
        if (!(ls >> value)) throw std::invalid_argument("cost tables: missing value for key '" + key + "'");
        std::string extra;
        if (ls >> extra) throw std::invalid_argument("cost tables: trailing token after key '" + key + "'");
        if (key == "unit_duration") base.unit_duration = value;
        else if (key == "cpu_energy_per_unit") base.cpu_energy_per_unit = value;
        else if (key == "gpu_energy_per_op") base.gpu_energy_per_op = value;
        else if (key == "chip_config_energy_coeff") base.chip_config_energy_coeff = value;
        else if (key == "chip_op_energy_coeff") base.chip_op_energy_coeff = value;
        else base.relative_time[static_cast<std::size_t>(op_kind_from_string(key))] = value;
    }
    base.validate();
    return base;
}

namespace detail {

// Exact evaluation in thirds with one final half-up rounding. Values inside
// the validity domain are non-negative; a negative result means the request
// was outside it.
inline std::uint64_t eval_terms(Algorithm alg, count_tables::Column col, Phase phase, OpKind kind,
                                std::uint64_t m, std::uint64_t n, std::uint64_t c)
{
    __int128 thirds = 0;
    for (const count_tables::Term& t : count_tables::kTerms) {
        if (t.alg != alg || t.col != col || t.kind != kind) continue;
        if (phase != Phase::whole && t.phase != phase) continue;
        __int128 v = t.num * (t.den == 1 ? 3 : 1);
        for (std::uint8_t i = 0; i < t.pm; ++i) v *= static_cast<__int128>(m);
        for (std::uint8_t i = 0; i < t.pn; ++i) v *= static_cast<__int128>(n);
        for (std::uint8_t i = 0; i < t.pc; ++i) v *= static_cast<__int128>(c);
        thirds += v;
    }
    if (thirds < 0) throw std::invalid_argument("analytic count is negative outside the validity domain");
    const __int128 q = thirds / 3, r = thirds % 3;
    return static_cast<std::uint64_t>(q + (r >= 2 ? 1 : 0));
}

inline count_tables::Column column_of(ExecModel model)
{
    switch (model) {
    case ExecModel::dsc: return count_tables::Column::dsc;
    case ExecModel::dmc: return count_tables::Column::dmc;
    case ExecModel::hybrid: return count_tables::Column::hybrid;
    }
    throw std::invalid_argument("bad ExecModel");
}

}  // namespace detail

inline void check_count_domain(Algorithm alg, Phase phase, std::uint64_t m, std::uint64_t n,
                               std::uint64_t c)
{
    if (m < n || n < 2) throw std::invalid_argument("analytic counts require m >= n >= 2");
    if (c < 1) throw std::invalid_argument("analytic counts require C >= 1");
    if (alg == Algorithm::qr_svd && phase != Phase::whole)
        throw std::invalid_argument("QR-SVD has no bidiagonalization/iteration phases");
}

// Expected operation counts from the published polynomials.
inline OpCounter analytic_counts(Algorithm alg, ExecModel model, std::uint64_t m, std::uint64_t n,
                                 std::uint64_t c, Phase phase = Phase::whole)
{
    check_count_domain(alg, phase, m, n, c);
    OpCounter out;
    const count_tables::Column col = detail::column_of(model);
    for (std::size_t k = 0; k < kOpKindCount; ++k) {
        const OpKind kind = static_cast<OpKind>(k);
        out.set(kind, detail::eval_terms(alg, col, phase, kind, m, n, c));
    }
    return out;
}

// Elementary operations executed on the GPU in the D-MC model (the energy
// basis): total count minus the parallelized CPU-side count.
inline OpCounter analytic_gpu_actual(Algorithm alg, std::uint64_t m, std::uint64_t n, std::uint64_t c,
                                     Phase phase = Phase::whole)
{
    check_count_domain(alg, phase, m, n, c);
    OpCounter out;
    out.add = detail::eval_terms(alg, count_tables::Column::gpu_actual, phase, OpKind::add, m, n, c);
    out.mul = detail::eval_terms(alg, count_tables::Column::gpu_actual, phase, OpKind::mul, m, n, c);
    return out;
}

inline void check_counter_model(const OpCounter& ops, ExecModel model)
{
    const bool has_gpu = ops.add_gpu || ops.mul_gpu;
    const bool has_chip = ops.chip_config || ops.chip_op;
    if (model == ExecModel::dsc && (has_gpu || has_chip))
        throw std::invalid_argument("D-SC counter must not carry GPU or chip counts");
    if (model == ExecModel::dmc && has_chip)
        throw std::invalid_argument("D-MC counter must not carry chip counts");
    if (model == ExecModel::hybrid && has_gpu)
        throw std::invalid_argument("hybrid counter must not carry GPU counts");
}

struct TimeCost {
    double units = 0.0;
    double seconds = 0.0;
};

inline TimeCost time_cost(const OpCounter& ops, const CostTables& tables, ExecModel model)
{
    check_counter_model(ops, model);
    double units = 0.0;
    for (std::size_t k = 0; k < kOpKindCount; ++k) {
        const OpKind kind = static_cast<OpKind>(k);
        units += tables.weight(kind) * static_cast<double>(ops.get(kind));
    }
    return {units, units * tables.unit_duration};
}

inline double cpu_time_units(const OpCounter& ops, const CostTables& tables)
{
    return tables.weight(OpKind::add) * static_cast<double>(ops.add) +
           tables.weight(OpKind::mul) * static_cast<double>(ops.mul) +
           tables.weight(OpKind::div) * static_cast<double>(ops.div) +
           tables.weight(OpKind::sqrt) * static_cast<double>(ops.sqrt);
}

// Energy in pJ. CPU work is priced per time unit, the counter's GPU entries
// per operation (for physical energy they must hold the actual GPU counts,
// not parallel steps), chip work by the size-dependent Table-4 formulas.
inline double energy_cost(const OpCounter& ops, const CostTables& tables, ExecModel model,
                          std::size_t chip_n)
{
    check_counter_model(ops, model);
    double pj = cpu_time_units(ops, tables) * tables.cpu_energy_per_unit;
    pj += static_cast<double>(ops.add_gpu + ops.mul_gpu) * tables.gpu_energy_per_op;
    if (ops.chip_config || ops.chip_op) {
        if (chip_n < 1) throw std::invalid_argument("energy_cost: chip size required for chip counts");
        pj += static_cast<double>(ops.chip_config) * tables.chip_config_energy(chip_n);
        pj += static_cast<double>(ops.chip_op) * tables.chip_op_energy(chip_n);
    }
    return pj;
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Fig. 3 iteration fits (median iterations vs size).
inline constexpr LinearFit kQrSvdIterationFit{13.88, -78.61};
inline constexpr LinearFit kGrkIterationFit{1.47, 0.83};

inline std::uint64_t expected_iterations(const LinearFit& fit, std::size_t n)
{
    const double c = std::floor(fit.slope * static_cast<double>(n) + fit.intercept + 0.5);
    return c < 1.0 ? 1 : static_cast<std::uint64_t>(c);
}

struct CostPrediction {
    std::uint64_t iterations = 0;
    double time_units = 0.0;
    double seconds = 0.0;
    double energy_pj = 0.0;
};

// Expected cost of one n x n decomposition under the given execution model,
// combining the iteration fit with the analytic counts. This is the curve
// generator for the runtime and energy sweeps.
inline CostPrediction predict_expected_cost(Algorithm alg, ExecModel model, std::size_t n,
                                            const LinearFit& fit, const CostTables& tables = {})
{
    if (n < 3) throw std::invalid_argument("predict_expected_cost: n >= 3 required");
    CostPrediction out;
    out.iterations = expected_iterations(fit, n);
    const OpCounter ops = analytic_counts(alg, model, n, n, out.iterations);
    const TimeCost tc = time_cost(ops, tables, model);
    out.time_units = tc.units;
    out.seconds = tc.seconds;
    if (model == ExecModel::dmc) {
        OpCounter energy_basis = ops;
        const OpCounter actual = analytic_gpu_actual(alg, n, n, out.iterations);
        energy_basis.add_gpu = actual.add;
        energy_basis.mul_gpu = actual.mul;
        out.energy_pj = energy_cost(energy_basis, tables, model, n);
    } else {
        out.energy_pj = energy_cost(ops, tables, model, n);
    }
    return out;
}

}  // namespace psvd
