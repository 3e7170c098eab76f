#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "psvd/cost.hpp"
#include "psvd/io.hpp"
#include "psvd/matrix.hpp"
#include "psvd/svd.hpp"

namespace psvd {

// splitmix64; mixes (master seed, size, trial) into a per-trial seed so that
// results are independent of execution order.
inline std::uint64_t mix_seed(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_trial_seed(std::uint64_t master, std::uint64_t size, std::uint64_t trial)
{
    return mix_seed(master ^ mix_seed(size * 0x100000001b3ull + trial));
}

// Standard-normal generator: mt19937_64 (bit-exact across platforms) with a
// hand-rolled Box-Muller transform, so the stream does not depend on the
// standard library's distribution implementation.
class NormalSampler {
public:
    explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

    double operator()()
    {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1], u2 in [0, 1)
        const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1p-53;
        const double u2 = static_cast<double>(rng_() >> 11) * 0x1p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Entries i.i.d. standard normal; identical seed gives a bit-identical matrix.
inline DenseMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed)
{
    if (m < 1 || n < 1) throw std::invalid_argument("random_matrix: dimensions must be positive");
    NormalSampler sample(seed);
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = sample();
    return a;
}

enum class EntryDistribution { standard_normal, uniform01 };

// Seeded draw with a pluggable entry distribution. The iteration statistics
// of both algorithms depend visibly on the entry law; uniform [0,1) entries
// reproduce the published iteration fits, so the experiments default to it.
inline DenseMatrix random_matrix(std::size_t m, std::size_t n, std::uint64_t seed,
                                 EntryDistribution dist)
{
    if (dist == EntryDistribution::standard_normal) return random_matrix(m, n, seed);
    if (m < 1 || n < 1) throw std::invalid_argument("random_matrix: dimensions must be positive");
    std::mt19937_64 rng(seed);
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            a(i, j) = static_cast<double>(rng() >> 11) * 0x1p-53;
    return a;
}

inline void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn)
{
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned width = std::min<unsigned>(threads, static_cast<unsigned>(count));
    pool.reserve(width);
    for (unsigned t = 0; t < width; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

struct ExperimentSpec {
    Algorithm algorithm = Algorithm::grk_svd;
    ExecModel mode = ExecModel::dsc;
    std::vector<std::size_t> sizes;
    std::size_t trials_per_size = 250;
    double delta = 1e-6;
    std::uint64_t seed = 0x5eed;
    EntryDistribution distribution = EntryDistribution::uniform01;
    std::filesystem::path out_dir;

    void validate() const
    {
        if (sizes.empty()) throw std::invalid_argument("experiment: at least one size required");
        for (std::size_t s : sizes)
            if (s < 3) throw std::invalid_argument("experiment: sizes must be >= 3");
        if (trials_per_size < 1) throw std::invalid_argument("experiment: trials must be >= 1");
        if (delta <= 0.0) throw std::invalid_argument("experiment: delta must be positive");
    }
};

namespace detail {

inline SvdOptions run_options(const ExperimentSpec& spec, bool vectors)
{
    SvdOptions opt;
    opt.engine = spec.mode == ExecModel::hybrid ? Engine::hybrid : Engine::digital;
    opt.delta = spec.delta;
    opt.compute_vectors = vectors;
    return opt;
}

inline SvdResult run_algorithm(Algorithm alg, const DenseMatrix& a, const SvdOptions& opt)
{
    return alg == Algorithm::qr_svd ? qr_svd(a, opt) : grk_svd(a, opt);
}

inline double median_of(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

struct SizeMedian {
    std::size_t size = 0;
    double median = 0.0;
};

// Least-squares line through (size, median) pairs.
inline LinearFit fit_line(const std::vector<SizeMedian>& pts)
{
    if (pts.size() < 2) throw std::invalid_argument("fit_line: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const SizeMedian& p : pts) {
        const double x = static_cast<double>(p.size);
        sx += x;
        sy += p.median;
        sxx += x * x;
        sxy += x * p.median;
    }
    const double n = static_cast<double>(pts.size());
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

struct TrialRecord {
    std::size_t size = 0;
    std::size_t trial = 0;
    std::uint64_t iterations = 0;
    bool converged = false;
};

struct RegressionResult {
    LinearFit fit;
    std::vector<SizeMedian> medians;
    std::vector<TrialRecord> trials;  // ordered by (size, trial)
    std::size_t nonconverged = 0;
    double residual_rms = 0.0;
};

// Iterations-to-threshold per trial, per-size medians over converged trials,
// and the least-squares fit of median vs size. Trials run in parallel; each
// derives its seed from (master seed, size, trial) so the records do not
// depend on scheduling.
inline RegressionResult iteration_regression(const ExperimentSpec& spec, unsigned threads = 1)
{
    spec.validate();
    RegressionResult out;
    out.trials.resize(spec.sizes.size() * spec.trials_per_size);
    parallel_for(out.trials.size(), threads, [&](std::size_t idx) {
        const std::size_t si = idx / spec.trials_per_size;
        const std::size_t trial = idx % spec.trials_per_size;
        const std::size_t size = spec.sizes[si];
        const DenseMatrix a =
            random_matrix(size, size, derive_trial_seed(spec.seed, size, trial), spec.distribution);
        const SvdResult r = detail::run_algorithm(spec.algorithm, a, detail::run_options(spec, false));
        out.trials[idx] = {size, trial, r.iterations, r.converged};
    });
    for (std::size_t si = 0; si < spec.sizes.size(); ++si) {
        std::vector<double> iters;
        iters.reserve(spec.trials_per_size);
        for (std::size_t t = 0; t < spec.trials_per_size; ++t) {
            const TrialRecord& rec = out.trials[si * spec.trials_per_size + t];
            if (rec.converged)
                iters.push_back(static_cast<double>(rec.iterations));
            else
                ++out.nonconverged;
        }
        if (!iters.empty()) out.medians.push_back({spec.sizes[si], detail::median_of(std::move(iters))});
    }
    out.fit = fit_line(out.medians);
    double ss = 0.0;
    for (const SizeMedian& p : out.medians) {
        const double r = p.median - (out.fit.slope * static_cast<double>(p.size) + out.fit.intercept);
        ss += r * r;
    }
    out.residual_rms = std::sqrt(ss / static_cast<double>(out.medians.size()));
    return out;
}

inline void write_iterations_csv(std::ostream& os, const RegressionResult& r)
{
    os << "size,trial,iterations,converged\n";
    for (const TrialRecord& t : r.trials)
        os << t.size << ',' << t.trial << ',' << t.iterations << ',' << (t.converged ? 1 : 0) << '\n';
}

struct TraceResult {
    std::vector<std::vector<double>> traces;  // per trial: error at sweep 0, 1, ...
};

// Off-diagonal error after every sweep, one series per trial.
inline TraceResult convergence_trace(Algorithm alg, std::size_t m, std::size_t n, std::size_t trials,
                                     std::uint64_t seed, double delta = 1e-6, unsigned threads = 1,
                                     EntryDistribution dist = EntryDistribution::uniform01)
{
    if (trials < 1) throw std::invalid_argument("convergence_trace: trials must be >= 1");
    TraceResult out;
    out.traces.resize(trials);
    parallel_for(trials, threads, [&](std::size_t t) {
        SvdOptions opt;
        opt.delta = delta;
        opt.compute_vectors = false;
        std::vector<double> trace;
        opt.trace = &trace;
        const DenseMatrix a = random_matrix(m, n, derive_trial_seed(seed, m * 1000003 + n, t), dist);
        (void)detail::run_algorithm(alg, a, opt);
        out.traces[t] = std::move(trace);
    });
    return out;
}

inline void write_trace_csv(std::ostream& os, const TraceResult& r)
{
    os << "trial,iteration,error\n";
    for (std::size_t t = 0; t < r.traces.size(); ++t)
        for (std::size_t k = 0; k < r.traces[t].size(); ++k)
            os << t << ',' << k << ',' << format_double(r.traces[t][k]) << '\n';
}

struct CostSweepRow {
    std::size_t n = 0;
    Algorithm algorithm = Algorithm::qr_svd;
    ExecModel mode = ExecModel::dsc;
    double time_seconds = 0.0;
    double energy_pj = 0.0;
};

// Predicted runtime and energy for both algorithms in all three execution
// models over a size range; the data behind the log-log cost plots.
inline std::vector<CostSweepRow> cost_sweep(const std::vector<std::size_t>& n_values,
                                            const LinearFit& qr_fit = kQrSvdIterationFit,
                                            const LinearFit& grk_fit = kGrkIterationFit,
                                            const CostTables& tables = {})
{
    std::vector<CostSweepRow> rows;
    rows.reserve(n_values.size() * 6);
    for (std::size_t n : n_values) {
        for (Algorithm alg : {Algorithm::qr_svd, Algorithm::grk_svd}) {
            const LinearFit& fit = alg == Algorithm::qr_svd ? qr_fit : grk_fit;
            for (ExecModel mode : {ExecModel::dsc, ExecModel::dmc, ExecModel::hybrid}) {
                const CostPrediction p = predict_expected_cost(alg, mode, n, fit, tables);
                rows.push_back({n, alg, mode, p.seconds, p.energy_pj});
            }
        }
    }
    return rows;
}

inline void write_costs_csv(std::ostream& os, const std::vector<CostSweepRow>& rows)
{
    os << "n,algorithm,mode,time_seconds,energy_pj\n";
    for (const CostSweepRow& r : rows)
        os << r.n << ',' << algorithm_name(r.algorithm) << ',' << model_name(r.mode) << ','
           << format_double(r.time_seconds) << ',' << format_double(r.energy_pj) << '\n';
}

struct SelfcheckRow {
    std::size_t n = 0;
    double predicted_units = 0.0;
    double measured_seconds = 0.0;
    double ratio = 0.0;  // measured / predicted
};

// Wallclock check of the time model for the single-core digital
// implementation: per size, the median wallclock of `reps` full runs against
// the priced instrumented counter. The unit duration assumes a 4 GHz core.
inline std::vector<SelfcheckRow> wallclock_selfcheck(Algorithm alg,
                                                     const std::vector<std::size_t>& n_values,
                                                     std::size_t reps = 3, std::uint64_t seed = 0x5eed,
                                                     const CostTables& tables = {})
{
    if (reps < 1) throw std::invalid_argument("wallclock_selfcheck: reps must be >= 1");
    std::vector<SelfcheckRow> rows;
    for (std::size_t n : n_values) {
        const DenseMatrix a = random_matrix(n, n, derive_trial_seed(seed, n, 0));
        SvdOptions opt;
        std::vector<double> times;
        OpCounter ops;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const SvdResult r = detail::run_algorithm(alg, a, opt);
            const auto t1 = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double>(t1 - t0).count());
            ops = r.counters;
        }
        const double measured = detail::median_of(std::move(times));
        const TimeCost tc = time_cost(ops, tables, ExecModel::dsc);
        rows.push_back({n, tc.units, measured, measured / tc.seconds});
    }
    return rows;
}

inline void write_selfcheck_csv(std::ostream& os, const std::vector<SelfcheckRow>& rows)
{
    os << "n,predicted_units,measured_seconds,ratio\n";
    for (const SelfcheckRow& r : rows)
        os << r.n << ',' << format_double(r.predicted_units) << ','
           << format_double(r.measured_seconds) << ',' << format_double(r.ratio) << '\n';
}

}  // namespace psvd
