// Command-line front end: decompose matrices, count operations, price
// runtime/energy, and run the reproduction experiments. Every behaviour is a
// thin shell over the library; exit codes are 0 (success/converged),
// 2 (non-convergence), 1 (usage or I/O error).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "psvd/cost.hpp"
#include "psvd/experiments.hpp"
#include "psvd/io.hpp"
#include "psvd/svd.hpp"

namespace fs = std::filesystem;
using namespace psvd;

namespace {

constexpr std::uint64_t kDefaultSeed = 0x5eed;

Algorithm parse_algorithm(const std::string& s)
{
    if (s == "qr-svd") return Algorithm::qr_svd;
    if (s == "grk-svd") return Algorithm::grk_svd;
    throw CLI::ValidationError("--alg", "expected qr-svd or grk-svd");
}

ExecModel parse_model(const std::string& s)
{
    if (s == "dsc") return ExecModel::dsc;
    if (s == "dmc") return ExecModel::dmc;
    if (s == "hybrid") return ExecModel::hybrid;
    throw CLI::ValidationError("--mode", "expected dsc, dmc or hybrid");
}

CostTables tables_from(const std::string& path_flag)
{
    std::string path = path_flag;
    if (path.empty()) {
        if (const char* env = std::getenv("PSVD_COST_TABLES")) path = env;
    }
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open cost tables file: " + path);
    return load_cost_tables(in);
}

// "5:40" (inclusive range), "5:40:5" (stride), or "8,16,32".
std::vector<std::size_t> parse_sizes(const std::string& s)
{
    std::vector<std::size_t> out;
    if (s.find(':') != std::string::npos) {
        std::size_t lo = 0, hi = 0, step = 1;
        char c1 = 0, c2 = 0;
        std::istringstream in(s);
        in >> lo >> c1 >> hi;
        if (in >> c2 >> step) {
            if (c2 != ':') throw std::invalid_argument("bad size range: " + s);
        }
        if (c1 != ':' || lo == 0 || hi < lo || step == 0)
            throw std::invalid_argument("bad size range: " + s);
        for (std::size_t n = lo; n <= hi; n += step) out.push_back(n);
        return out;
    }
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) out.push_back(std::stoul(tok));
    if (out.empty()) throw std::invalid_argument("empty size list: " + s);
    return out;
}

void print_counter(std::ostream& os, const OpCounter& ops)
{
    for (std::size_t k = 0; k < kOpKindCount; ++k) {
        const OpKind kind = static_cast<OpKind>(k);
        os << to_string(kind) << ' ' << ops.get(kind) << '\n';
    }
}

SvdOptions options_for(ExecModel mode, double tol, std::size_t max_iters)
{
    SvdOptions opt;
    opt.engine = mode == ExecModel::hybrid ? Engine::hybrid : Engine::digital;
    opt.gpu_steps = mode == ExecModel::dmc;
    opt.delta = tol;
    opt.max_iters = max_iters;
    return opt;
}

double run_energy(const SvdResult& r, ExecModel mode, const CostTables& tables, std::size_t chip_n)
{
    if (mode == ExecModel::dmc) {
        OpCounter basis = r.counters;
        basis.add_gpu = r.gpu_actual.add;
        basis.mul_gpu = r.gpu_actual.mul;
        return energy_cost(basis, tables, mode, chip_n);
    }
    return energy_cost(r.counters, tables, mode, chip_n);
}

int cmd_decompose(const std::string& alg_s, const std::string& mode_s, const std::string& input,
                  double tol, std::size_t max_iters, const std::string& factors_dir,
                  const std::string& out_path, const std::string& tables_path)
{
    if (tol <= 0.0) throw std::invalid_argument("--tol must be positive");
    const Algorithm alg = parse_algorithm(alg_s);
    const ExecModel mode = parse_model(mode_s);
    const CostTables tables = tables_from(tables_path);
    const DenseMatrix a = read_matrix_file(input);

    const SvdOptions opt = options_for(mode, tol, max_iters);
    const SvdResult r = alg == Algorithm::qr_svd ? qr_svd(a, opt) : grk_svd(a, opt);

    ResultDocument doc;
    doc.algorithm = algorithm_name(alg);
    doc.mode = model_name(mode);
    doc.rows = a.rows();
    doc.cols = a.cols();
    doc.iterations = r.iterations;
    doc.converged = r.converged;
    doc.residual_offdiag = r.residual_offdiag;
    doc.sigma = r.sigma;
    doc.counters = r.counters;
    doc.gpu_actual = r.gpu_actual;
    const TimeCost tc = time_cost(r.counters, tables, mode);
    doc.time_units = tc.units;
    doc.time_seconds = tc.seconds;
    doc.energy_pj = run_energy(r, mode, tables, std::max(a.rows(), a.cols()));
    doc.seed = 0;

    const std::string text = doc.serialize();
    if (out_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::invalid_argument("cannot write result file: " + out_path);
        out << text;
    }
    if (!factors_dir.empty()) {
        fs::create_directories(factors_dir);
        std::ofstream fu(fs::path(factors_dir) / "U.csv");
        std::ofstream fs_(fs::path(factors_dir) / "sigma.csv");
        std::ofstream fv(fs::path(factors_dir) / "V.csv");
        if (!fu || !fs_ || !fv)
            throw std::invalid_argument("cannot write factor files in " + factors_dir);
        write_matrix_csv(fu, r.u);
        for (double s : r.sigma) fs_ << format_double(s) << '\n';
        write_matrix_csv(fv, r.v);
    }
    return r.converged ? 0 : 2;
}

int cmd_count(const std::string& alg_s, const std::string& mode_s, std::size_t m, std::size_t n,
              std::size_t iters, bool analytic, bool instrumented, std::uint64_t seed,
              const std::string& phase_s)
{
    const Algorithm alg = parse_algorithm(alg_s);
    const ExecModel mode = parse_model(mode_s);
    if (analytic == instrumented)
        throw std::invalid_argument("choose exactly one of --analytic / --instrumented");
    Phase phase = Phase::whole;
    if (phase_s == "bidiag") phase = Phase::bidiag;
    else if (phase_s == "qr-iter") phase = Phase::qr_iter;
    else if (phase_s != "whole") throw std::invalid_argument("--phase expects whole|bidiag|qr-iter");

    if (analytic) {
        const OpCounter ops = analytic_counts(alg, mode, m, n, iters ? iters : 1, phase);
        print_counter(std::cout, ops);
        if (mode == ExecModel::dmc) {
            const OpCounter act = analytic_gpu_actual(alg, m, n, iters ? iters : 1, phase);
            std::cout << "gpu_actual_add " << act.add << '\n';
            std::cout << "gpu_actual_mul " << act.mul << '\n';
        }
        return 0;
    }
    const DenseMatrix a = random_matrix(m, n, seed);
    const SvdOptions opt = options_for(mode, 1e-6, 0);
    const SvdResult r = alg == Algorithm::qr_svd ? qr_svd(a, opt) : grk_svd(a, opt);
    const OpCounter& shown =
        phase == Phase::bidiag
            ? r.bidiag_counters
            : (phase == Phase::qr_iter ? r.counters.delta_since(r.bidiag_counters) : r.counters);
    print_counter(std::cout, shown);
    if (mode == ExecModel::dmc) {
        std::cout << "gpu_actual_add " << r.gpu_actual.add << '\n';
        std::cout << "gpu_actual_mul " << r.gpu_actual.mul << '\n';
    }
    std::cout << "iterations " << r.iterations << '\n';
    std::cout << "converged " << (r.converged ? 1 : 0) << '\n';
    return 0;
}

int cmd_cost(const std::string& alg_s, const std::string& mode_s, std::size_t n, std::size_t iters,
             const std::string& fit_s, const std::string& tables_path)
{
    const Algorithm alg = parse_algorithm(alg_s);
    const ExecModel mode = parse_model(mode_s);
    const CostTables tables = tables_from(tables_path);

    std::uint64_t c = iters;
    if (!fit_s.empty()) {
        LinearFit fit;
        std::istringstream in(fit_s);
        char comma = 0;
        if (!(in >> fit.slope >> comma >> fit.intercept) || comma != ',')
            throw std::invalid_argument("--fit expects slope,intercept");
        c = expected_iterations(fit, n);
    } else if (c == 0) {
        c = expected_iterations(alg == Algorithm::qr_svd ? kQrSvdIterationFit : kGrkIterationFit, n);
    }

    const OpCounter ops = analytic_counts(alg, mode, n, n, c);
    std::cout << "algorithm " << algorithm_name(alg) << "\nmode " << model_name(mode) << "\nn " << n
              << "\niterations " << c << '\n';
    for (std::size_t k = 0; k < kOpKindCount; ++k) {
        const OpKind kind = static_cast<OpKind>(k);
        const std::uint64_t count = ops.get(kind);
        if (!count) continue;
        const double per_op_ns = tables.weight(kind) * tables.unit_duration * 1e9;
        char per_op[32];
        std::snprintf(per_op, sizeof per_op, "%.9g", per_op_ns);
        std::cout << to_string(kind) << " count " << count << " weight " << tables.weight(kind)
                  << " per_op " << per_op << " ns\n";
    }
    const TimeCost tc = time_cost(ops, tables, mode);
    double energy = 0.0;
    if (mode == ExecModel::dmc) {
        OpCounter basis = ops;
        const OpCounter act = analytic_gpu_actual(alg, n, n, c);
        basis.add_gpu = act.add;
        basis.mul_gpu = act.mul;
        energy = energy_cost(basis, tables, mode, n);
    } else {
        energy = energy_cost(ops, tables, mode, n);
    }
    std::cout << "time_units " << format_double(tc.units) << '\n';
    std::cout << "time_seconds " << format_double(tc.seconds) << '\n';
    std::cout << "time_ns " << format_double(tc.seconds * 1e9) << '\n';
    std::cout << "energy_pj " << format_double(energy) << '\n';
    return 0;
}

std::ofstream open_out(const fs::path& dir, const char* name)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::ofstream out(dir / name);
    if (!out) throw std::invalid_argument("cannot write " + (dir / name).string());
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Digital and hybrid photonic SVD with instrumented cost model"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    // decompose
    auto* dec = app.add_subcommand("decompose", "Run one SVD and emit a result document");
    std::string d_alg = "grk-svd", d_mode = "dsc", d_input, d_factors, d_out, d_tables;
    double d_tol = 1e-6;
    std::size_t d_max_iters = 0;
    dec->add_option("--alg", d_alg, "qr-svd | grk-svd");
    dec->add_option("--mode", d_mode, "dsc | dmc | hybrid");
    dec->add_option("--input", d_input, "matrix file")->required();
    dec->add_option("--tol", d_tol, "off-diagonal convergence threshold");
    dec->add_option("--max-iters", d_max_iters, "iteration cap (0 = default)");
    dec->add_option("--emit-factors", d_factors, "directory for U.csv, sigma.csv, V.csv");
    dec->add_option("--out", d_out, "result document path (default stdout)");
    dec->add_option("--tables", d_tables, "cost table overrides");

    // count
    auto* cnt = app.add_subcommand("count", "Operation counts, analytic or instrumented");
    std::string c_alg = "grk-svd", c_mode = "dsc", c_phase = "whole";
    std::size_t c_m = 0, c_n = 0, c_iters = 0;
    bool c_analytic = false, c_instrumented = false;
    std::uint64_t c_seed = kDefaultSeed;
    cnt->add_option("--alg", c_alg);
    cnt->add_option("--mode", c_mode);
    cnt->add_option("--m", c_m)->required();
    cnt->add_option("--n", c_n)->required();
    cnt->add_option("--iters", c_iters, "iteration count C (analytic)");
    cnt->add_flag("--analytic", c_analytic);
    cnt->add_flag("--instrumented", c_instrumented);
    cnt->add_option("--seed", c_seed, "matrix seed for instrumented runs");
    cnt->add_option("--phase", c_phase, "whole | bidiag | qr-iter");

    // cost
    auto* cst = app.add_subcommand("cost", "Price runtime and energy from the analytic counts");
    std::string s_alg = "grk-svd", s_mode = "hybrid", s_fit, s_tables;
    std::size_t s_n = 0, s_iters = 0;
    cst->add_option("--alg", s_alg);
    cst->add_option("--mode", s_mode);
    cst->add_option("--n", s_n)->required();
    cst->add_option("--iters", s_iters, "iteration count C (default: Fig-3 fit)");
    cst->add_option("--fit", s_fit, "slope,intercept for the iteration model");
    cst->add_option("--tables", s_tables, "cost table overrides");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Reproduction experiments (CSV outputs)");
    exp->require_subcommand(1);
    std::string e_alg = "grk-svd", e_mode = "dsc", e_sizes = "5:40", e_out, e_tables;
    std::size_t e_trials = 0, e_m = 15, e_n = 15, e_reps = 3;
    double e_delta = 1e-6;
    std::uint64_t e_seed = kDefaultSeed;
    unsigned e_threads = 1;

    auto* it = exp->add_subcommand("iterations", "Iteration counts and the linear fit (Fig. 3)");
    it->add_option("--alg", e_alg);
    it->add_option("--mode", e_mode);
    it->add_option("--sizes", e_sizes, "range lo:hi[:step] or comma list");
    it->add_option("--trials", e_trials, "trials per size (default 250)");
    it->add_option("--delta", e_delta);
    it->add_option("--seed", e_seed);
    it->add_option("--threads", e_threads);
    it->add_option("--out", e_out)->required();

    auto* tr = exp->add_subcommand("trace", "Per-sweep convergence traces (Fig. 4)");
    tr->add_option("--alg", e_alg);
    tr->add_option("--m", e_m);
    tr->add_option("--n", e_n);
    tr->add_option("--trials", e_trials, "default 200");
    tr->add_option("--delta", e_delta);
    tr->add_option("--seed", e_seed);
    tr->add_option("--threads", e_threads);
    tr->add_option("--out", e_out)->required();

    auto* sw = exp->add_subcommand("sweep", "Predicted runtime/energy sweep (Figs. 5-6)");
    std::size_t w_min = 8, w_max = 256;
    sw->add_option("--n-min", w_min);
    sw->add_option("--n-max", w_max);
    sw->add_option("--tables", e_tables);
    sw->add_option("--out", e_out)->required();

    auto* sc = exp->add_subcommand("selfcheck", "Measured vs predicted wallclock (Fig. 7)");
    std::string k_sizes = "16,24,32,48,64,96,128";
    sc->add_option("--alg", e_alg);
    sc->add_option("--sizes", k_sizes);
    sc->add_option("--reps", e_reps);
    sc->add_option("--seed", e_seed);
    sc->add_option("--tables", e_tables);
    sc->add_option("--out", e_out)->required();

    try {
        app.parse(argc, argv);

        if (*dec)
            return cmd_decompose(d_alg, d_mode, d_input, d_tol, d_max_iters, d_factors, d_out,
                                 d_tables);
        if (*cnt)
            return cmd_count(c_alg, c_mode, c_m, c_n, c_iters, c_analytic, c_instrumented, c_seed,
                             c_phase);
        if (*cst) return cmd_cost(s_alg, s_mode, s_n, s_iters, s_fit, s_tables);

        if (*it) {
            ExperimentSpec spec;
            spec.algorithm = parse_algorithm(e_alg);
            spec.mode = parse_model(e_mode);
            spec.sizes = parse_sizes(e_sizes);
            spec.trials_per_size = e_trials ? e_trials : 250;
            spec.delta = e_delta;
            spec.seed = e_seed;
            const RegressionResult r = iteration_regression(spec, e_threads);
            auto out = open_out(e_out, "iterations.csv");
            write_iterations_csv(out, r);
            std::cout << "slope " << format_double(r.fit.slope) << '\n';
            std::cout << "intercept " << format_double(r.fit.intercept) << '\n';
            std::cout << "residual_rms " << format_double(r.residual_rms) << '\n';
            std::cout << "nonconverged " << r.nonconverged << '\n';
            return 0;
        }
        if (*tr) {
            const TraceResult t = convergence_trace(parse_algorithm(e_alg), e_m, e_n,
                                                    e_trials ? e_trials : 200, e_seed, e_delta,
                                                    e_threads);
            auto out = open_out(e_out, "trace.csv");
            write_trace_csv(out, t);
            return 0;
        }
        if (*sw) {
            if (w_min < 3 || w_max < w_min) throw std::invalid_argument("bad sweep range");
            std::vector<std::size_t> ns;
            for (std::size_t n = w_min; n <= w_max; n *= 2) ns.push_back(n);
            if (ns.back() != w_max) ns.push_back(w_max);
            const auto rows = cost_sweep(ns, kQrSvdIterationFit, kGrkIterationFit,
                                         tables_from(e_tables));
            auto out = open_out(e_out, "costs.csv");
            write_costs_csv(out, rows);
            return 0;
        }
        if (*sc) {
            const auto rows = wallclock_selfcheck(parse_algorithm(e_alg), parse_sizes(k_sizes),
                                                  e_reps, e_seed, tables_from(e_tables));
            auto out = open_out(e_out, "selfcheck.csv");
            write_selfcheck_csv(out, rows);
            return 0;
        }
        return 1;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
