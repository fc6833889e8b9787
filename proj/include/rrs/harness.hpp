#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rrs/analysis.hpp"
#include "rrs/errors.hpp"
#include "rrs/image.hpp"
#include "rrs/matrix.hpp"
#include "rrs/problems.hpp"
#include "rrs/solver.hpp"
#include "rrs/svg.hpp"
#include "rrs/text.hpp"
#include "rrs/vec.hpp"

namespace rrs {

// Reserved stream ids, far above any trial index.
inline constexpr std::uint64_t kGenStream = 1u << 20;
inline constexpr std::uint64_t kNoiseStream = (1u << 20) + 1;

enum class Target { Constructed, MinNorm };

inline Vector resolve_target(const Problem& p, Target t) {
    if (t == Target::Constructed) {
        if (!p.x_ref)
            throw argument_error("target: problem has no constructed reference solution; "
                                 "use the min-norm target");
        return *p.x_ref;
    }
    return min_norm_solution(p.a, p.b);
}

struct MethodSpec {
    Method method = Method::Rrs;
    std::size_t q = 5;
    std::vector<double> weights;

    bool restarted() const {
        return method == Method::Rrs || method == Method::RrsWeighted;
    }
    std::string label() const {
        std::string s = method_name(method);
        if (restarted()) s += "(" + std::to_string(q) + ")";
        return s;
    }
    std::string file_stem() const {
        std::string s = to_lower(method_name(method));
        if (restarted()) s += std::to_string(q);
        return s;
    }
    SolveConfig config(double tol, std::size_t max_reflections, RngStream stream) const {
        SolveConfig cfg;
        cfg.method = method;
        cfg.q = restarted() ? q : 2; // q is meaningless for RS/RK
        cfg.weights = weights;
        cfg.tol = tol;
        cfg.max_reflections = max_reflections;
        cfg.stream = stream;
        return cfg;
    }
};

struct BenchSpec {
    std::vector<MethodSpec> methods;
    std::size_t trials = 40;
    double tol = 1e-6;
    std::size_t max_reflections = 5000;
    std::uint64_t base_seed = 0;
    std::size_t jobs = 0;          // 0 = hardware concurrency
    bool record_wall_time = true;  // false writes elapsed_s = 0 for byte-stable CSV

    void validate() const {
        if (methods.empty()) throw argument_error("bench: no methods given");
        if (trials < 1) throw argument_error("bench: trials must be >= 1");
    }
};

struct TrialRow {
    std::string method;          // base name; q carried separately
    std::size_t q = 0;           // 0 for RS/RK
    std::size_t trial = 0;       // equals the sampler stream id
    std::uint64_t seed = 0;      // base seed of the run
    std::size_t it_reflections = 0; // capped at max_reflections when not converged
    std::size_t restarts = 0;
    double err_final = 0.0;
    double elapsed_s = 0.0;
    bool converged = false;
};

struct MethodSummary {
    MethodSpec spec;
    double mean_it = 0.0;
    double mean_restarts = 0.0;
    double mean_elapsed_s = 0.0;
    double convergence_fraction = 0.0;
};

struct BenchSummary {
    std::vector<MethodSummary> methods;
    std::vector<TrialRow> rows; // method-major, then trial id
};

namespace detail {

/// Runs tasks 0..count-1 over a fixed worker pool; the first exception wins
/// and is rethrown after all workers drain.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
    if (jobs == 0) jobs = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(count, 1));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace detail

/// Multi-trial benchmark: every (method, trial) pair runs independently with
/// stream id = trial, so methods see identical row draws per trial. Rows are
/// ordered by (method, trial) regardless of scheduling.
inline BenchSummary run_bench(const Matrix& a, const Vector& b, const Vector& x_ref,
                              const BenchSpec& spec) {
    spec.validate();
    const Vector x0(a.cols(), 0.0);
    const ErrFn err_fn = make_err(x_ref, x0);

    BenchSummary out;
    out.rows.resize(spec.methods.size() * spec.trials);
    detail::parallel_for(out.rows.size(), spec.jobs, [&](std::size_t task) {
        const std::size_t mi = task / spec.trials;
        const std::size_t trial = task % spec.trials;
        const MethodSpec& ms = spec.methods[mi];
        const SolveConfig cfg =
            ms.config(spec.tol, spec.max_reflections, {spec.base_seed, trial});

        detail::Stopwatch clock;
        const SolveTrace tr = solve(a, b, x0, cfg, err_fn);
        const double elapsed = spec.record_wall_time ? clock.seconds() : 0.0;

        TrialRow& row = out.rows[task];
        row.method = method_name(ms.method);
        row.q = ms.restarted() ? ms.q : 0;
        row.trial = trial;
        row.seed = spec.base_seed;
        row.it_reflections = tr.converged() ? tr.reflections : spec.max_reflections;
        row.restarts = tr.restarts;
        row.err_final = tr.err_final;
        row.elapsed_s = elapsed;
        row.converged = tr.converged();
    });

    for (std::size_t mi = 0; mi < spec.methods.size(); ++mi) {
        MethodSummary s;
        s.spec = spec.methods[mi];
        for (std::size_t t = 0; t < spec.trials; ++t) {
            const TrialRow& row = out.rows[mi * spec.trials + t];
            s.mean_it += static_cast<double>(row.it_reflections);
            s.mean_restarts += static_cast<double>(row.restarts);
            s.mean_elapsed_s += row.elapsed_s;
            s.convergence_fraction += row.converged ? 1.0 : 0.0;
        }
        const auto n = static_cast<double>(spec.trials);
        s.mean_it /= n;
        s.mean_restarts /= n;
        s.mean_elapsed_s /= n;
        s.convergence_fraction /= n;
        out.methods.push_back(std::move(s));
    }
    return out;
}

inline void write_bench_csv(const BenchSummary& summary, std::ostream& out) {
    out << "method,q,trial,seed,it_reflections,restarts,err_final,elapsed_s,converged\n";
    for (const TrialRow& r : summary.rows) {
        out << r.method << ',' << r.q << ',' << r.trial << ',' << r.seed << ','
            << r.it_reflections << ',' << r.restarts << ',' << fmt_g17(r.err_final) << ','
            << fmt_g17(r.elapsed_s) << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

inline void print_bench_summary(const BenchSummary& summary, std::ostream& out) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-10s %10s %14s %16s %10s\n", "method", "mean_it",
                  "mean_restarts", "mean_elapsed_s", "conv_frac");
    out << buf;
    for (const MethodSummary& s : summary.methods) {
        std::snprintf(buf, sizeof buf, "%-10s %10.1f %14.1f %16.6f %10.3f\n",
                      s.spec.label().c_str(), s.mean_it, s.mean_restarts, s.mean_elapsed_s,
                      s.convergence_fraction);
        out << buf;
    }
}

struct CurveSeries {
    MethodSpec spec;
    std::vector<Checkpoint> points;
};

struct CurveResult {
    std::vector<CurveSeries> series;
    std::size_t rs_stride = 5; // reflections between RS/RK checkpoints, for metadata
};

/// Single-seed convergence traces. RRS methods checkpoint every restart;
/// RS/RK every q reflections, q taken from the first restarted method so the
/// grids are comparable.
inline CurveResult run_curve(const Matrix& a, const Vector& b, const Vector& x_ref,
                             const std::vector<MethodSpec>& methods, double tol,
                             std::size_t budget, std::uint64_t seed) {
    if (methods.empty()) throw argument_error("curve: no methods given");
    const Vector x0(a.cols(), 0.0);
    const ErrFn err_fn = make_err(x_ref, x0);

    CurveResult out;
    for (const MethodSpec& ms : methods)
        if (ms.restarted()) {
            out.rs_stride = ms.q;
            break;
        }
    for (const MethodSpec& ms : methods) {
        SolveConfig cfg = ms.config(tol, budget, {seed, 0});
        cfg.checkpoint_stride = ms.restarted() ? 1 : out.rs_stride;
        const SolveTrace tr = solve(a, b, x0, cfg, err_fn);
        out.series.push_back({ms, tr.checkpoints});
    }
    return out;
}

inline void write_curve_csv(const CurveResult& curve, std::ostream& out) {
    out << "reflections,method,q,err\n";
    for (const CurveSeries& s : curve.series) {
        const std::size_t q = s.spec.restarted() ? s.spec.q : 0;
        for (const Checkpoint& c : s.points)
            out << c.reflections << ',' << method_name(s.spec.method) << ',' << q << ','
                << fmt_g17(c.err) << '\n';
    }
}

inline void write_curve_svg(const CurveResult& curve, const std::filesystem::path& path,
                            const std::string& title) {
    std::vector<PlotSeries> series;
    for (const CurveSeries& s : curve.series) {
        PlotSeries ps;
        ps.label = s.spec.label();
        for (const Checkpoint& c : s.points)
            ps.points.emplace_back(static_cast<double>(c.reflections), c.err);
        series.push_back(std::move(ps));
    }
    write_svg_plot(path, title, "reflections", "ERR", series, /*log_y=*/true);
}

struct TomoRow {
    MethodSpec spec;
    double snr_db = 0.0;
    double err_final = 0.0;
    Vector image;
};

struct TomoResult {
    std::size_t grid = 0;
    Vector phantom;
    std::vector<TomoRow> rows;
};

/// Fixed-budget reconstruction study: every method runs budget_multiplier * m
/// reflections from zero with the same sampler stream, then is scored by SNR
/// against the clean phantom.
inline TomoResult run_tomo(const Problem& p, std::size_t grid,
                           const std::vector<MethodSpec>& methods,
                           std::size_t budget_multiplier, std::uint64_t seed) {
    if (!p.x_ref) throw argument_error("tomo: problem has no phantom reference");
    if (methods.empty()) throw argument_error("tomo: no methods given");
    if (budget_multiplier < 1) throw argument_error("tomo: budget multiplier must be >= 1");
    const std::size_t budget = budget_multiplier * p.a.rows();
    const Vector x0(p.a.cols(), 0.0);
    const ErrFn err_fn = make_err(*p.x_ref, x0);

    TomoResult out;
    out.grid = grid;
    out.phantom = *p.x_ref;
    for (const MethodSpec& ms : methods) {
        SolveConfig cfg = ms.config(/*tol=*/0.0, budget, {seed, 0});
        const std::size_t ticks =
            ms.restarted() ? budget / (ms.q - 1) : budget; // restarts vs reflections
        cfg.checkpoint_stride = std::max<std::size_t>(1, ticks / 50);
        const SolveTrace tr = solve(p.a, p.b, x0, cfg, err_fn);
        TomoRow row;
        row.spec = ms;
        row.snr_db = snr(*p.x_ref, tr.x);
        row.err_final = tr.err_final;
        row.image = tr.x;
        out.rows.push_back(std::move(row));
    }
    return out;
}

inline void write_snr_csv(const TomoResult& result, std::ostream& out) {
    out << "method,q,snr_db\n";
    for (const TomoRow& r : result.rows)
        out << method_name(r.spec.method) << ',' << (r.spec.restarted() ? r.spec.q : 0)
            << ',' << fmt_g17(r.snr_db) << '\n';
}

inline void write_tomo_outputs(const TomoResult& result, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory: " + dir.string());
    write_pgm(result.phantom, result.grid, result.grid, dir / "phantom.pgm");
    for (const TomoRow& r : result.rows)
        write_pgm(r.image, result.grid, result.grid, dir / (r.spec.file_stem() + ".pgm"));
    std::ofstream csv(dir / "snr.csv");
    if (!csv) throw io_error("cannot open for writing: " + (dir / "snr.csv").string());
    write_snr_csv(result, csv);
}

struct BoundSeriesRow {
    std::size_t q = 0;
    std::size_t k = 0;
    double gamma_pow_k = 0.0;
    double rs_bound = 0.0; // rs_coefficient / sqrt(k*q), same reflection budget
};

struct BoundOutput {
    std::size_t rows = 0;
    std::size_t cols = 0;
    SpectralReport spectral;
    double l_bound = 0.0;
    double rs_coefficient = 0.0;
    std::vector<BoundReport> per_q;
    std::vector<BoundSeriesRow> series;
    std::vector<std::string> warnings;
};

inline BoundOutput run_bound(const Matrix& a, const std::vector<std::size_t>& qs,
                             std::size_t k_max = 30) {
    if (qs.empty()) throw argument_error("bound: no q values given");
    if (k_max < 1) throw argument_error("bound: k_max must be >= 1");
    BoundOutput out;
    out.rows = a.rows();
    out.cols = a.cols();
    out.spectral = spectral_report(a);
    out.l_bound = l_norm_bound(out.spectral);
    out.rs_coefficient = rs_bound_coefficient(out.spectral);
    for (const std::size_t q : qs) {
        BoundReport r;
        r.q = q;
        r.gamma = gamma_bound(q, out.spectral.l_norm);
        r.rs_coefficient = out.rs_coefficient;
        out.per_q.push_back(r);
        if (q == 1)
            out.warnings.push_back("q = 1 gives gamma = 1; restarts need q >= 2");
        double pow_k = 1.0;
        for (std::size_t k = 1; k <= k_max; ++k) {
            pow_k *= r.gamma;
            BoundSeriesRow row;
            row.q = q;
            row.k = k;
            row.gamma_pow_k = pow_k;
            row.rs_bound =
                out.rs_coefficient / std::sqrt(static_cast<double>(k * q));
            out.series.push_back(row);
        }
    }
    return out;
}

inline void print_bound(const BoundOutput& b, std::ostream& out) {
    char buf[160];
    const auto kv = [&](const char* key, const std::string& value) {
        std::snprintf(buf, sizeof buf, "%-16s %s\n", key, value.c_str());
        out << buf;
    };
    kv("rows", std::to_string(b.rows));
    kv("cols", std::to_string(b.cols));
    kv("frobenius", fmt_g17(b.spectral.frobenius));
    kv("sigma_min", fmt_g17(b.spectral.sigma_min));
    kv("sigma_max", fmt_g17(b.spectral.sigma_max));
    kv("cond", fmt_g17(b.spectral.cond));
    kv("l_norm", fmt_g17(b.spectral.l_norm));
    kv("l_norm_bound", fmt_g17(b.l_bound));
    kv("rs_coefficient", fmt_g17(b.rs_coefficient));
    for (const BoundReport& r : b.per_q)
        kv(("gamma(q=" + std::to_string(r.q) + ")").c_str(), fmt_g17(r.gamma));
    for (const std::string& w : b.warnings) out << "warning: " << w << '\n';
}

inline void write_bound_csv(const BoundOutput& b, std::ostream& out) {
    out << "q,k,gamma_pow_k,rs_bound\n";
    for (const BoundSeriesRow& r : b.series)
        out << r.q << ',' << r.k << ',' << fmt_g17(r.gamma_pow_k) << ','
            << fmt_g17(r.rs_bound) << '\n';
}

} // namespace rrs
