// Experiment driver for the randomized surrounding solvers: problem
// generation, single solves, multi-trial benchmarks, convergence curves,
// tomography reconstructions, and convergence-constant reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "rrs/rrs.hpp"

namespace fs = std::filesystem;

namespace {

struct SourceOpts {
    std::string problem_dir;
    std::string matrix_file;
    std::string rhs_file;
    std::string xref_file;
    std::string storage = "auto";
    std::vector<std::size_t> gaussian; // m n
    std::vector<std::size_t> tomo;     // grid angles detectors
    double noise = 0.0;
};

void add_source_flags(CLI::App* cmd, SourceOpts& src) {
    cmd->add_option("--problem", src.problem_dir, "problem directory written by `gen`");
    cmd->add_option("--matrix", src.matrix_file, "Matrix Market file");
    cmd->add_option("--rhs", src.rhs_file,
                    "right-hand side, one value per line (default: A times all-ones)");
    cmd->add_option("--x-ref", src.xref_file, "reference solution, one value per line");
    cmd->add_option("--gaussian", src.gaussian, "standard normal system: M N")->expected(2);
    cmd->add_option("--tomo", src.tomo, "parallel-beam system: GRID ANGLES DETECTORS")
        ->expected(3);
    cmd->add_option("--noise", src.noise, "relative noise level applied to b");
    cmd->add_option("--storage", src.storage, "matrix storage: auto, dense or csr")
        ->check(CLI::IsMember({"auto", "dense", "csr"}));
}

rrs::StoragePick pick_from(const std::string& s) {
    if (s == "dense") return rrs::StoragePick::Dense;
    if (s == "csr") return rrs::StoragePick::Csr;
    return rrs::StoragePick::Auto;
}

rrs::Problem build_problem(const SourceOpts& src, std::uint64_t seed) {
    using namespace rrs;
    const int given = (src.problem_dir.empty() ? 0 : 1) + (src.matrix_file.empty() ? 0 : 1) +
                      (src.gaussian.empty() ? 0 : 1) + (src.tomo.empty() ? 0 : 1);
    if (given != 1)
        throw argument_error("give exactly one of --problem, --matrix, --gaussian or --tomo");

    auto make = [&]() -> Problem {
        if (!src.problem_dir.empty())
            return read_problem(src.problem_dir, pick_from(src.storage));
        if (!src.gaussian.empty())
            return gen_gaussian(src.gaussian[0], src.gaussian[1], {seed, kGenStream});
        if (!src.tomo.empty()) {
            const TomoGeometry geom =
                make_parallel_geometry(src.tomo[0], src.tomo[1], src.tomo[2]);
            return gen_parallel_tomo(geom, head_phantom());
        }
        Matrix a = read_matrix_market_file(src.matrix_file, pick_from(src.storage));
        Problem p(ProblemKind::MatrixMarket, std::move(a), {});
        if (!src.rhs_file.empty()) {
            p.b = read_vector_file(src.rhs_file);
            if (p.b.size() != p.a.rows())
                throw argument_error("--rhs length does not match the matrix");
        } else {
            Vector ones(p.a.cols(), 1.0);
            p.b = p.a.multiply(ones);
            p.x_ref = std::move(ones);
            p.consistent = true;
        }
        if (!src.xref_file.empty()) {
            Vector x = read_vector_file(src.xref_file);
            if (x.size() != p.a.cols())
                throw argument_error("--x-ref length does not match the matrix");
            p.x_ref = std::move(x);
        }
        return p;
    };

    Problem p = make();
    if (src.noise > 0.0) p = add_noise(std::move(p), src.noise, {seed, kNoiseStream});
    return p;
}

struct MethodOpts {
    std::vector<std::string> names{"rs", "rrs"};
    std::vector<std::size_t> qs;
    std::vector<double> weights;
};

void add_method_flags(CLI::App* cmd, MethodOpts& m) {
    cmd->add_option("--method", m.names, "methods to run: rs, rrs, rrsw, rk")
        ->check(CLI::IsMember({"rs", "rrs", "rrsw", "rk"}));
    cmd->add_option("--q", m.qs, "restart length(s) for rrs; repeatable");
    cmd->add_option("--weights", m.weights,
                    "positive weights summing to 1 for rrsw; q = their count");
}

std::vector<rrs::MethodSpec> build_methods(const MethodOpts& m) {
    using namespace rrs;
    const std::vector<std::size_t> qs = m.qs.empty() ? std::vector<std::size_t>{5} : m.qs;
    std::vector<MethodSpec> out;
    for (const std::string& name : m.names) {
        if (name == "rs") {
            out.push_back({Method::Rs, 0, {}});
        } else if (name == "rk") {
            out.push_back({Method::Kaczmarz, 0, {}});
        } else if (name == "rrs") {
            for (std::size_t q : qs) out.push_back({Method::Rrs, q, {}});
        } else if (name == "rrsw") {
            if (m.weights.empty()) throw argument_error("rrsw needs --weights");
            out.push_back({Method::RrsWeighted, m.weights.size(), m.weights});
        } else {
            throw argument_error("unknown method: " + name);
        }
    }
    return out;
}

rrs::Target target_from(const std::string& s) {
    if (s == "constructed") return rrs::Target::Constructed;
    if (s == "minnorm") return rrs::Target::MinNorm;
    throw rrs::argument_error("unknown target: " + s);
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw rrs::io_error("cannot create directory: " + dir.string());
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw rrs::io_error("cannot open for writing: " + path.string());
    return out;
}

} // namespace

int main(int argc, char** argv) {
    using namespace rrs;

    CLI::App app{"randomized surrounding / restarted surrounding experiment driver"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    double tol = 1e-6;
    std::size_t max_reflections = 5000;
    std::size_t trials = 40;
    std::size_t jobs = 0;
    std::string target_name = "constructed";
    std::string out_dir;
    std::string timing = "wall";

    const auto add_shared = [&](CLI::App* cmd, bool with_target) {
        cmd->add_option("--seed", seed, "base seed");
        cmd->add_option("--tol", tol, "squared relative error threshold");
        cmd->add_option("--max-reflections", max_reflections, "reflection budget");
        cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)");
        cmd->add_option("--out", out_dir, "output directory");
        if (with_target)
            cmd->add_option("--target", target_name, "error reference: constructed or minnorm")
                ->check(CLI::IsMember({"constructed", "minnorm"}));
        cmd->set_config("--config", "", "key=value file; flags override it");
    };

    SourceOpts gen_src, solve_src, bench_src, curve_src, bound_src;
    MethodOpts solve_m, bench_m, curve_m, tomo_m;

    CLI::App* cmd_gen = app.add_subcommand("gen", "generate a problem directory");
    add_source_flags(cmd_gen, gen_src);
    add_shared(cmd_gen, false);

    CLI::App* cmd_solve = app.add_subcommand("solve", "run each method once and report");
    add_source_flags(cmd_solve, solve_src);
    add_method_flags(cmd_solve, solve_m);
    add_shared(cmd_solve, true);

    CLI::App* cmd_bench = app.add_subcommand("bench", "multi-trial benchmark with averaging");
    add_source_flags(cmd_bench, bench_src);
    add_method_flags(cmd_bench, bench_m);
    add_shared(cmd_bench, true);
    cmd_bench->add_option("--trials", trials, "independent trials per method");
    cmd_bench->add_option("--timing", timing, "elapsed_s column: wall or off")
        ->check(CLI::IsMember({"wall", "off"}));

    CLI::App* cmd_curve = app.add_subcommand("curve", "single-seed convergence traces");
    add_source_flags(cmd_curve, curve_src);
    add_method_flags(cmd_curve, curve_m);
    add_shared(cmd_curve, true);

    CLI::App* cmd_tomo = app.add_subcommand("tomo", "fixed-budget reconstruction study");
    std::size_t tomo_grid = 32, tomo_angles = 36, tomo_detectors = 32;
    std::size_t budget_multiplier = 100;
    double tomo_noise = 0.0;
    cmd_tomo->add_option("--grid", tomo_grid, "image is GRID x GRID");
    cmd_tomo->add_option("--angles", tomo_angles, "projection angles in [0, pi)");
    cmd_tomo->add_option("--detectors", tomo_detectors, "detectors per angle");
    cmd_tomo->add_option("--noise", tomo_noise, "relative noise level on b");
    cmd_tomo->add_option("--budget-multiplier", budget_multiplier,
                         "reflections = multiplier * rows");
    add_method_flags(cmd_tomo, tomo_m);
    add_shared(cmd_tomo, false);

    CLI::App* cmd_bound = app.add_subcommand("bound", "spectral report and rate constants");
    add_source_flags(cmd_bound, bound_src);
    std::vector<std::size_t> bound_qs{5, 10, 20};
    std::size_t k_max = 30;
    cmd_bound->add_option("--q", bound_qs, "restart lengths to report");
    cmd_bound->add_option("--k-max", k_max, "restart counts in the comparison series");
    add_shared(cmd_bound, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (cmd_gen->parsed()) {
            if (out_dir.empty()) throw argument_error("gen needs --out");
            const Problem p = build_problem(gen_src, seed);
            MetaMap extra{{"seed", std::to_string(seed)}};
            if (!gen_src.tomo.empty()) {
                extra["grid"] = std::to_string(gen_src.tomo[0]);
                extra["angles"] = std::to_string(gen_src.tomo[1]);
                extra["detectors"] = std::to_string(gen_src.tomo[2]);
            }
            write_problem(p, out_dir, std::move(extra));
            std::cout << "wrote " << out_dir << ": " << kind_name(p.kind) << ' '
                      << p.a.rows() << 'x' << p.a.cols() << ", density "
                      << fmt_fixed(p.a.density() * 100.0, 2) << "%\n";
        } else if (cmd_solve->parsed()) {
            const Problem p = build_problem(solve_src, seed);
            const Vector x_ref = resolve_target(p, target_from(target_name));
            const Vector x0(p.a.cols(), 0.0);
            const ErrFn err_fn = make_err(x_ref, x0);
            if (!out_dir.empty()) ensure_dir(out_dir);
            for (const MethodSpec& ms : build_methods(solve_m)) {
                const SolveConfig cfg = ms.config(tol, max_reflections, {seed, 0});
                const SolveTrace tr = solve(p.a, p.b, x0, cfg, err_fn);
                std::cout << ms.label() << ": "
                          << (tr.converged() ? "converged" : "budget exhausted")
                          << " reflections=" << tr.reflections
                          << " restarts=" << tr.restarts
                          << " err=" << fmt_g17(tr.err_final) << '\n';
                if (!out_dir.empty()) {
                    auto out = open_out(fs::path(out_dir) / (ms.file_stem() + "_trace.csv"));
                    out << "reflections,err,elapsed_s\n";
                    for (const Checkpoint& c : tr.checkpoints)
                        out << c.reflections << ',' << fmt_g17(c.err) << ','
                            << fmt_g17(c.elapsed_s) << '\n';
                }
            }
        } else if (cmd_bench->parsed()) {
            const Problem p = build_problem(bench_src, seed);
            const Vector x_ref = resolve_target(p, target_from(target_name));
            BenchSpec spec;
            spec.methods = build_methods(bench_m);
            spec.trials = trials;
            spec.tol = tol;
            spec.max_reflections = max_reflections;
            spec.base_seed = seed;
            spec.jobs = jobs;
            spec.record_wall_time = timing == "wall";
            const BenchSummary summary = run_bench(p.a, p.b, x_ref, spec);
            print_bench_summary(summary, std::cout);
            if (!out_dir.empty()) {
                ensure_dir(out_dir);
                auto out = open_out(fs::path(out_dir) / "bench.csv");
                write_bench_csv(summary, out);
            }
        } else if (cmd_curve->parsed()) {
            const Problem p = build_problem(curve_src, seed);
            const Vector x_ref = resolve_target(p, target_from(target_name));
            const CurveResult curve =
                run_curve(p.a, p.b, x_ref, build_methods(curve_m), tol, max_reflections, seed);
            for (const CurveSeries& s : curve.series)
                std::cout << s.spec.label() << ": final err "
                          << fmt_g17(s.points.empty() ? 1.0 : s.points.back().err) << '\n';
            if (!out_dir.empty()) {
                ensure_dir(out_dir);
                auto csv = open_out(fs::path(out_dir) / "curve.csv");
                write_curve_csv(curve, csv);
                write_curve_svg(curve, fs::path(out_dir) / "curve.svg", "ERR vs reflections");
                MetaMap meta{{"seed", std::to_string(seed)},
                             {"tol", fmt_g17(tol)},
                             {"budget", std::to_string(max_reflections)},
                             {"rrs_checkpoint_stride", "1 restart"},
                             {"rs_checkpoint_stride",
                              std::to_string(curve.rs_stride) + " reflections"}};
                write_meta_file(meta, fs::path(out_dir) / "curve_meta.txt");
            }
        } else if (cmd_tomo->parsed()) {
            const TomoGeometry geom =
                make_parallel_geometry(tomo_grid, tomo_angles, tomo_detectors);
            Problem p = gen_parallel_tomo(geom, head_phantom());
            if (tomo_noise > 0.0) p = add_noise(std::move(p), tomo_noise, {seed, kNoiseStream});
            const TomoResult result =
                run_tomo(p, tomo_grid, build_methods(tomo_m), budget_multiplier, seed);
            write_snr_csv(result, std::cout);
            if (!out_dir.empty()) write_tomo_outputs(result, out_dir);
        } else if (cmd_bound->parsed()) {
            const Problem p = build_problem(bound_src, seed);
            const BoundOutput b = run_bound(p.a, bound_qs, k_max);
            print_bound(b, std::cout);
            if (!out_dir.empty()) {
                ensure_dir(out_dir);
                auto out = open_out(fs::path(out_dir) / "bound.csv");
                write_bound_csv(b, out);
            }
        }
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
