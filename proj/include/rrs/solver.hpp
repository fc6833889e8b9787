#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "rrs/errors.hpp"
#include "rrs/matrix.hpp"
#include "rrs/rng.hpp"
#include "rrs/sampling.hpp"
#include "rrs/vec.hpp"

namespace rrs {

enum class Method { Rs, Rrs, RrsWeighted, Kaczmarz };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Rs: return "RS";
        case Method::Rrs: return "RRS";
        case Method::RrsWeighted: return "RRSW";
        case Method::Kaczmarz: return "RK";
    }
    throw argument_error("method_name: unknown method");
}

struct SolveConfig {
    Method method = Method::Rrs;
    std::size_t q = 5;            // iterates per restart, counting the start point
    std::vector<double> weights;  // RrsWeighted only: size q, positive, sums to 1
    double tol = 1e-6;            // stop once ERR <= tol; 0 runs the full budget
    std::size_t max_reflections = 5000;
    std::size_t checkpoint_stride = 0; // 0 picks the per-method default
    RngStream stream;

    void validate() const {
        if (max_reflections < 1) throw argument_error("solve: max_reflections must be >= 1");
        if (!(tol >= 0.0)) throw argument_error("solve: tol must be >= 0");
        const bool restarted = method == Method::Rrs || method == Method::RrsWeighted;
        if (restarted && q < 2) throw argument_error("solve: q must be >= 2");
        if (method == Method::RrsWeighted) {
            if (weights.size() != q) throw argument_error("solve: need exactly q weights");
            double sum = 0.0;
            for (double w : weights) {
                if (!(w > 0.0)) throw argument_error("solve: weights must be positive");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-12)
                throw argument_error("solve: weights must sum to 1");
        } else if (!weights.empty()) {
            throw argument_error("solve: weights require the weighted method");
        }
    }

    // restarts for RRS, reflections for RS/RK
    std::size_t stride_or_default() const {
        if (checkpoint_stride > 0) return checkpoint_stride;
        return (method == Method::Rrs || method == Method::RrsWeighted) ? 1 : 5;
    }
};

struct Checkpoint {
    std::size_t reflections = 0;
    double err = 0.0;
    double elapsed_s = 0.0;
};

enum class Termination { Converged, BudgetExhausted };

struct SolveTrace {
    Vector x;                    // final estimate: restart/running mean, or the RK iterate
    std::size_t reflections = 0; // row steps actually applied
    std::size_t restarts = 0;    // zero for RS/RK
    double err_final = 0.0;
    Termination termination = Termination::BudgetExhausted;
    std::vector<Checkpoint> checkpoints; // always holds (0, err(x0)) and the final state

    bool converged() const { return termination == Termination::Converged; }
};

using ErrFn = std::function<double(const Vector&)>;

/// Standard stopping metric ||x - x_ref||^2 / ||x0 - x_ref||^2 with the
/// denominator frozen at construction.
inline ErrFn make_err(Vector x_ref, const Vector& x0) {
    const double den = distance_sq(x0, x_ref);
    if (den == 0.0) throw argument_error("make_err: x0 equals x_ref");
    return [x_ref = std::move(x_ref), den](const Vector& x) {
        return distance_sq(x, x_ref) / den;
    };
}

namespace detail {

inline void row_step(const Matrix& a, const Vector& b, std::size_t i, double factor,
                     Vector& x) {
    const double sq = a.row_sq_norm(i);
    if (sq <= 0.0) throw numeric_error("row step: row has zero norm");
    a.row_axpy(i, factor * (b[i] - a.row_dot(i, x)) / sq, x);
}

inline void check_system(const Matrix& a, const Vector& b, const Vector& x0) {
    if (b.size() != a.rows()) throw argument_error("solve: rhs length mismatch");
    if (x0.size() != a.cols()) throw argument_error("solve: start point length mismatch");
}

struct Stopwatch {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

} // namespace detail

/// Householder reflection of x across the hyperplane a_i^T y = b_i.
inline void reflect_in_place(const Matrix& a, const Vector& b, std::size_t i, Vector& x) {
    detail::row_step(a, b, i, 2.0, x);
}

inline Vector reflect(const Matrix& a, const Vector& b, std::size_t i, const Vector& x) {
    Vector y = x;
    reflect_in_place(a, b, i, y);
    return y;
}

/// Orthogonal projection onto the hyperplane (the classical Kaczmarz step).
inline void project_in_place(const Matrix& a, const Vector& b, std::size_t i, Vector& x) {
    detail::row_step(a, b, i, 1.0, x);
}

namespace detail {

/// One row step per iteration; the estimate is either the running mean of the
/// iterates x_1..x_k (surrounding) or the iterate itself (Kaczmarz).
inline SolveTrace sequential_solve(const Matrix& a, const Vector& b, const Vector& x0,
                                   const SolveConfig& cfg, const ErrFn& err_fn,
                                   double factor, bool average) {
    cfg.validate();
    check_system(a, b, x0);
    RowSampler sampler(a, cfg.stream);
    const std::size_t stride = cfg.stride_or_default();
    Stopwatch clock;

    SolveTrace tr;
    tr.x = x0;
    tr.err_final = err_fn(tr.x);
    tr.checkpoints.push_back({0, tr.err_final, clock.seconds()});
    if (tr.err_final <= cfg.tol) {
        tr.termination = Termination::Converged;
        return tr;
    }

    Vector iterate = x0;
    Vector sum(x0.size(), 0.0);
    for (std::size_t k = 1; k <= cfg.max_reflections; ++k) {
        row_step(a, b, sampler.draw(), factor, iterate);
        if (average) {
            axpy(1.0, iterate, sum);
            for (std::size_t j = 0; j < sum.size(); ++j)
                tr.x[j] = sum[j] / static_cast<double>(k);
        } else {
            tr.x = iterate;
        }
        tr.reflections = k;
        tr.err_final = err_fn(tr.x);
        const bool done = tr.err_final <= cfg.tol || k == cfg.max_reflections;
        if (k % stride == 0 || done)
            tr.checkpoints.push_back({k, tr.err_final, clock.seconds()});
        if (tr.err_final <= cfg.tol) {
            tr.termination = Termination::Converged;
            break;
        }
    }
    return tr;
}

} // namespace detail

inline SolveTrace solve_rs(const Matrix& a, const Vector& b, const Vector& x0,
                           const SolveConfig& cfg, const ErrFn& err_fn) {
    return detail::sequential_solve(a, b, x0, cfg, err_fn, 2.0, true);
}

inline SolveTrace solve_kaczmarz(const Matrix& a, const Vector& b, const Vector& x0,
                                 const SolveConfig& cfg, const ErrFn& err_fn) {
    return detail::sequential_solve(a, b, x0, cfg, err_fn, 1.0, false);
}

/// Restarted surrounding: each restart reflects q-1 times from the current
/// estimate and replaces it with the weighted mean of all q iterates, the
/// start point included. Uniform weights reproduce the plain restarted method
/// bit for bit.
inline SolveTrace solve_rrs(const Matrix& a, const Vector& b, const Vector& x0,
                            const SolveConfig& cfg, const ErrFn& err_fn) {
    cfg.validate();
    detail::check_system(a, b, x0);
    RowSampler sampler(a, cfg.stream);
    const std::size_t stride = cfg.stride_or_default();
    detail::Stopwatch clock;
    std::vector<double> w = cfg.weights;
    if (w.empty()) w.assign(cfg.q, 1.0 / static_cast<double>(cfg.q));

    SolveTrace tr;
    tr.x = x0;
    tr.err_final = err_fn(tr.x);
    tr.checkpoints.push_back({0, tr.err_final, clock.seconds()});
    if (tr.err_final <= cfg.tol) {
        tr.termination = Termination::Converged;
        return tr;
    }

    const std::size_t per_restart = cfg.q - 1;
    Vector y;
    Vector acc(x0.size());
    while (tr.reflections + per_restart <= cfg.max_reflections) {
        y = tr.x;
        for (std::size_t j = 0; j < acc.size(); ++j) acc[j] = w[0] * y[j];
        for (std::size_t i = 1; i < cfg.q; ++i) {
            reflect_in_place(a, b, sampler.draw(), y);
            axpy(w[i], y, acc);
        }
        std::swap(tr.x, acc);
        tr.reflections += per_restart;
        tr.restarts += 1;
        tr.err_final = err_fn(tr.x);
        const bool budget_done = tr.reflections + per_restart > cfg.max_reflections;
        const bool done = tr.err_final <= cfg.tol || budget_done;
        if (tr.restarts % stride == 0 || done)
            tr.checkpoints.push_back({tr.reflections, tr.err_final, clock.seconds()});
        if (tr.err_final <= cfg.tol) {
            tr.termination = Termination::Converged;
            break;
        }
    }
    return tr;
}

inline SolveTrace solve(const Matrix& a, const Vector& b, const Vector& x0,
                        const SolveConfig& cfg, const ErrFn& err_fn) {
    switch (cfg.method) {
        case Method::Rs: return solve_rs(a, b, x0, cfg, err_fn);
        case Method::Rrs:
        case Method::RrsWeighted: return solve_rrs(a, b, x0, cfg, err_fn);
        case Method::Kaczmarz: return solve_kaczmarz(a, b, x0, cfg, err_fn);
    }
    throw argument_error("solve: unknown method");
}

} // namespace rrs
