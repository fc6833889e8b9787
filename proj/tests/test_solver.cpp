#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rrs/analysis.hpp"
#include "rrs/matrix.hpp"
#include "rrs/rng.hpp"
#include "rrs/solver.hpp"
#include "rrs/vec.hpp"

using namespace rrs;
using Catch::Approx;

namespace {

Matrix random_dense(std::size_t m, std::size_t n, RngStream stream) {
    Rng rng(stream);
    std::vector<double> v(m * n);
    for (double& x : v) x = rng.next_gaussian();
    return Matrix::dense(m, n, std::move(v));
}

const Matrix kLine = Matrix::dense(1, 2, {1, 0}); // the hyperplane x_1 = 1
const Vector kLineRhs{1.0};

} // namespace

TEST_CASE("reflection formula", "[solver]") {
    Vector x{3, 4};
    reflect_in_place(kLine, kLineRhs, 0, x);
    REQUIRE(x[0] == -1.0);
    REQUIRE(x[1] == 4.0);
}

TEST_CASE("points on the hyperplane are fixed", "[solver]") {
    Vector x{1, 7};
    reflect_in_place(kLine, kLineRhs, 0, x);
    REQUIRE(x[0] == 1.0);
    REQUIRE(x[1] == 7.0);
}

TEST_CASE("reflection is an involution", "[solver]") {
    Rng rng(2024, 0);
    for (int t = 0; t < 100; ++t) {
        std::vector<double> row(6);
        for (double& v : row) v = rng.next_gaussian();
        const Matrix a = Matrix::dense(1, 6, std::vector<double>(row));
        const Vector b{rng.next_gaussian()};
        Vector x(6), orig(6);
        for (std::size_t j = 0; j < 6; ++j) orig[j] = x[j] = rng.next_gaussian();
        reflect_in_place(a, b, 0, x);
        reflect_in_place(a, b, 0, x);
        const double scale = std::max(norm(orig), 1.0);
        REQUIRE(std::sqrt(distance_sq(x, orig)) <= 1e-12 * scale);
    }
}

TEST_CASE("reflection rejects zero-norm rows", "[solver]") {
    const Matrix a = Matrix::dense(1, 2, {0, 0});
    Vector x{1, 1};
    REQUIRE_THROWS_AS(reflect_in_place(a, {1.0}, 0, x), numeric_error);
}

TEST_CASE("projection halves the reflection", "[solver]") {
    Vector x{3, 4};
    project_in_place(kLine, kLineRhs, 0, x);
    REQUIRE(x[0] == 1.0);
    REQUIRE(x[1] == 4.0);
}

TEST_CASE("rs running mean on a single hyperplane", "[solver]") {
    // Iterates alternate between [-1,4] and [3,4]; the running means give the
    // ERR sequence 1, 1, 0.8, 37/45, 0.8 against x_ref = [1,0].
    SolveConfig cfg;
    cfg.method = Method::Rs;
    cfg.tol = 0.0;
    cfg.max_reflections = 4;
    cfg.checkpoint_stride = 1;
    cfg.stream = {0, 0};
    const Vector x0{3, 4};
    const auto tr = solve_rs(kLine, kLineRhs, x0, cfg, make_err({1, 0}, x0));

    REQUIRE(tr.reflections == 4);
    REQUIRE(tr.restarts == 0);
    REQUIRE_FALSE(tr.converged());
    REQUIRE(tr.checkpoints.size() == 5);
    const double expected[5] = {1.0, 1.0, 0.8, 37.0 / 45.0, 0.8};
    for (std::size_t k = 0; k < 5; ++k) {
        REQUIRE(tr.checkpoints[k].reflections == k);
        REQUIRE(tr.checkpoints[k].err == Approx(expected[k]).margin(1e-15));
    }
    REQUIRE(tr.x[0] == Approx(1.0).margin(1e-15));
    REQUIRE(tr.x[1] == 4.0);
    REQUIRE(tr.err_final == Approx(0.8).margin(1e-15));
}

TEST_CASE("rs estimate is the mean of the iterates", "[solver]") {
    const Matrix a = random_dense(12, 4, {5, 77});
    const Vector x_star(4, 1.0);
    const Vector b = a.multiply(x_star);
    const Vector x0(4, 0.0);

    SolveConfig cfg;
    cfg.method = Method::Rs;
    cfg.tol = 0.0;
    cfg.max_reflections = 137;
    cfg.stream = {42, 3};
    const auto tr = solve_rs(a, b, x0, cfg, make_err(x_star, x0));

    // Replay the same draw sequence and accumulate the iterates directly.
    RowSampler sampler(a, cfg.stream);
    Vector iterate = x0, sum(4, 0.0);
    for (std::size_t k = 1; k <= cfg.max_reflections; ++k) {
        reflect_in_place(a, b, sampler.draw(), iterate);
        axpy(1.0, iterate, sum);
    }
    for (std::size_t j = 0; j < 4; ++j)
        REQUIRE(tr.x[j] == sum[j] / 137.0); // bitwise: same operation order
}

TEST_CASE("rrs with q=2 solves a single hyperplane in one restart", "[solver]") {
    SolveConfig cfg;
    cfg.method = Method::Rrs;
    cfg.q = 2;
    cfg.stream = {0, 0};
    const Vector x0{3, 4};
    const auto tr = solve_rrs(kLine, kLineRhs, x0, cfg, make_err({1, 4}, x0));
    REQUIRE(tr.converged());
    REQUIRE(tr.reflections == 1);
    REQUIRE(tr.restarts == 1);
    REQUIRE(tr.x[0] == 1.0);
    REQUIRE(tr.x[1] == 4.0);
    REQUIRE(tr.err_final == 0.0);
}

TEST_CASE("a start point on the solution converges with zero reflections", "[solver]") {
    const Matrix a = Matrix::dense(2, 2, {1, 0, 0, 1});
    const Vector b{1, 2};
    const Vector x0{1, 2};
    const ErrFn residual_err = [&](const Vector& x) {
        Vector r = a.multiply(x);
        return distance_sq(r, b);
    };
    for (Method m : {Method::Rs, Method::Rrs, Method::Kaczmarz}) {
        SolveConfig cfg;
        cfg.method = m;
        cfg.stream = {1, 0};
        const auto tr = solve(a, b, x0, cfg, residual_err);
        REQUIRE(tr.converged());
        REQUIRE(tr.reflections == 0);
        REQUIRE(tr.restarts == 0);
        REQUIRE(tr.checkpoints.size() == 1);
        REQUIRE(tr.checkpoints[0].reflections == 0);
    }
}

TEST_CASE("kaczmarz tracks the iterate, not the mean", "[solver]") {
    SolveConfig cfg;
    cfg.method = Method::Kaczmarz;
    cfg.tol = 0.0;
    cfg.max_reflections = 3;
    cfg.stream = {0, 0};
    const Vector x0{3, 4};
    const auto tr = solve_kaczmarz(kLine, kLineRhs, x0, cfg, make_err({1, 4}, x0));
    REQUIRE(tr.converged());
    REQUIRE(tr.reflections == 1);
    REQUIRE(tr.x[0] == 1.0);
    REQUIRE(tr.x[1] == 4.0);
}

TEST_CASE("kaczmarz solves an identity system exactly", "[solver]") {
    const Matrix eye = Matrix::dense(2, 2, {1, 0, 0, 1});
    const Vector b{1, 2};
    Vector x{0, 0};
    project_in_place(eye, b, 0, x);
    project_in_place(eye, b, 1, x);
    REQUIRE(x[0] == 1.0);
    REQUIRE(x[1] == 2.0);

    SolveConfig cfg;
    cfg.method = Method::Kaczmarz;
    cfg.tol = 0.0;
    cfg.max_reflections = 100;
    cfg.stream = {3, 0};
    const auto tr = solve_kaczmarz(eye, b, {0, 0}, cfg, make_err({1, 2}, {0, 0}));
    REQUIRE(tr.converged());
    REQUIRE(tr.x[0] == 1.0);
    REQUIRE(tr.x[1] == 2.0);
}

TEST_CASE("uniform weights reproduce plain rrs bitwise", "[solver]") {
    const Matrix a = random_dense(20, 6, {9, 100});
    const Vector x_star(6, 1.0);
    const Vector b = a.multiply(x_star);
    const Vector x0(6, 0.0);
    const ErrFn err_fn = make_err(x_star, x0);

    SolveConfig plain;
    plain.method = Method::Rrs;
    plain.q = 5;
    plain.tol = 0.0;
    plain.max_reflections = 400;
    plain.stream = {21, 4};

    SolveConfig weighted = plain;
    weighted.method = Method::RrsWeighted;
    weighted.weights = {0.2, 0.2, 0.2, 0.2, 0.2};

    const auto t1 = solve(a, b, x0, plain, err_fn);
    const auto t2 = solve(a, b, x0, weighted, err_fn);
    REQUIRE(t1.reflections == t2.reflections);
    REQUIRE(t1.restarts == t2.restarts);
    REQUIRE(t1.err_final == t2.err_final);
    for (std::size_t j = 0; j < 6; ++j) REQUIRE(t1.x[j] == t2.x[j]);
}

TEST_CASE("non-uniform weights shift the estimate", "[solver]") {
    const Matrix a = random_dense(20, 6, {9, 100});
    const Vector x_star(6, 1.0);
    const Vector b = a.multiply(x_star);
    const Vector x0(6, 0.0);
    const ErrFn err_fn = make_err(x_star, x0);

    SolveConfig cfg;
    cfg.method = Method::RrsWeighted;
    cfg.q = 3;
    cfg.weights = {0.6, 0.3, 0.1};
    cfg.tol = 0.0;
    cfg.max_reflections = 50;
    cfg.stream = {21, 4};
    const auto tr = solve(a, b, x0, cfg, err_fn);
    REQUIRE(tr.restarts == 25);
    REQUIRE(std::isfinite(tr.err_final));
}

TEST_CASE("restart means never move away from a solution", "[solver]") {
    // Reflections preserve the distance to any solution of a consistent
    // system, so the restart mean cannot increase it.
    const Matrix a = random_dense(40, 10, {13, 0});
    const Vector x_star(10, 1.0);
    const Vector b = a.multiply(x_star);
    const Vector x0(10, 0.0);

    SolveConfig cfg;
    cfg.method = Method::Rrs;
    cfg.q = 5;
    cfg.tol = 0.0;
    cfg.max_reflections = 400;
    cfg.checkpoint_stride = 1;
    cfg.stream = {13, 1};
    const auto tr = solve_rrs(a, b, x0, cfg, make_err(x_star, x0));
    for (std::size_t k = 1; k < tr.checkpoints.size(); ++k)
        REQUIRE(tr.checkpoints[k].err <=
                tr.checkpoints[k - 1].err * (1.0 + 1e-10) + 1e-15);
}

TEST_CASE("iterates stay in the row space when started there", "[solver]") {
    const Matrix a = random_dense(4, 8, {31, 2});
    const Vector x_star = min_norm_solution(a, a.multiply(Vector(8, 0.5)));
    const Vector b = a.multiply(x_star);
    const Vector x0(8, 0.0);

    SolveConfig cfg;
    cfg.method = Method::Rrs;
    cfg.q = 3;
    cfg.tol = 0.0;
    cfg.max_reflections = 60;
    cfg.stream = {31, 0};
    const auto tr = solve_rrs(a, b, x0, cfg, make_err(x_star, x0));
    const Vector proj = project_row_space(a, tr.x);
    REQUIRE(std::sqrt(distance_sq(tr.x, proj)) <= 1e-8 * std::max(1.0, norm(tr.x)));
}

TEST_CASE("budget accounting charges q-1 reflections per restart", "[solver]") {
    const Matrix a = random_dense(10, 3, {77, 0});
    const Vector x_star(3, 1.0);
    const Vector b = a.multiply(x_star);
    const Vector x0(3, 0.0);
    const ErrFn err_fn = make_err(x_star, x0);

    SolveConfig cfg;
    cfg.method = Method::Rrs;
    cfg.tol = 0.0;
    cfg.stream = {77, 1};

    cfg.q = 4;
    cfg.max_reflections = 10;
    auto tr = solve_rrs(a, b, x0, cfg, err_fn);
    REQUIRE(tr.reflections == 9);
    REQUIRE(tr.restarts == 3);
    REQUIRE_FALSE(tr.converged());

    cfg.q = 3;
    cfg.max_reflections = 5;
    tr = solve_rrs(a, b, x0, cfg, err_fn);
    REQUIRE(tr.reflections == 4);
    REQUIRE(tr.restarts == 2);

    cfg.q = 12;
    cfg.max_reflections = 5; // not even one restart fits
    tr = solve_rrs(a, b, x0, cfg, err_fn);
    REQUIRE(tr.reflections == 0);
    REQUIRE(tr.restarts == 0);
    REQUIRE(tr.checkpoints.size() == 1);
}

TEST_CASE("checkpoints bracket the run", "[solver]") {
    const Matrix a = random_dense(30, 5, {3, 8});
    const Vector x_star(5, 1.0);
    const Vector b = a.multiply(x_star);
    const Vector x0(5, 0.0);

    for (Method m : {Method::Rs, Method::Rrs, Method::Kaczmarz}) {
        SolveConfig cfg;
        cfg.method = m;
        cfg.q = 5;
        cfg.tol = 1e-9;
        cfg.max_reflections = 300;
        cfg.stream = {3, 9};
        const auto tr = solve(a, b, x0, cfg, make_err(x_star, x0));
        REQUIRE(tr.checkpoints.size() >= 2);
        REQUIRE(tr.checkpoints.front().reflections == 0);
        REQUIRE(tr.checkpoints.front().err == 1.0);
        for (std::size_t k = 1; k < tr.checkpoints.size(); ++k) {
            REQUIRE(tr.checkpoints[k].reflections > tr.checkpoints[k - 1].reflections);
            REQUIRE(tr.checkpoints[k].elapsed_s >= tr.checkpoints[k - 1].elapsed_s);
        }
        REQUIRE(tr.checkpoints.back().reflections == tr.reflections);
        REQUIRE(tr.checkpoints.back().err == tr.err_final);
        if (tr.converged()) REQUIRE(tr.err_final <= cfg.tol);
    }
}

TEST_CASE("config validation", "[solver]") {
    const Vector x0{0, 0};
    const ErrFn err_fn = make_err({1, 1}, x0);
    const Matrix a = Matrix::dense(2, 2, {1, 0, 0, 1});
    const Vector b{1, 1};

    SolveConfig cfg;
    cfg.stream = {0, 0};

    cfg.method = Method::Rrs;
    cfg.q = 1;
    REQUIRE_THROWS_AS(solve(a, b, x0, cfg, err_fn), argument_error);

    cfg.q = 3;
    cfg.weights = {0.5, 0.5};
    REQUIRE_THROWS_AS(solve(a, b, x0, cfg, err_fn), argument_error); // plain rrs + weights

    cfg.method = Method::RrsWeighted;
    REQUIRE_THROWS_AS(solve(a, b, x0, cfg, err_fn), argument_error); // wrong count

    cfg.weights = {0.5, 0.6, -0.1};
    REQUIRE_THROWS_AS(solve(a, b, x0, cfg, err_fn), argument_error); // negative

    cfg.weights = {0.5, 0.3, 0.3};
    REQUIRE_THROWS_AS(solve(a, b, x0, cfg, err_fn), argument_error); // sums to 1.1

    cfg = SolveConfig{};
    cfg.max_reflections = 0;
    REQUIRE_THROWS_AS(solve(a, b, x0, cfg, err_fn), argument_error);

    cfg = SolveConfig{};
    cfg.tol = -1.0;
    REQUIRE_THROWS_AS(solve(a, b, x0, cfg, err_fn), argument_error);

    cfg = SolveConfig{};
    REQUIRE_THROWS_AS(solve(a, {1, 1, 1}, x0, cfg, err_fn), argument_error);
    REQUIRE_THROWS_AS(solve(a, b, {0, 0, 0}, cfg, err_fn), argument_error);

    REQUIRE_THROWS_AS(make_err({1, 1}, {1, 1}), argument_error);
}
