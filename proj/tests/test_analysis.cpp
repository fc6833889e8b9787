#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "rrs/analysis.hpp"
#include "rrs/matrix.hpp"
#include "rrs/rng.hpp"
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

Matrix diag(std::vector<double> d) {
    const std::size_t n = d.size();
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = d[i];
    return Matrix::dense(n, n, std::move(v));
}

} // namespace

TEST_CASE("jacobi matches the closed-form 2x2 spectrum", "[analysis][eigen]") {
    Rng rng(101, 0);
    for (int t = 0; t < 25; ++t) {
        const double p = rng.next_gaussian(), q = rng.next_gaussian(),
                     r = rng.next_gaussian();
        const auto expect = oracle::eig_sym2(p, q, r);
        const auto got = jacobi_eigen({p, q, q, r}, 2);
        REQUIRE(got.values.size() == 2);
        REQUIRE(got.values[0] == Approx(expect[0]).margin(1e-10));
        REQUIRE(got.values[1] == Approx(expect[1]).margin(1e-10));
        REQUIRE(got.values[0] <= got.values[1]);
    }
}

TEST_CASE("jacobi matches the characteristic cubic on 3x3", "[analysis][eigen]") {
    Rng rng(102, 0);
    for (int t = 0; t < 25; ++t) {
        std::array<double, 9> a{};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) {
                const double v = rng.next_gaussian();
                a[i * 3 + j] = v;
                a[j * 3 + i] = v;
            }
        const auto expect = oracle::eig_sym3(a);
        const auto got = jacobi_eigen(std::vector<double>(a.begin(), a.end()), 3);
        for (std::size_t k = 0; k < 3; ++k)
            REQUIRE(got.values[k] == Approx(expect[k]).margin(1e-9));

        // eigenpair residuals A v = lambda v
        double scale = 0.0;
        for (double v : a) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t i = 0; i < 3; ++i) {
                double av = 0.0;
                for (std::size_t j = 0; j < 3; ++j)
                    av += a[i * 3 + j] * got.vectors[j * 3 + k];
                REQUIRE(av == Approx(got.values[k] * got.vectors[i * 3 + k])
                                  .margin(1e-8 * std::max(1.0, scale)));
            }
        }
    }
}

TEST_CASE("spectral report on simple matrices", "[analysis]") {
    SECTION("identity") {
        const Matrix eye = diag(std::vector<double>(10, 1.0));
        const auto r = spectral_report(eye);
        REQUIRE(r.sigma_min == Approx(1.0));
        REQUIRE(r.sigma_max == Approx(1.0));
        REQUIRE(r.frobenius == Approx(std::sqrt(10.0)));
        REQUIRE(r.l_norm == Approx(0.8));
        REQUIRE(r.cond == Approx(1.0));
    }
    SECTION("diag(1,2)") {
        const auto r = spectral_report(diag({1, 2}));
        REQUIRE(r.sigma_min == Approx(1.0));
        REQUIRE(r.sigma_max == Approx(2.0));
        REQUIRE(r.l_norm == Approx(0.6)); // both eigenvalues sit at distance 0.6
        REQUIRE(r.cond == Approx(2.0));
    }
    SECTION("wide row vector has l_norm 1") {
        const Matrix a = Matrix::dense(1, 2, {1, 1});
        const auto r = spectral_report(a);
        REQUIRE(r.l_norm == Approx(1.0));
        REQUIRE(r.sigma_min == Approx(std::sqrt(2.0)));
    }
    SECTION("narrow random matrix agrees with the characteristic-poly oracle") {
        const Matrix a = random_dense(8, 3, {55, 0});
        const auto sig = oracle::singular_values_narrow(a);
        const auto r = spectral_report(a);
        REQUIRE(r.sigma_min == Approx(sig.front()).epsilon(1e-8));
        REQUIRE(r.sigma_max == Approx(sig.back()).epsilon(1e-8));
    }
}

TEST_CASE("l_norm never exceeds its closed-form bound", "[analysis]") {
    for (std::uint64_t s : {1u, 2u, 3u, 4u}) {
        const Matrix a = random_dense(20, 5, {s, 1});
        const auto r = spectral_report(a);
        REQUIRE(r.l_norm <= l_norm_bound(r) + 1e-10);
        REQUIRE(r.l_norm >= 0.0);
        REQUIRE(r.l_norm < 1.0); // full column rank almost surely
    }
}

TEST_CASE("dense threshold is enforced", "[analysis]") {
    const Matrix a = random_dense(4, 4, {7, 7});
    REQUIRE_THROWS_AS(spectral_report(a, 3), numeric_error);
    REQUIRE_THROWS_AS(min_norm_solution(a, {1, 1, 1, 1}, 3), numeric_error);
}

TEST_CASE("gamma bound closed-form values", "[analysis]") {
    REQUIRE(gamma_bound(1, 0.3) == 1.0);
    REQUIRE(gamma_bound(5, 0.0) == Approx(0.2));
    REQUIRE(gamma_bound(2, 0.5) == Approx(0.75));
    REQUIRE(gamma_bound(2, 0.6) == Approx(0.8));
    // 1/5 + (2/25)(4*0.8 + 3*0.64 + 2*0.512 + 1*0.4096)
    REQUIRE(gamma_bound(5, 0.8) == Approx(0.724288).margin(1e-12));
    REQUIRE(gamma_bound(4, 1.0) == Approx(1.0).margin(1e-15));

    REQUIRE_THROWS_AS(gamma_bound(0, 0.5), argument_error);
    REQUIRE_THROWS_AS(gamma_bound(5, -0.1), argument_error);
    REQUIRE_THROWS_AS(gamma_bound(5, 1.1), argument_error);
}

TEST_CASE("gamma bound sweeps", "[analysis]") {
    for (std::size_t q = 2; q <= 50; ++q) {
        double prev = -1.0;
        for (int i = 0; i <= 99; ++i) {
            const double l = i / 100.0;
            const double g = gamma_bound(q, l);
            REQUIRE(g > 0.0);
            REQUIRE(g < 1.0);
            REQUIRE(g >= 1.0 / static_cast<double>(q) - 1e-15);
            REQUIRE(g >= prev); // increasing in l
            prev = g;
        }
    }
}

TEST_CASE("rs bound coefficient", "[analysis]") {
    REQUIRE(rs_bound_coefficient(spectral_report(diag(std::vector<double>(10, 1.0)))) ==
            Approx(1.0 + std::sqrt(10.0)));
    REQUIRE(rs_bound_coefficient(spectral_report(diag({1, 2}))) ==
            Approx(1.0 + std::sqrt(5.0)));
    REQUIRE(rs_bound_coefficient(spectral_report(diag({3, 3}))) ==
            Approx(1.0 + std::sqrt(2.0)));

    SpectralReport singular;
    singular.sigma_min = 0.0;
    singular.frobenius = 1.0;
    REQUIRE_THROWS_AS(rs_bound_coefficient(singular), numeric_error);
}

TEST_CASE("minimum-norm solutions", "[analysis]") {
    SECTION("underdetermined") {
        const Matrix a = Matrix::dense(1, 2, {1, 1});
        const Vector x = min_norm_solution(a, {2});
        REQUIRE(x[0] == Approx(1.0));
        REQUIRE(x[1] == Approx(1.0));
    }
    SECTION("overdetermined consistent") {
        const Matrix a = Matrix::dense(3, 2, {1, 0, 0, 1, 1, 1});
        const Vector x = min_norm_solution(a, {1, 1, 2});
        REQUIRE(x[0] == Approx(1.0));
        REQUIRE(x[1] == Approx(1.0));
    }
    SECTION("identity") {
        const Vector x = min_norm_solution(diag({1, 1, 1}), {3, -1, 2});
        REQUIRE(x[0] == Approx(3.0));
        REQUIRE(x[1] == Approx(-1.0));
        REQUIRE(x[2] == Approx(2.0));
    }
    SECTION("inconsistent overdetermined is rejected") {
        const Matrix a = Matrix::dense(2, 1, {1, 1});
        REQUIRE_THROWS_AS(min_norm_solution(a, {1, 2}), numeric_error);
    }
    SECTION("rank-deficient inconsistent is rejected") {
        const Matrix a = Matrix::dense(2, 2, {1, 0, 2, 0});
        REQUIRE_THROWS_AS(min_norm_solution(a, {1, 3}), numeric_error);
    }
    SECTION("result lies in the row space and satisfies the system") {
        const Matrix a = random_dense(3, 7, {66, 0});
        Vector z(7);
        Rng rng(67, 0);
        for (double& v : z) v = rng.next_gaussian();
        const Vector b = a.multiply(z);
        const Vector x = min_norm_solution(a, b);
        const Vector r = a.multiply(x);
        REQUIRE(std::sqrt(distance_sq(r, b)) <= 1e-8 * std::max(1.0, norm(b)));
        const Vector proj = project_row_space(a, x);
        REQUIRE(std::sqrt(distance_sq(x, proj)) <= 1e-8 * std::max(1.0, norm(x)));
        REQUIRE(norm(x) <= norm(z) + 1e-10);
    }
}

TEST_CASE("err metric", "[analysis]") {
    const Vector x0{0, 0}, x_ref{1, 0};
    REQUIRE(err(x0, x_ref, x0) == 1.0);
    REQUIRE(err(x_ref, x_ref, x0) == 0.0);
    REQUIRE(err({0.5, 0}, x_ref, x0) == Approx(0.25));

    // translation invariance
    const Vector x{0.3, -0.2};
    const double base = err(x, x_ref, x0);
    const double shifted = err({0.3 + 5, -0.2 + 5}, {1 + 5, 0 + 5}, {0 + 5, 0 + 5});
    REQUIRE(shifted == Approx(base).epsilon(1e-12));

    REQUIRE_THROWS_AS(err(x, x_ref, x_ref), argument_error);
}

TEST_CASE("snr in decibels", "[analysis]") {
    REQUIRE(snr({3, 4}, {0, 0}) == Approx(0.0).margin(1e-15));
    REQUIRE(snr({3, 4}, {3, 0}) == Approx(10.0 * std::log10(25.0 / 16.0)));
    REQUIRE(std::isinf(snr({3, 4}, {3, 4})));
    REQUIRE(snr({3, 4}, {3, 4}) > 0);
    REQUIRE_THROWS_AS(snr({0, 0}, {1, 1}), argument_error);
}

TEST_CASE("gram matrices agree across layouts", "[analysis]") {
    const Matrix d = random_dense(6, 4, {8, 8});
    std::vector<std::size_t> row_ptr{0}, cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        for (std::size_t j = 0; j < d.cols(); ++j) {
            cols.push_back(j);
            vals.push_back(d.at(i, j));
        }
        row_ptr.push_back(cols.size());
    }
    const Matrix s = Matrix::csr(6, 4, std::move(row_ptr), std::move(cols), std::move(vals));
    const auto gd = gram_ata(d);
    const auto gs = gram_ata(s);
    REQUIRE(gd.size() == gs.size());
    for (std::size_t i = 0; i < gd.size(); ++i)
        REQUIRE(gd[i] == Approx(gs[i]).margin(1e-12));

    const auto hd = gram_aat(d);
    REQUIRE(hd.size() == 36);
    REQUIRE(hd[0] == Approx(d.row_sq_norm(0)).epsilon(1e-12));
}
