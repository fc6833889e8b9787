#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rrs/errors.hpp"
#include "rrs/matrix.hpp"
#include "rrs/rng.hpp"
#include "rrs/vec.hpp"

namespace rrs {

enum class ProblemKind { Gaussian, MatrixMarket, TomoParallel };

inline const char* kind_name(ProblemKind k) {
    switch (k) {
        case ProblemKind::Gaussian: return "gaussian";
        case ProblemKind::MatrixMarket: return "matrix_market";
        case ProblemKind::TomoParallel: return "tomo_parallel";
    }
    throw argument_error("kind_name: unknown kind");
}

inline ProblemKind kind_from_name(const std::string& s) {
    if (s == "gaussian") return ProblemKind::Gaussian;
    if (s == "matrix_market") return ProblemKind::MatrixMarket;
    if (s == "tomo_parallel") return ProblemKind::TomoParallel;
    throw argument_error("unknown problem kind: " + s);
}

struct Problem {
    ProblemKind kind;
    Matrix a;
    Vector b;
    std::optional<Vector> x_ref;
    bool consistent = false;
    double noise_level = 0.0;

    Problem(ProblemKind k, Matrix m, Vector rhs)
        : kind(k), a(std::move(m)), b(std::move(rhs)) {}
};

/// m x n with independent standard normal entries; x_ref is all-ones and
/// b = A x_ref, so the system is consistent by construction.
inline Problem gen_gaussian(std::size_t m, std::size_t n, RngStream stream) {
    if (m < 1 || n < 1) throw argument_error("gen_gaussian: m and n must be >= 1");
    Rng rng(stream);
    std::vector<double> values(m * n);
    for (double& v : values) v = rng.next_gaussian();
    Matrix a = Matrix::dense(m, n, std::move(values));
    Vector ones(n, 1.0);
    Vector b = a.multiply(ones);
    Problem p(ProblemKind::Gaussian, std::move(a), std::move(b));
    p.x_ref = std::move(ones);
    p.consistent = true;
    return p;
}

/// b <- A x_ref + e with e an isotropic Gaussian direction scaled so the
/// relative level ||e|| / ||A x_ref|| equals delta exactly.
inline Problem add_noise(Problem p, double delta, RngStream stream) {
    if (!(delta > 0.0)) throw argument_error("add_noise: delta must be > 0");
    if (!p.consistent) throw argument_error("add_noise: problem is already inconsistent");
    if (!p.x_ref) throw argument_error("add_noise: problem has no reference solution");
    Vector clean = p.a.multiply(*p.x_ref);
    const double signal = norm(clean);
    if (signal == 0.0) throw argument_error("add_noise: A*x_ref is zero, nothing to scale");

    Rng rng(stream);
    Vector g(clean.size());
    for (double& v : g) v = rng.next_gaussian();
    const double gn = norm(g);
    if (gn == 0.0) throw numeric_error("add_noise: degenerate noise draw");
    const double scale = delta * signal / gn;
    for (std::size_t i = 0; i < clean.size(); ++i) clean[i] += scale * g[i];
    p.b = std::move(clean);
    p.noise_level = delta;
    p.consistent = false;
    return p;
}

struct Ellipse {
    double cx = 0.5, cy = 0.5; // center in the unit square
    double rx = 0.1, ry = 0.1; // semi-axes
    double angle = 0.0;        // rotation in radians
    double intensity = 1.0;    // additive; may be negative, the image is clamped
};

/// Fixed head-like arrangement: skull ring at 1.0, interior tissue at 0.3,
/// two off-center blobs at 0.7 and 0.8.
inline std::vector<Ellipse> head_phantom() {
    return {
        {0.50, 0.50, 0.36, 0.46, 0.0, 1.0},
        {0.50, 0.50, 0.30, 0.40, 0.0, -0.7},
        {0.38, 0.58, 0.08, 0.12, 0.4, 0.4},
        {0.63, 0.42, 0.10, 0.07, -0.3, 0.5},
    };
}

namespace detail {

inline void check_phantom(const std::vector<Ellipse>& spec) {
    if (spec.empty()) throw argument_error("phantom: ellipse list is empty");
    for (const auto& e : spec) {
        if (!(e.cx >= 0.0 && e.cx <= 1.0 && e.cy >= 0.0 && e.cy <= 1.0))
            throw argument_error("phantom: ellipse center outside the unit square");
        if (!(e.rx > 0.0 && e.rx <= 1.0 && e.ry > 0.0 && e.ry <= 1.0))
            throw argument_error("phantom: ellipse semi-axes must lie in (0, 1]");
        if (!std::isfinite(e.angle) || !std::isfinite(e.intensity))
            throw argument_error("phantom: non-finite ellipse parameter");
    }
}

inline bool ellipse_covers(const Ellipse& e, double px, double py) {
    const double dx = px - e.cx;
    const double dy = py - e.cy;
    const double c = std::cos(e.angle);
    const double s = std::sin(e.angle);
    const double xr = (dx * c + dy * s) / e.rx;
    const double yr = (-dx * s + dy * c) / e.ry;
    return xr * xr + yr * yr <= 1.0;
}

} // namespace detail

/// Length-N^2 image over the unit square, indexed row*N+col with row 0 at the
/// bottom; pixel value = sum of covering intensities at the pixel center,
/// clamped to [0,1].
inline Vector rasterize_phantom(const std::vector<Ellipse>& spec, std::size_t n_grid) {
    detail::check_phantom(spec);
    if (n_grid < 1) throw argument_error("phantom: grid size must be >= 1");
    Vector img(n_grid * n_grid, 0.0);
    const double h = 1.0 / static_cast<double>(n_grid);
    for (std::size_t iy = 0; iy < n_grid; ++iy) {
        const double py = (static_cast<double>(iy) + 0.5) * h;
        for (std::size_t ix = 0; ix < n_grid; ++ix) {
            const double px = (static_cast<double>(ix) + 0.5) * h;
            double v = 0.0;
            for (const auto& e : spec)
                if (detail::ellipse_covers(e, px, py)) v += e.intensity;
            img[iy * n_grid + ix] = std::clamp(v, 0.0, 1.0);
        }
    }
    return img;
}

struct TomoGeometry {
    std::size_t grid_size = 32;    // N; the image is N x N over [0,1] x [0,1]
    std::size_t num_angles = 36;
    std::size_t num_detectors = 32;
    std::vector<double> angles;    // radians in [0, pi); filled equally spaced if empty
};

inline TomoGeometry make_parallel_geometry(std::size_t grid, std::size_t n_angles,
                                           std::size_t n_detectors) {
    TomoGeometry g;
    g.grid_size = grid;
    g.num_angles = n_angles;
    g.num_detectors = n_detectors;
    g.angles.resize(n_angles);
    for (std::size_t j = 0; j < n_angles; ++j)
        g.angles[j] = M_PI * static_cast<double>(j) / static_cast<double>(n_angles);
    return g;
}

namespace detail {

/// Exact cell/length decomposition of one ray through the N x N unit-square
/// grid: clip to the square, split at every grid line, attribute each piece by
/// its midpoint. Pieces shorter than 1e-12 are dropped.
inline std::map<std::size_t, double> trace_ray(double ox, double oy, double dx, double dy,
                                               std::size_t n_grid) {
    std::map<std::size_t, double> cells;
    double s_lo = -4.0, s_hi = 4.0; // the square sits within 4 units of any detector point
    const double o[2] = {ox, oy};
    const double d[2] = {dx, dy};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(d[axis]) < 1e-12) {
            if (o[axis] < 0.0 || o[axis] > 1.0) return cells;
            continue;
        }
        const double s1 = (0.0 - o[axis]) / d[axis];
        const double s2 = (1.0 - o[axis]) / d[axis];
        s_lo = std::max(s_lo, std::min(s1, s2));
        s_hi = std::min(s_hi, std::max(s1, s2));
    }
    if (s_hi - s_lo <= 1e-12) return cells;

    std::vector<double> cuts;
    cuts.push_back(s_lo);
    cuts.push_back(s_hi);
    const double h = 1.0 / static_cast<double>(n_grid);
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(d[axis]) < 1e-12) continue;
        for (std::size_t k = 0; k <= n_grid; ++k) {
            const double s = (static_cast<double>(k) * h - o[axis]) / d[axis];
            if (s > s_lo && s < s_hi) cuts.push_back(s);
        }
    }
    std::sort(cuts.begin(), cuts.end());

    const auto n = static_cast<std::ptrdiff_t>(n_grid);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        const double len = cuts[k + 1] - cuts[k];
        if (len < 1e-12) continue;
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        const double px = ox + mid * dx;
        const double py = oy + mid * dy;
        const auto ix = std::clamp(static_cast<std::ptrdiff_t>(std::floor(px * n_grid)),
                                   std::ptrdiff_t{0}, n - 1);
        const auto iy = std::clamp(static_cast<std::ptrdiff_t>(std::floor(py * n_grid)),
                                   std::ptrdiff_t{0}, n - 1);
        cells[static_cast<std::size_t>(iy) * n_grid + static_cast<std::size_t>(ix)] += len;
    }
    return cells;
}

} // namespace detail

/// Parallel-beam operator on the unit square: one CSR row per (angle,
/// detector) ray that meets the grid, entries are exact intersection lengths.
/// Detector offsets span the square's diagonal so every angle covers the
/// whole image. x_ref is the rasterized phantom and b = A x_ref.
inline Problem gen_parallel_tomo(const TomoGeometry& geom,
                                 const std::vector<Ellipse>& phantom) {
    const std::size_t n_grid = geom.grid_size;
    if (n_grid < 1 || n_grid > 128)
        throw argument_error("tomography: grid size must lie in [1, 128]");
    std::vector<double> angles = geom.angles;
    if (angles.empty()) angles = make_parallel_geometry(n_grid, geom.num_angles, 1).angles;
    if (angles.empty()) throw argument_error("tomography: no projection angles");
    for (double t : angles)
        if (!(t >= 0.0 && t < M_PI))
            throw argument_error("tomography: angles must lie in [0, pi)");
    if (geom.num_detectors < 1) throw argument_error("tomography: need >= 1 detector");

    const double span = std::sqrt(2.0);
    const std::size_t nd = geom.num_detectors;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    for (const double theta : angles) {
        const double dx = std::cos(theta);
        const double dy = std::sin(theta);
        const double ux = -dy;
        const double uy = dx;
        for (std::size_t j = 0; j < nd; ++j) {
            const double t =
                span * ((static_cast<double>(j) + 0.5) / static_cast<double>(nd) - 0.5);
            const auto cells =
                detail::trace_ray(0.5 + t * ux, 0.5 + t * uy, dx, dy, n_grid);
            if (cells.empty()) continue;
            for (const auto& [cell, len] : cells) {
                cols.push_back(cell);
                vals.push_back(len);
            }
            row_ptr.push_back(cols.size());
        }
    }
    const std::size_t m = row_ptr.size() - 1;
    if (m == 0) throw numeric_error("tomography: every ray missed the grid");

    Matrix a = Matrix::csr(m, n_grid * n_grid, std::move(row_ptr), std::move(cols),
                           std::move(vals));
    Vector x_ref = rasterize_phantom(phantom, n_grid);
    Vector b = a.multiply(x_ref);
    Problem p(ProblemKind::TomoParallel, std::move(a), std::move(b));
    p.x_ref = std::move(x_ref);
    p.consistent = true;
    return p;
}

} // namespace rrs
