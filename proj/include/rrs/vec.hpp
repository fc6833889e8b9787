#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "rrs/errors.hpp"

namespace rrs {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw argument_error("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// y += alpha * x
inline void axpy(double alpha, const Vector& x, Vector& y) {
    if (x.size() != y.size()) throw argument_error("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double sq_norm(const Vector& a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return s;
}

inline double norm(const Vector& a) { return std::sqrt(sq_norm(a)); }

inline void scale(Vector& a, double alpha) {
    for (double& v : a) v *= alpha;
}

inline Vector scaled(const Vector& a, double alpha) {
    Vector r = a;
    scale(r, alpha);
    return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw argument_error("sub: length mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline double distance_sq(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw argument_error("distance_sq: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

} // namespace rrs
