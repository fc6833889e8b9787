#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "rrs/errors.hpp"
#include "rrs/matrix.hpp"
#include "rrs/rng.hpp"

namespace rrs {

/// Draws row indices with probability ||a_i||^2 / ||A||_F^2 via prefix sums
/// of the cached squared row norms and a binary search per draw. Zero-norm
/// rows carry an empty interval and are never drawn. Single-owner mutable
/// state: the RNG advances with every draw.
class RowSampler {
public:
    RowSampler(const Matrix& a, RngStream stream) : rng_(stream) {
        cumulative_.reserve(a.rows());
        double run = 0.0;
        for (double s : a.row_sq_norms()) {
            run += s;
            cumulative_.push_back(run);
        }
        total_ = run;
        if (cumulative_.empty() || total_ <= 0.0)
            throw numeric_error("row sampler: matrix has no rows with nonzero norm");
        last_nonzero_ = 0;
        for (std::size_t i = 0; i < a.rows(); ++i)
            if (a.row_sq_norms()[i] > 0.0) last_nonzero_ = i;
    }

    /// Row i is selected when the uniform draw lands in [cum[i-1], cum[i]);
    /// ties at a boundary resolve to the higher index.
    std::size_t draw() {
        const double u = rng_.next_unit() * total_;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) return last_nonzero_; // u rounded up to the total
        return static_cast<std::size_t>(it - cumulative_.begin());
    }

    const std::vector<double>& cumulative() const { return cumulative_; }
    double total() const { return total_; }

    double probability(std::size_t i) const {
        if (i >= cumulative_.size()) throw argument_error("probability: row index out of range");
        const double lo = i == 0 ? 0.0 : cumulative_[i - 1];
        return (cumulative_[i] - lo) / total_;
    }

private:
    std::vector<double> cumulative_;
    double total_ = 0.0;
    std::size_t last_nonzero_ = 0;
    Rng rng_;
};

} // namespace rrs
