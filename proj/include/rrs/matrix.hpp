#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "rrs/errors.hpp"
#include "rrs/vec.hpp"

namespace rrs {

struct RowEntry {
    std::size_t col;
    double value;
};

/// Non-owning view over one matrix row, yielding (column, value) pairs of the
/// nonzero entries. Works for both dense and CSR storage; iteration cost is
/// O(stored entries of the row).
class RowView {
public:
    class iterator {
    public:
        iterator(const double* vals, const std::size_t* cols, std::size_t pos, std::size_t end)
            : vals_(vals), cols_(cols), pos_(pos), end_(end) {
            skip_zeros();
        }

        RowEntry operator*() const { return {cols_ ? cols_[pos_] : pos_, vals_[pos_]}; }

        iterator& operator++() {
            ++pos_;
            skip_zeros();
            return *this;
        }

        bool operator==(const iterator& o) const { return pos_ == o.pos_; }
        bool operator!=(const iterator& o) const { return pos_ != o.pos_; }

    private:
        void skip_zeros() {
            while (pos_ != end_ && vals_[pos_] == 0.0) ++pos_;
        }

        const double* vals_;
        const std::size_t* cols_;
        std::size_t pos_;
        std::size_t end_;
    };

    iterator begin() const { return {vals_, cols_, 0, count_}; }
    iterator end() const { return {vals_, cols_, count_, count_}; }

    /// Stored entries in the row (including explicit zeros).
    std::size_t stored() const { return count_; }

private:
    friend class Matrix;
    RowView(const double* vals, const std::size_t* cols, std::size_t count)
        : vals_(vals), cols_(cols), count_(count) {}

    const double* vals_;
    const std::size_t* cols_; // nullptr: dense row, column == position
    std::size_t count_;
};

/// Immutable matrix with dense row-major or CSR storage. Squared row norms
/// and the squared Frobenius norm are computed once at construction; all
/// accessors are const and safe to share across threads.
class Matrix {
public:
    enum class Layout { Dense, Csr };

    static Matrix dense(std::size_t rows, std::size_t cols, std::vector<double> values) {
        if (values.size() != rows * cols)
            throw argument_error("dense: value count does not match rows*cols");
        Matrix a;
        a.rows_ = rows;
        a.cols_ = cols;
        a.layout_ = Layout::Dense;
        a.values_ = std::move(values);
        a.finalize_norms();
        return a;
    }

    static Matrix csr(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                      std::vector<std::size_t> col_idx, std::vector<double> values) {
        if (row_ptr.size() != rows + 1) throw argument_error("csr: row_ptr length must be rows+1");
        if (row_ptr.front() != 0) throw argument_error("csr: row_ptr must start at 0");
        if (col_idx.size() != values.size())
            throw argument_error("csr: col_idx and values length mismatch");
        if (row_ptr.back() != values.size())
            throw argument_error("csr: row_ptr end does not match value count");
        for (std::size_t i = 0; i < rows; ++i) {
            if (row_ptr[i] > row_ptr[i + 1])
                throw argument_error("csr: row_ptr must be non-decreasing (row " +
                                     std::to_string(i) + ")");
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
                if (col_idx[k] >= cols)
                    throw argument_error("csr: column index out of range in row " +
                                         std::to_string(i));
                if (k > row_ptr[i] && col_idx[k - 1] >= col_idx[k])
                    throw argument_error("csr: column indices must be strictly increasing in row " +
                                         std::to_string(i));
            }
        }
        Matrix a;
        a.rows_ = rows;
        a.cols_ = cols;
        a.layout_ = Layout::Csr;
        a.row_ptr_ = std::move(row_ptr);
        a.col_idx_ = std::move(col_idx);
        a.values_ = std::move(values);
        a.finalize_norms();
        return a;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Layout layout() const { return layout_; }

    double frobenius_sq() const { return frobenius_sq_; }
    const std::vector<double>& row_sq_norms() const { return row_sq_norms_; }

    double row_sq_norm(std::size_t i) const {
        check_row(i);
        return row_sq_norms_[i];
    }

    /// Count of stored entries with a nonzero value.
    std::size_t nonzeros() const {
        std::size_t nnz = 0;
        for (double v : values_)
            if (v != 0.0) ++nnz;
        return nnz;
    }

    /// nnz / (m*n)
    double density() const {
        if (rows_ == 0 || cols_ == 0) throw argument_error("density: empty matrix");
        return static_cast<double>(nonzeros()) /
               (static_cast<double>(rows_) * static_cast<double>(cols_));
    }

    RowView row(std::size_t i) const {
        check_row(i);
        if (layout_ == Layout::Dense) return {values_.data() + i * cols_, nullptr, cols_};
        return {values_.data() + row_ptr_[i], col_idx_.data() + row_ptr_[i],
                row_ptr_[i + 1] - row_ptr_[i]};
    }

    /// a_i . x
    double row_dot(std::size_t i, const Vector& x) const {
        check_row(i);
        if (x.size() != cols_) throw argument_error("row_dot: vector length mismatch");
        double s = 0.0;
        if (layout_ == Layout::Dense) {
            const double* r = values_.data() + i * cols_;
            for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
        } else {
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                s += values_[k] * x[col_idx_[k]];
        }
        return s;
    }

    /// x += alpha * a_i
    void row_axpy(std::size_t i, double alpha, Vector& x) const {
        check_row(i);
        if (x.size() != cols_) throw argument_error("row_axpy: vector length mismatch");
        if (layout_ == Layout::Dense) {
            const double* r = values_.data() + i * cols_;
            for (std::size_t j = 0; j < cols_; ++j) x[j] += alpha * r[j];
        } else {
            for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                x[col_idx_[k]] += alpha * values_[k];
        }
    }

    /// y = A x
    void multiply(const Vector& x, Vector& y) const {
        if (x.size() != cols_) throw argument_error("multiply: vector length mismatch");
        y.assign(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) y[i] = row_dot(i, x);
    }

    Vector multiply(const Vector& x) const {
        Vector y;
        multiply(x, y);
        return y;
    }

    double at(std::size_t i, std::size_t j) const {
        check_row(i);
        if (j >= cols_) throw argument_error("at: column index out of range");
        if (layout_ == Layout::Dense) return values_[i * cols_ + j];
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
            if (col_idx_[k] == j) return values_[k];
        return 0.0;
    }

private:
    Matrix() = default;

    void check_row(std::size_t i) const {
        if (i >= rows_) throw argument_error("row index out of range");
    }

    void finalize_norms() {
        row_sq_norms_.assign(rows_, 0.0);
        if (layout_ == Layout::Dense) {
            for (std::size_t i = 0; i < rows_; ++i) {
                double s = 0.0;
                const double* r = values_.data() + i * cols_;
                for (std::size_t j = 0; j < cols_; ++j) s += r[j] * r[j];
                row_sq_norms_[i] = s;
            }
        } else {
            for (std::size_t i = 0; i < rows_; ++i) {
                double s = 0.0;
                for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
                    s += values_[k] * values_[k];
                row_sq_norms_[i] = s;
            }
        }
        frobenius_sq_ = 0.0;
        for (double s : row_sq_norms_) frobenius_sq_ += s;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Layout layout_ = Layout::Dense;
    std::vector<double> values_;
    std::vector<std::size_t> row_ptr_; // CSR only
    std::vector<std::size_t> col_idx_; // CSR only
    std::vector<double> row_sq_norms_;
    double frobenius_sq_ = 0.0;
};

} // namespace rrs
