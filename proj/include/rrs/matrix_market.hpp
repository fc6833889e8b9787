#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "rrs/errors.hpp"
#include "rrs/matrix.hpp"
#include "rrs/text.hpp"

namespace rrs {

/// Storage selection for matrices built from files. Auto picks CSR when the
/// file density is below 25%, dense otherwise.
enum class StoragePick { Auto, Dense, Csr };

namespace detail {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

inline Matrix build_from_triplets(std::size_t m, std::size_t n, std::vector<Triplet> entries,
                                  StoragePick pick, double file_density) {
    const bool use_csr = pick == StoragePick::Csr ||
                         (pick == StoragePick::Auto && file_density < 0.25);
    if (!use_csr) {
        std::vector<double> dense(m * n, 0.0);
        for (const auto& t : entries) dense[t.row * n + t.col] += t.value; // duplicates sum
        return Matrix::dense(m, n, std::move(dense));
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    std::vector<std::size_t> row_ptr(m + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size();) {
        std::size_t j = k + 1;
        double sum = entries[k].value;
        while (j < entries.size() && entries[j].row == entries[k].row &&
               entries[j].col == entries[k].col) {
            sum += entries[j].value; // duplicates sum
            ++j;
        }
        col_idx.push_back(entries[k].col);
        values.push_back(sum);
        ++row_ptr[entries[k].row + 1];
        k = j;
    }
    for (std::size_t i = 0; i < m; ++i) row_ptr[i + 1] += row_ptr[i];
    return Matrix::csr(m, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

class MmLineReader {
public:
    MmLineReader(std::istream& in, std::size_t already_consumed)
        : in_(in), line_no_(already_consumed) {}

    /// Next non-blank, non-comment line; false at end of input.
    bool next(std::string& out) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '%') continue;
            out = t;
            return true;
        }
        return false;
    }

    std::size_t line_no() const { return line_no_; }

private:
    std::istream& in_;
    std::size_t line_no_ = 0;
};

[[noreturn]] inline void mm_fail(const std::string& what, std::size_t line) {
    throw parse_error("matrix market: " + what + " (line " + std::to_string(line) + ")");
}

} // namespace detail

/// Reads a Matrix Market stream. Supported: "coordinate real general",
/// "coordinate real symmetric" (expanded to full storage, duplicates summed)
/// and "array real general|symmetric" (column-major values). Indices in
/// coordinate entries are 1-based.
inline Matrix read_matrix_market(std::istream& in, StoragePick pick = StoragePick::Auto) {
    std::string line;
    if (!std::getline(in, line)) throw parse_error("matrix market: empty input (line 1)");
    auto header = split_ws(to_lower(line));
    if (header.size() < 4 || header[0] != "%%matrixmarket" || header[1] != "matrix")
        detail::mm_fail("bad header, expected '%%MatrixMarket matrix ...'", 1);
    const std::string format = header[2];
    const std::string field = header[3];
    const std::string symmetry = header.size() > 4 ? header[4] : "general";
    if (format != "coordinate" && format != "array")
        detail::mm_fail("unsupported format '" + format + "'", 1);
    if (field != "real")
        detail::mm_fail("unsupported field '" + field + "', only real is handled", 1);
    if (symmetry != "general" && symmetry != "symmetric")
        detail::mm_fail("unsupported symmetry '" + symmetry + "'", 1);
    const bool symmetric = symmetry == "symmetric";

    detail::MmLineReader reader(in, 1); // the header occupied line 1
    if (!reader.next(line)) detail::mm_fail("missing size line", reader.line_no() + 1);
    const auto size_tokens = split_ws(line);

    if (format == "coordinate") {
        std::size_t m = 0, n = 0, nnz = 0;
        if (size_tokens.size() != 3 || !parse_size(size_tokens[0], m) ||
            !parse_size(size_tokens[1], n) || !parse_size(size_tokens[2], nnz))
            detail::mm_fail("bad coordinate size line, expected 'm n nnz'", reader.line_no());
        std::vector<detail::Triplet> entries;
        entries.reserve(symmetric ? 2 * nnz : nnz);
        for (std::size_t k = 0; k < nnz; ++k) {
            if (!reader.next(line)) detail::mm_fail("unexpected end of entries", reader.line_no());
            const auto tok = split_ws(line);
            std::size_t i = 0, j = 0;
            double v = 0.0;
            if (tok.size() != 3 || !parse_size(tok[0], i) || !parse_size(tok[1], j) ||
                !parse_double(tok[2], v))
                detail::mm_fail("bad entry, expected 'i j value'", reader.line_no());
            if (i < 1 || i > m || j < 1 || j > n)
                detail::mm_fail("entry index out of bounds", reader.line_no());
            entries.push_back({i - 1, j - 1, v});
            if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
        }
        const double mn = static_cast<double>(m) * static_cast<double>(n);
        const double file_density = mn > 0 ? static_cast<double>(entries.size()) / mn : 1.0;
        return detail::build_from_triplets(m, n, std::move(entries), pick, file_density);
    }

    // array format
    std::size_t m = 0, n = 0;
    if (size_tokens.size() != 2 || !parse_size(size_tokens[0], m) || !parse_size(size_tokens[1], n))
        detail::mm_fail("bad array size line, expected 'm n'", reader.line_no());
    if (symmetric && m != n) detail::mm_fail("symmetric array must be square", reader.line_no());
    std::vector<double> dense(m * n, 0.0);
    auto read_value = [&](double& v) {
        if (!reader.next(line)) detail::mm_fail("unexpected end of array values", reader.line_no());
        if (!parse_double(trim(line), v))
            detail::mm_fail("bad array value '" + trim(line) + "'", reader.line_no());
    };
    if (!symmetric) {
        for (std::size_t j = 0; j < n; ++j) // column-major on disk
            for (std::size_t i = 0; i < m; ++i) {
                double v;
                read_value(v);
                dense[i * n + j] = v;
            }
    } else {
        for (std::size_t j = 0; j < n; ++j) // lower triangle, column-major
            for (std::size_t i = j; i < m; ++i) {
                double v;
                read_value(v);
                dense[i * n + j] = v;
                dense[j * n + i] = v;
            }
    }
    if (pick == StoragePick::Csr) {
        std::vector<detail::Triplet> entries;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (dense[i * n + j] != 0.0) entries.push_back({i, j, dense[i * n + j]});
        return detail::build_from_triplets(m, n, std::move(entries), StoragePick::Csr, 0.0);
    }
    return Matrix::dense(m, n, std::move(dense));
}

inline Matrix read_matrix_market_file(const std::filesystem::path& path,
                                      StoragePick pick = StoragePick::Auto) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open matrix file: " + path.string());
    return read_matrix_market(in, pick);
}

/// Writes coordinate real general format (1-based indices, 17 significant
/// digits, nonzero entries only). Returns the number of bytes written.
inline std::size_t write_matrix_market(const Matrix& a, std::ostream& out) {
    std::string buf = "%%MatrixMarket matrix coordinate real general\n";
    std::size_t nnz = 0;
    std::string body;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (const auto [j, v] : a.row(i)) {
            body += std::to_string(i + 1);
            body += ' ';
            body += std::to_string(j + 1);
            body += ' ';
            body += fmt_g17(v);
            body += '\n';
            ++nnz;
        }
    }
    buf += std::to_string(a.rows()) + " " + std::to_string(a.cols()) + " " + std::to_string(nnz) +
           "\n";
    buf += body;
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw io_error("matrix market: write failure");
    return buf.size();
}

inline void write_matrix_market_file(const Matrix& a, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open matrix file for writing: " + path.string());
    write_matrix_market(a, out);
}

} // namespace rrs
