#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <utility>

#include "rrs/errors.hpp"
#include "rrs/matrix_market.hpp"
#include "rrs/problems.hpp"
#include "rrs/text.hpp"
#include "rrs/vec.hpp"

namespace rrs {

inline void write_vector_file(const Vector& v, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    for (double x : v) out << fmt_g17(x) << '\n';
    if (!out) throw io_error("write failed: " + path.string());
}

inline Vector read_vector_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path.string());
    Vector v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty()) continue;
        double value = 0.0;
        if (!parse_double(body, value))
            throw parse_error(path.string() + ":" + std::to_string(line_no) +
                              ": not a number: " + body);
        v.push_back(value);
    }
    return v;
}

using MetaMap = std::map<std::string, std::string>;

inline void write_meta_file(const MetaMap& meta, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    for (const auto& [k, v] : meta) out << k << '=' << v << '\n';
}

inline MetaMap read_meta_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open: " + path.string());
    MetaMap meta;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw parse_error(path.string() + ":" + std::to_string(line_no) +
                              ": expected key=value");
        meta[trim(body.substr(0, eq))] = trim(body.substr(eq + 1));
    }
    return meta;
}

/// Lays out a problem as a directory: matrix.mtx, b.txt, x_ref.txt (when
/// known) and meta.txt (key=value). Extra metadata (seed, geometry) is merged
/// into meta.txt.
inline void write_problem(const Problem& p, const std::filesystem::path& dir,
                          MetaMap extra = {}) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw io_error("cannot create directory: " + dir.string());

    write_matrix_market_file(p.a, dir / "matrix.mtx");
    write_vector_file(p.b, dir / "b.txt");
    if (p.x_ref) write_vector_file(*p.x_ref, dir / "x_ref.txt");

    MetaMap meta = std::move(extra);
    meta["kind"] = kind_name(p.kind);
    meta["m"] = std::to_string(p.a.rows());
    meta["n"] = std::to_string(p.a.cols());
    meta["consistent"] = p.consistent ? "1" : "0";
    meta["delta"] = fmt_g17(p.noise_level);
    write_meta_file(meta, dir / "meta.txt");
}

inline Problem read_problem(const std::filesystem::path& dir,
                            StoragePick pick = StoragePick::Auto) {
    Matrix a = read_matrix_market_file(dir / "matrix.mtx", pick);
    Vector b = read_vector_file(dir / "b.txt");
    if (b.size() != a.rows())
        throw parse_error(dir.string() + ": b.txt length does not match the matrix");

    ProblemKind kind = ProblemKind::MatrixMarket;
    bool consistent = false;
    double delta = 0.0;
    if (std::filesystem::exists(dir / "meta.txt")) {
        const MetaMap meta = read_meta_file(dir / "meta.txt");
        if (auto it = meta.find("kind"); it != meta.end()) kind = kind_from_name(it->second);
        if (auto it = meta.find("consistent"); it != meta.end())
            consistent = it->second == "1";
        if (auto it = meta.find("delta"); it != meta.end() && !parse_double(it->second, delta))
            throw parse_error(dir.string() + ": bad delta in meta.txt");
    }

    Problem p(kind, std::move(a), std::move(b));
    p.consistent = consistent;
    p.noise_level = delta;
    if (std::filesystem::exists(dir / "x_ref.txt")) {
        Vector x = read_vector_file(dir / "x_ref.txt");
        if (x.size() != p.a.cols())
            throw parse_error(dir.string() + ": x_ref.txt length does not match the matrix");
        p.x_ref = std::move(x);
    }
    return p;
}

} // namespace rrs
