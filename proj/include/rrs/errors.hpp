#pragma once

#include <stdexcept>
#include <string>

namespace rrs {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid arguments, indices, or configuration (CLI exit code 1).
struct argument_error : error {
    using error::error;
};

/// Malformed input files; message carries a line number where known (CLI exit code 1).
struct parse_error : error {
    using error::error;
};

/// Filesystem/stream failures (CLI exit code 1).
struct io_error : error {
    using error::error;
};

/// Numerical or domain failures: rank deficiency, degenerate denominators,
/// zero-norm rows, over-threshold dense work, empty geometry (CLI exit code 2).
struct numeric_error : error {
    using error::error;
};

} // namespace rrs
