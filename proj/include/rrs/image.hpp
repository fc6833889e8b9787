#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <string>

#include "rrs/errors.hpp"
#include "rrs/vec.hpp"

namespace rrs {

/// Binary 8-bit PGM. The vector is indexed row*width+col with row 0 at the
/// bottom; values are clamped to [0,1] and rescaled linearly to 0..255.
inline void write_pgm(const Vector& img, std::size_t width, std::size_t height,
                      const std::filesystem::path& path) {
    if (img.size() != width * height || width == 0 || height == 0)
        throw argument_error("write_pgm: image size does not match dimensions");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << "P5\n" << width << ' ' << height << "\n255\n";
    std::string bytes;
    bytes.reserve(img.size());
    for (std::size_t row = height; row-- > 0;) {
        for (std::size_t col = 0; col < width; ++col) {
            const double v = std::clamp(img[row * width + col], 0.0, 1.0);
            bytes.push_back(static_cast<char>(std::lround(v * 255.0)));
        }
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw io_error("write failed: " + path.string());
}

} // namespace rrs
