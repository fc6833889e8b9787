#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "rrs/errors.hpp"

namespace rrs {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

inline const char* plot_color(std::size_t i) {
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
    return palette[i % 8];
}

} // namespace detail

/// Minimal self-contained line plot: axes, ticks, legend, one polyline per
/// series. With log_y the vertical axis is log10 with values floored at
/// 1e-16; ticks sit on decades.
inline void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                           const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series, bool log_y) {
    if (series.empty()) throw argument_error("svg plot: no series");
    const double width = 800, height = 560;
    const double left = 80, right = 770, top = 50, bottom = 500;

    constexpr double floor_y = 1e-16;
    double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
    double y_min = x_min, y_max = -x_min;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (log_y) y = std::max(y, floor_y);
            x_min = std::min(x_min, x);
            x_max = std::max(x_max, x);
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (!(x_min <= x_max) || !(y_min <= y_max))
        throw argument_error("svg plot: series contain no points");
    if (x_max == x_min) x_max = x_min + 1;
    if (log_y) {
        y_min = std::log10(y_min);
        y_max = std::log10(y_max);
    }
    if (y_max == y_min) y_max = y_min + 1;

    const auto sx = [&](double x) {
        return left + (x - x_min) / (x_max - x_min) * (right - left);
    };
    const auto sy = [&](double y) {
        if (log_y) y = std::log10(std::max(y, floor_y));
        return bottom - (y - y_min) / (y_max - y_min) * (bottom - top);
    };

    std::ofstream out(path);
    if (!out) throw io_error("cannot open for writing: " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << (width / 2) << "\" y=\"28\" font-family=\"sans-serif\" "
           "font-size=\"18\" text-anchor=\"middle\">"
        << title << "</text>\n";

    // axes
    out << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right
        << "\" y2=\"" << bottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << bottom << "\" stroke=\"black\"/>\n";

    // x ticks: a nice 1/2/5 step
    const double span = x_max - x_min;
    double step = std::pow(10.0, std::floor(std::log10(span / 5.0)));
    if (span / step > 10.0) step *= 5.0;
    else if (span / step > 5.0) step *= 2.0;
    for (double t = std::ceil(x_min / step) * step; t <= x_max + 1e-9 * span; t += step) {
        const double px = sx(t);
        out << "<line x1=\"" << detail::svg_num(px) << "\" y1=\"" << bottom << "\" x2=\""
            << detail::svg_num(px) << "\" y2=\"" << (bottom + 6) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << detail::svg_num(px) << "\" y=\"" << (bottom + 22)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">"
            << detail::tick_label(t) << "</text>\n";
    }

    // y ticks: decades when log, else a nice step
    std::vector<double> yticks;
    if (log_y) {
        const int lo = static_cast<int>(std::ceil(y_min - 1e-9));
        const int hi = static_cast<int>(std::floor(y_max + 1e-9));
        const int dec = std::max(1, (hi - lo) / 8 + 1);
        for (int e = lo; e <= hi; e += dec) yticks.push_back(std::pow(10.0, e));
    } else {
        const double yspan = y_max - y_min;
        double ys = std::pow(10.0, std::floor(std::log10(yspan / 5.0)));
        if (yspan / ys > 10.0) ys *= 5.0;
        else if (yspan / ys > 5.0) ys *= 2.0;
        for (double t = std::ceil(y_min / ys) * ys; t <= y_max + 1e-9 * yspan; t += ys)
            yticks.push_back(t);
    }
    for (double t : yticks) {
        const double py = sy(t);
        out << "<line x1=\"" << (left - 6) << "\" y1=\"" << detail::svg_num(py) << "\" x2=\""
            << left << "\" y2=\"" << detail::svg_num(py) << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << left << "\" y1=\"" << detail::svg_num(py) << "\" x2=\""
            << right << "\" y2=\"" << detail::svg_num(py)
            << "\" stroke=\"#dddddd\" stroke-width=\"0.5\"/>\n";
        out << "<text x=\"" << (left - 10) << "\" y=\"" << detail::svg_num(py + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"end\">"
            << detail::tick_label(t) << "</text>\n";
    }

    out << "<text x=\"" << ((left + right) / 2) << "\" y=\"" << (bottom + 44)
        << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    out << "<text x=\"22\" y=\"" << ((top + bottom) / 2)
        << "\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 22 "
        << ((top + bottom) / 2) << ")\">" << y_label << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        if (series[i].points.empty()) continue;
        out << "<polyline fill=\"none\" stroke=\"" << detail::plot_color(i)
            << "\" stroke-width=\"1.5\" points=\"";
        for (auto [x, y] : series[i].points)
            out << detail::svg_num(sx(x)) << ',' << detail::svg_num(sy(y)) << ' ';
        out << "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(i);
        out << "<line x1=\"" << (right - 150) << "\" y1=\"" << detail::svg_num(ly)
            << "\" x2=\"" << (right - 120) << "\" y2=\"" << detail::svg_num(ly)
            << "\" stroke=\"" << detail::plot_color(i) << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << (right - 114) << "\" y=\"" << detail::svg_num(ly + 4)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << series[i].label
            << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw io_error("write failed: " + path.string());
}

} // namespace rrs
