#include "credrisk/svg_plot.hpp"

#include "credrisk/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace credrisk::plot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 440.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 70.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

std::string escape_xml(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void finish() {
        if (!std::isfinite(lo)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            // Degenerate range (a single point): pad symmetrically.
            const double pad = std::max(std::abs(lo) * 0.1, 0.5);
            lo -= pad;
            hi += pad;
        } else {
            const double pad = (hi - lo) * 0.05;
            lo -= pad;
            hi += pad;
        }
    }
    double map(double v, double from, double to) const { return from + (v - lo) / (hi - lo) * (to - from); }
};

} // namespace

std::string render(const Chart& chart) {
    Range xr;
    Range yl;
    Range yr;
    bool has_right = false;
    for (const auto& s : chart.series) {
        for (double x : s.x) xr.include(x);
        for (double y : s.y) (s.axis == Axis::left ? yl : yr).include(y);
        has_right = has_right || s.axis == Axis::right;
    }
    xr.finish();
    yl.finish();
    yr.finish();

    const double x0 = kLeft;
    const double x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom;
    const double y1 = kTop;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
        << escape_xml(chart.title) << "</text>\n";
    svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(y1) << "\" width=\"" << num(x1 - x0) << "\" height=\""
        << num(y0 - y1) << "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double px = xr.map(fx, x0, x1);
        svg << "<text x=\"" << num(px) << "\" y=\"" << num(y0 + 16) << "\" text-anchor=\"middle\">" << tick(fx)
            << "</text>\n";
        const double fy = yl.lo + (yl.hi - yl.lo) * i / 4.0;
        const double py = yl.map(fy, y0, y1);
        svg << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick(fy)
            << "</text>\n";
        if (has_right) {
            const double fr = yr.lo + (yr.hi - yr.lo) * i / 4.0;
            const double pr = yr.map(fr, y0, y1);
            svg << "<text x=\"" << num(x1 + 6) << "\" y=\"" << num(pr + 4) << "\" text-anchor=\"start\">"
                << tick(fr) << "</text>\n";
        }
    }
    svg << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(kHeight - 14)
        << "\" text-anchor=\"middle\">" << escape_xml(chart.x_label) << "</text>\n";
    svg << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num((y0 + y1) / 2) << ")\">" << escape_xml(chart.y_label) << "</text>\n";
    if (has_right) {
        svg << "<text x=\"" << num(kWidth - 14) << "\" y=\"" << num((y0 + y1) / 2)
            << "\" text-anchor=\"middle\" transform=\"rotate(90 " << num(kWidth - 14) << ' ' << num((y0 + y1) / 2)
            << ")\">" << escape_xml(chart.y2_label) << "</text>\n";
    }

    for (std::size_t s = 0; s < chart.series.size(); ++s) {
        const auto& series = chart.series[s];
        const Range& yrange = series.axis == Axis::left ? yl : yr;
        const char* colour = kPalette[s % kPalette.size()];
        std::string points;
        const std::size_t n = std::min(series.x.size(), series.y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(series.x[i]) || !std::isfinite(series.y[i])) {
                continue;
            }
            const double px = xr.map(series.x[i], x0, x1);
            const double py = yrange.map(series.y[i], y0, y1);
            points += num(px) + "," + num(py) + " ";
            svg << "<circle cx=\"" << num(px) << "\" cy=\"" << num(py) << "\" r=\"3\" fill=\"" << colour
                << "\"/>\n";
        }
        if (series.line && n > 1) {
            svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"" << points
                << "\"/>\n";
        }
        const double ly = y1 + 14.0 + 16.0 * static_cast<double>(s);
        svg << "<rect x=\"" << num(x0 + 10) << "\" y=\"" << num(ly - 9) << "\" width=\"10\" height=\"10\" fill=\""
            << colour << "\"/>\n";
        svg << "<text x=\"" << num(x0 + 26) << "\" y=\"" << num(ly) << "\">" << escape_xml(series.label)
            << (series.axis == Axis::right ? " (right axis)" : "") << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_grid(const std::string& title, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<std::size_t>>& counts, const std::string& row_title,
                        const std::string& col_title) {
    const double cell = 48.0;
    const double left = 110.0;
    const double top = 80.0;
    const double width = left + cell * static_cast<double>(col_labels.size()) + 30.0;
    const double height = top + cell * static_cast<double>(row_labels.size()) + 40.0;
    std::size_t max_count = 1;
    for (const auto& row : counts) {
        for (auto c : row) max_count = std::max(max_count, c);
    }

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape_xml(title) << "</text>\n";
    svg << "<text x=\"" << num(left + cell * static_cast<double>(col_labels.size()) / 2) << "\" y=\"46\" text-anchor=\"middle\">"
        << escape_xml(col_title) << "</text>\n";
    svg << "<text x=\"14\" y=\"" << num(top - 8) << "\">" << escape_xml(row_title) << "</text>\n";
    for (std::size_t j = 0; j < col_labels.size(); ++j) {
        svg << "<text x=\"" << num(left + cell * (static_cast<double>(j) + 0.5)) << "\" y=\"" << num(top - 8)
            << "\" text-anchor=\"middle\">" << escape_xml(col_labels[j]) << "</text>\n";
    }
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        const double y = top + cell * static_cast<double>(i);
        svg << "<text x=\"" << num(left - 8) << "\" y=\"" << num(y + cell / 2 + 4) << "\" text-anchor=\"end\">"
            << escape_xml(row_labels[i]) << "</text>\n";
        for (std::size_t j = 0; j < col_labels.size(); ++j) {
            const std::size_t c = i < counts.size() && j < counts[i].size() ? counts[i][j] : 0;
            const double shade = static_cast<double>(c) / static_cast<double>(max_count);
            const int level = static_cast<int>(std::lround(255.0 - 200.0 * shade));
            const double x = left + cell * static_cast<double>(j);
            svg << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(cell) << "\" height=\""
                << num(cell) << "\" fill=\"rgb(" << level << ',' << level << ",255)\" stroke=\"#999\"/>\n";
            svg << "<text x=\"" << num(x + cell / 2) << "\" y=\"" << num(y + cell / 2 + 4)
                << "\" text-anchor=\"middle\">" << c << "</text>\n";
        }
    }
    svg << "</svg>\n";
    return svg.str();
}

void write(const std::filesystem::path& path, const std::string& svg) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << svg)) {
        throw DataError("cannot write plot '" + path.string() + "'");
    }
}

} // namespace credrisk::plot
