#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace credrisk::plot {

enum class Axis { left, right };

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    /// Connect points with a polyline; otherwise draw markers only.
    bool line = true;
    Axis axis = Axis::left;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    /// Label of the secondary axis; used only when a series targets it.
    std::string y2_label;
    std::vector<Series> series;
};

/// Self-contained SVG document. Output depends only on the chart contents.
std::string render(const Chart& chart);

/// Count grid with shaded cells, rows top to bottom.
std::string render_grid(const std::string& title, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels,
                        const std::vector<std::vector<std::size_t>>& counts, const std::string& row_title,
                        const std::string& col_title);

void write(const std::filesystem::path& path, const std::string& svg);

} // namespace credrisk::plot
