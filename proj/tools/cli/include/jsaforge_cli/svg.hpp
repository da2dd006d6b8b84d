#pragma once

#include <string>
#include <vector>

namespace jsaforge::cli {

// Cells above this count per axis are block-averaged before drawing.
inline constexpr std::size_t kMaxSvgCells = 500;

struct HeatmapData {
    std::vector<double> x;       // columns
    std::vector<double> y;       // rows
    std::vector<double> values;  // row-major, y.size() x x.size()
    std::vector<unsigned char> present;  // optional, empty means all present
};

struct PlotLabels {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string provenance;  // embedded as an XML comment
};

std::string render_heatmap(const HeatmapData& data, const PlotLabels& labels);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

std::string render_lines(const std::vector<Series>& series, const PlotLabels& labels);

}  // namespace jsaforge::cli
