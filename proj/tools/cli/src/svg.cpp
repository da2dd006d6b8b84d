#include "jsaforge_cli/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "jsaforge/keyvalue.hpp"

namespace jsaforge::cli {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 520.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 110.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string comment(const std::string& s) {
    std::string out = s;
    // "--" is not allowed inside XML comments.
    for (std::size_t p = out.find("--"); p != std::string::npos; p = out.find("--")) out.replace(p, 2, "- ");
    return out;
}

// Viridis, 5 stops.
std::string color(double t) {
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98}, {253, 231, 37}}};
    t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * 4.0;
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(t), 3);
    const double f = t - static_cast<double>(k);
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                  static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                  static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
    return buf;
}

void header(std::ostringstream& out, const PlotLabels& labels) {
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    if (!labels.provenance.empty()) out << "<!-- " << comment(labels.provenance) << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << fmt(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << escape(labels.title) << "</text>\n";
}

void axes(std::ostringstream& out, const PlotLabels& labels, double x0, double x1, double y0, double y1) {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double f = k / 4.0;
        const double xv = x0 + f * (x1 - x0);
        const double yv = y0 + f * (y1 - y0);
        const double px = kLeft + f * pw;
        const double py = kTop + ph - f * ph;
        out << "<text x=\"" << fmt(px) << "\" y=\"" << fmt(kTop + ph + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick(xv) << "</text>\n";
        out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick(yv) << "</text>\n";
    }
    out << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(labels.x_label) << "</text>\n";
    out << "<text x=\"18\" y=\"" << fmt(kTop + ph / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\" transform=\"rotate(-90 18 " << fmt(kTop + ph / 2) << ")\">" << escape(labels.y_label)
        << "</text>\n";
}

// Block boundaries splitting n cells into at most kMaxSvgCells bins.
std::vector<std::size_t> bins(std::size_t n) {
    const std::size_t count = std::min(n, kMaxSvgCells);
    std::vector<std::size_t> edges(count + 1);
    for (std::size_t k = 0; k <= count; ++k) edges[k] = n * k / count;
    return edges;
}

double edge_coordinate(const std::vector<double>& axis, std::size_t index) {
    // Cell edges halfway between samples, extended by half a step at the ends.
    if (axis.size() == 1) return axis[0] + (index == 0 ? -0.5 : 0.5);
    if (index == 0) return axis[0] - 0.5 * (axis[1] - axis[0]);
    if (index == axis.size()) return axis.back() + 0.5 * (axis.back() - axis[axis.size() - 2]);
    return 0.5 * (axis[index - 1] + axis[index]);
}

}  // namespace

std::string render_heatmap(const HeatmapData& data, const PlotLabels& labels) {
    std::ostringstream out;
    header(out, labels);
    const double x0 = edge_coordinate(data.x, 0);
    const double x1 = edge_coordinate(data.x, data.x.size());
    const double y0 = edge_coordinate(data.y, 0);
    const double y1 = edge_coordinate(data.y, data.y.size());
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return kTop + ph - (y - y0) / (y1 - y0) * ph; };

    const auto cx = bins(data.x.size());
    const auto cy = bins(data.y.size());
    const std::size_t nx = data.x.size();
    double vmax = 0.0;
    for (std::size_t k = 0; k < data.values.size(); ++k) {
        if (data.present.empty() || data.present[k]) vmax = std::max(vmax, data.values[k]);
    }
    if (!(vmax > 0.0)) vmax = 1.0;
    bool any_masked = false;
    out << "<g shape-rendering=\"crispEdges\">\n";
    for (std::size_t by = 0; by + 1 < cy.size(); ++by) {
        for (std::size_t bx = 0; bx + 1 < cx.size(); ++bx) {
            double sum = 0.0;
            std::size_t n = 0, masked = 0;
            for (std::size_t r = cy[by]; r < cy[by + 1]; ++r) {
                for (std::size_t c = cx[bx]; c < cx[bx + 1]; ++c) {
                    const std::size_t k = r * nx + c;
                    if (!data.present.empty() && !data.present[k]) {
                        ++masked;
                        continue;
                    }
                    sum += data.values[k];
                    ++n;
                }
            }
            const double ex0 = px(edge_coordinate(data.x, cx[bx]));
            const double ex1 = px(edge_coordinate(data.x, cx[bx + 1]));
            const double ey0 = py(edge_coordinate(data.y, cy[by + 1]));
            const double ey1 = py(edge_coordinate(data.y, cy[by]));
            std::string fill;
            if (n == 0 && masked > 0) {
                fill = "#bbbbbb";
                any_masked = true;
            } else {
                fill = color(sum / static_cast<double>(std::max<std::size_t>(n, 1)) / vmax);
            }
            out << "<rect x=\"" << fmt(ex0) << "\" y=\"" << fmt(ey0) << "\" width=\"" << fmt(ex1 - ex0 + 0.01)
                << "\" height=\"" << fmt(ey1 - ey0 + 0.01) << "\" fill=\"" << fill << "\"/>\n";
        }
    }
    out << "</g>\n";
    axes(out, labels, x0, x1, y0, y1);

    // Color bar.
    const double bx = kWidth - kRight + 20;
    for (int k = 0; k < 50; ++k) {
        const double f = k / 49.0;
        out << "<rect x=\"" << fmt(bx) << "\" y=\"" << fmt(kTop + ph - (k + 1) * ph / 50) << "\" width=\"16\" height=\""
            << fmt(ph / 50 + 0.5) << "\" fill=\"" << color(f) << "\"/>\n";
    }
    out << "<text x=\"" << fmt(bx + 20) << "\" y=\"" << fmt(kTop + 8) << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << tick(vmax) << "</text>\n"
        << "<text x=\"" << fmt(bx + 20) << "\" y=\"" << fmt(kTop + ph) << "\" font-family=\"sans-serif\" font-size=\"11\">0</text>\n";
    if (any_masked) {
        out << "<g id=\"legend-mask\"><rect x=\"" << fmt(bx) << "\" y=\"" << fmt(kTop + ph + 20)
            << "\" width=\"16\" height=\"10\" fill=\"#bbbbbb\"/><text x=\"" << fmt(bx + 20) << "\" y=\"" << fmt(kTop + ph + 29)
            << "\" font-family=\"sans-serif\" font-size=\"11\">masked (no data)</text></g>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string render_lines(const std::vector<Series>& series, const PlotLabels& labels) {
    static constexpr std::array<const char*, 6> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};
    std::ostringstream out;
    header(out, labels);
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            x0 = std::min(x0, s.x[k]);
            x1 = std::max(x1, s.x[k]);
            y0 = std::min(y0, s.y[k]);
            y1 = std::max(y1, s.y[k]);
        }
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (x1 == x0) x0 -= 0.5, x1 += 0.5;
    if (y1 == y0) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = palette[k % palette.size()];
        out << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < s.x.size(); ++j) {
            out << (j ? " " : "") << fmt(kLeft + (s.x[j] - x0) / (x1 - x0) * pw) << ','
                << fmt(kTop + ph - (s.y[j] - y0) / (y1 - y0) * ph);
        }
        out << "\"/>\n";
        if (s.x.size() == 1) {
            out << "<circle cx=\"" << fmt(kLeft + (s.x[0] - x0) / (x1 - x0) * pw) << "\" cy=\""
                << fmt(kTop + ph - (s.y[0] - y0) / (y1 - y0) * ph) << "\" r=\"3\" fill=\"" << col << "\"/>\n";
        }
        out << "<text x=\"" << fmt(kWidth - kRight + 8) << "\" y=\"" << fmt(kTop + 14 + 16.0 * static_cast<double>(k))
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << col << "\">" << escape(s.name) << "</text>\n";
    }
    axes(out, labels, x0, x1, y0, y1);
    out << "</svg>\n";
    return out.str();
}

}  // namespace jsaforge::cli
