#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "interpol/errors.hpp"
#include "interpol/experiments.hpp"

namespace interpol::plot {

enum class Axis { Window, StayProb, Exponent };
enum class Metric { Mse, Bias, Variance };

inline Axis axis_from_string(const std::string& name) {
    if (name == "window") return Axis::Window;
    if (name == "stay_prob") return Axis::StayProb;
    if (name == "exponent") return Axis::Exponent;
    throw ConfigError("unknown plot axis '" + name + "'");
}

inline Metric metric_from_string(const std::string& name) {
    if (name == "mse") return Metric::Mse;
    if (name == "bias") return Metric::Bias;
    if (name == "variance") return Metric::Variance;
    throw ConfigError("unknown plot metric '" + name + "'");
}

inline std::string to_string(Axis axis) {
    switch (axis) {
        case Axis::Window: return "window";
        case Axis::StayProb: return "stay_prob";
        case Axis::Exponent: return "exponent";
    }
    return "?";
}

inline std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::Mse: return "mse";
        case Metric::Bias: return "bias";
        case Metric::Variance: return "variance";
    }
    return "?";
}

namespace detail {

inline double axis_value(const CellResult& cell, Axis axis) {
    switch (axis) {
        case Axis::Window: return static_cast<double>(cell.window);
        case Axis::StayProb: return cell.stay_prob;
        case Axis::Exponent: return cell.exponent;
    }
    return 0.0;
}

inline double metric_value(const CellResult& cell, Metric metric) {
    switch (metric) {
        case Metric::Mse: return cell.mse;
        case Metric::Bias: return cell.bias;
        case Metric::Variance: return cell.variance;
    }
    return 0.0;
}

// Everything held fixed within one series: the grid coordinates that are not
// on the x axis.
inline std::string series_key(const CellResult& cell, Axis axis) {
    char buf[96];
    switch (axis) {
        case Axis::Window:
            std::snprintf(buf, sizeof(buf), "exp=%g q=%g", cell.exponent, cell.stay_prob);
            break;
        case Axis::StayProb:
            std::snprintf(buf, sizeof(buf), "exp=%g T=%zu", cell.exponent, cell.window);
            break;
        case Axis::Exponent:
            std::snprintf(buf, sizeof(buf), "q=%g T=%zu", cell.stay_prob, cell.window);
            break;
    }
    return buf;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

inline std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// matplotlib's tab10 cycle
inline const char* series_color(std::size_t index) {
    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return kPalette[index % 10];
}

}  // namespace detail

// Renders one SVG line chart: x = the chosen grid axis, one polyline per
// (metric, remaining-grid-combination) pair. Output is deterministic for a
// given cell set regardless of input order.
inline std::string render_svg(std::span<const CellResult> cells, Axis x_axis,
                              std::span<const Metric> metrics) {
    if (cells.empty()) throw DataError("no result rows to plot");
    if (metrics.empty()) throw DataError("no metrics selected");

    struct Point {
        double x;
        double y;
    };
    // key: (series label, metric label) -> points
    std::map<std::pair<std::string, std::string>, std::vector<Point>> series;
    for (const CellResult& cell : cells) {
        for (Metric metric : metrics) {
            auto key = std::make_pair(detail::series_key(cell, x_axis), to_string(metric));
            series[key].push_back(
                {detail::axis_value(cell, x_axis), detail::metric_value(cell, metric)});
        }
    }
    double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
    for (auto& [key, points] : series) {
        std::sort(points.begin(), points.end(),
                  [](const Point& a, const Point& b) { return a.x < b.x; });
        for (const Point& p : points) {
            x_min = std::min(x_min, p.x);
            x_max = std::max(x_max, p.x);
            y_min = std::min(y_min, p.y);
            y_max = std::max(y_max, p.y);
        }
    }
    if (x_max <= x_min) {
        x_min -= 0.5;
        x_max += 0.5;
    }
    if (y_max <= y_min) {
        y_min -= 0.5;
        y_max += 0.5;
    }

    const double width = 760.0, height = 460.0;
    const double ml = 70.0, mr = 210.0, mt = 30.0, mb = 50.0;
    const double pw = width - ml - mr, ph = height - mt - mb;
    const auto sx = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * pw; };
    const auto sy = [&](double y) { return mt + ph - (y - y_min) / (y_max - y_min) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt(width) +
           "\" height=\"" + detail::fmt(height) + "\" viewBox=\"0 0 " + detail::fmt(width) +
           " " + detail::fmt(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<rect x=\"" + detail::fmt(ml) + "\" y=\"" + detail::fmt(mt) + "\" width=\"" +
           detail::fmt(pw) + "\" height=\"" + detail::fmt(ph) +
           "\" fill=\"none\" stroke=\"#888888\"/>\n";

    const int kTicks = 5;
    for (int t = 0; t <= kTicks; ++t) {
        const double fx = x_min + (x_max - x_min) * t / kTicks;
        const double fy = y_min + (y_max - y_min) * t / kTicks;
        svg += "<line x1=\"" + detail::fmt(sx(fx)) + "\" y1=\"" + detail::fmt(mt + ph) +
               "\" x2=\"" + detail::fmt(sx(fx)) + "\" y2=\"" + detail::fmt(mt + ph + 5) +
               "\" stroke=\"#444444\"/>\n";
        svg += "<text x=\"" + detail::fmt(sx(fx)) + "\" y=\"" + detail::fmt(mt + ph + 20) +
               "\" font-size=\"11\" text-anchor=\"middle\">" + detail::fmt_tick(fx) +
               "</text>\n";
        svg += "<line x1=\"" + detail::fmt(ml - 5) + "\" y1=\"" + detail::fmt(sy(fy)) +
               "\" x2=\"" + detail::fmt(ml) + "\" y2=\"" + detail::fmt(sy(fy)) +
               "\" stroke=\"#444444\"/>\n";
        svg += "<text x=\"" + detail::fmt(ml - 9) + "\" y=\"" + detail::fmt(sy(fy) + 4) +
               "\" font-size=\"11\" text-anchor=\"end\">" + detail::fmt_tick(fy) + "</text>\n";
    }
    svg += "<text x=\"" + detail::fmt(ml + pw / 2) + "\" y=\"" + detail::fmt(height - 12) +
           "\" font-size=\"13\" text-anchor=\"middle\">" + to_string(x_axis) + "</text>\n";

    std::size_t index = 0;
    for (const auto& [key, points] : series) {
        const char* color = detail::series_color(index);
        if (points.size() > 1) {
            std::string path = "<polyline fill=\"none\" stroke=\"";
            path += color;
            path += "\" stroke-width=\"1.5\" points=\"";
            for (const Point& p : points) {
                path += detail::fmt(sx(p.x)) + "," + detail::fmt(sy(p.y)) + " ";
            }
            path += "\"/>\n";
            svg += path;
        }
        for (const Point& p : points) {
            svg += "<circle cx=\"" + detail::fmt(sx(p.x)) + "\" cy=\"" + detail::fmt(sy(p.y)) +
                   "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        }
        const double ly = mt + 14.0 + 16.0 * static_cast<double>(index);
        svg += "<line x1=\"" + detail::fmt(ml + pw + 10) + "\" y1=\"" + detail::fmt(ly - 4) +
               "\" x2=\"" + detail::fmt(ml + pw + 30) + "\" y2=\"" + detail::fmt(ly - 4) +
               "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + detail::fmt(ml + pw + 35) + "\" y=\"" + detail::fmt(ly) +
               "\" font-size=\"11\">" + key.second + " " + key.first + "</text>\n";
        ++index;
    }
    svg += "</svg>\n";
    return svg;
}

inline void emit_plot(std::span<const CellResult> cells, Axis x_axis,
                      std::span<const Metric> metrics, const std::string& path) {
    const std::string svg = render_svg(cells, x_axis, metrics);
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << svg;
    if (!out) throw DataError("failed while writing '" + path + "'");
}

}  // namespace interpol::plot
