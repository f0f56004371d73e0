#pragma once

#include <string>
#include <utility>
#include <vector>

namespace icbox {

// Minimal hand-rolled SVG line chart: linear axes, polyline series (NaN
// breaks a line), optional point markers, dashed styles, and labelled
// horizontal/vertical rules. No external rendering dependencies.
struct SvgSeries {
    std::string name;
    std::string color = "#000000";
    bool dashed = false;
    bool markers = false;
    std::vector<std::pair<double, double>> points;
};

struct SvgChart {
    std::string title, xlabel, ylabel;
    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    std::vector<SvgSeries> series;
    std::vector<std::pair<double, std::string>> hrules; // y value, label
    std::vector<std::pair<double, std::string>> vrules; // x value, label

    // Expand the axes to cover every finite point with a small margin.
    void fit_axes();
    std::string render() const;
};

} // namespace icbox
