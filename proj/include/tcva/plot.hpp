#pragma once

#include <string>
#include <vector>

namespace tcva {

// Minimal SVG chart emission for score tables; no rendering dependencies.

struct ScatterPoint {
    double x = 0.0;
    double y = 0.0;
};

// Scatter of method scores against human scores over the unit square, with
// the identity diagonal for reference.
std::string render_scatter_svg(const std::vector<ScatterPoint>& points,
                               const std::string& title, const std::string& x_label,
                               const std::string& y_label);

// Polyline of a statistic against temperature.
std::string render_curve_svg(const std::vector<ScatterPoint>& points, const std::string& title,
                             const std::string& x_label, const std::string& y_label);

} // namespace tcva
