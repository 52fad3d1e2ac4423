#include "tcva/plot.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tcva {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 48.0;

double x_px(double x, double lo, double hi) {
    return kMargin + (x - lo) / (hi - lo) * (kWidth - 2 * kMargin);
}

double y_px(double y, double lo, double hi) {
    return kHeight - kMargin - (y - lo) / (hi - lo) * (kHeight - 2 * kMargin);
}

std::string header(const std::string& title, const std::string& x_label,
                   const std::string& y_label, double x_lo, double x_hi, double y_lo,
                   double y_hi) {
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << title << "</text>\n"
        << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 8
        << "\" text-anchor=\"middle\" font-size=\"11\">" << x_label << "</text>\n"
        << "<text x=\"14\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 14 "
        << kHeight / 2 << ")\">" << y_label << "</text>\n"
        << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\""
        << kWidth - 2 * kMargin << "\" height=\"" << kHeight - 2 * kMargin
        << "\" fill=\"none\" stroke=\"#444\"/>\n";
    // axis tick labels at the corners
    svg << "<text x=\"" << x_px(x_lo, x_lo, x_hi) << "\" y=\"" << kHeight - kMargin + 16
        << "\" font-size=\"10\" text-anchor=\"middle\">" << x_lo << "</text>\n"
        << "<text x=\"" << x_px(x_hi, x_lo, x_hi) << "\" y=\"" << kHeight - kMargin + 16
        << "\" font-size=\"10\" text-anchor=\"middle\">" << x_hi << "</text>\n"
        << "<text x=\"" << kMargin - 6 << "\" y=\"" << y_px(y_lo, y_lo, y_hi) + 4
        << "\" font-size=\"10\" text-anchor=\"end\">" << y_lo << "</text>\n"
        << "<text x=\"" << kMargin - 6 << "\" y=\"" << y_px(y_hi, y_lo, y_hi) + 4
        << "\" font-size=\"10\" text-anchor=\"end\">" << y_hi << "</text>\n";
    return svg.str();
}

} // namespace

std::string render_scatter_svg(const std::vector<ScatterPoint>& points,
                               const std::string& title, const std::string& x_label,
                               const std::string& y_label) {
    std::ostringstream svg;
    svg << header(title, x_label, y_label, 0.0, 1.0, 0.0, 1.0);
    svg << "<line x1=\"" << x_px(0, 0, 1) << "\" y1=\"" << y_px(0, 0, 1) << "\" x2=\""
        << x_px(1, 0, 1) << "\" y2=\"" << y_px(1, 0, 1)
        << "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    for (const auto& point : points) {
        svg << "<circle cx=\"" << x_px(std::clamp(point.x, 0.0, 1.0), 0, 1) << "\" cy=\""
            << y_px(std::clamp(point.y, 0.0, 1.0), 0, 1)
            << "\" r=\"3\" fill=\"#1f77b4\" fill-opacity=\"0.6\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_curve_svg(const std::vector<ScatterPoint>& points, const std::string& title,
                             const std::string& x_label, const std::string& y_label) {
    double x_lo = 0.0, x_hi = 1.0, y_lo = 0.0, y_hi = 1.0;
    if (!points.empty()) {
        x_lo = x_hi = points.front().x;
        y_lo = y_hi = points.front().y;
        for (const auto& point : points) {
            x_lo = std::min(x_lo, point.x);
            x_hi = std::max(x_hi, point.x);
            y_lo = std::min(y_lo, point.y);
            y_hi = std::max(y_hi, point.y);
        }
        if (x_hi == x_lo) x_hi = x_lo + 1.0;
        if (y_hi == y_lo) y_hi = y_lo + 1.0;
    }
    std::ostringstream svg;
    svg << header(title, x_label, y_label, x_lo, x_hi, y_lo, y_hi);
    svg << "<polyline fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" points=\"";
    for (const auto& point : points)
        svg << x_px(point.x, x_lo, x_hi) << ',' << y_px(point.y, y_lo, y_hi) << ' ';
    svg << "\"/>\n";
    for (const auto& point : points)
        svg << "<circle cx=\"" << x_px(point.x, x_lo, x_hi) << "\" cy=\""
            << y_px(point.y, y_lo, y_hi) << "\" r=\"3\" fill=\"#d62728\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

} // namespace tcva
