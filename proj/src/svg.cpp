#include "svg.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace icbox {

namespace {

constexpr double kWidth = 640.0, kHeight = 440.0;
constexpr double kLeft = 72.0, kRight = 18.0, kTop = 40.0, kBottom = 52.0;

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

} // namespace

void SvgChart::fit_axes() {
    bool any = false;
    double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            if (std::isnan(x) || std::isnan(y)) continue;
            if (!any) {
                x0 = x1 = x;
                y0 = y1 = y;
                any = true;
            } else {
                x0 = std::min(x0, x);
                x1 = std::max(x1, x);
                y0 = std::min(y0, y);
                y1 = std::max(y1, y);
            }
        }
    }
    for (auto& [y, label] : hrules) {
        (void)label;
        y0 = any ? std::min(y0, y) : y;
        y1 = any ? std::max(y1, y) : y;
        any = true;
    }
    if (!any) return;
    double dx = (x1 - x0 > 0) ? 0.04 * (x1 - x0) : 0.5;
    double dy = (y1 - y0 > 0) ? 0.06 * (y1 - y0) : 0.5;
    xmin = x0 - dx;
    xmax = x1 + dx;
    ymin = y0 - dy;
    ymax = y1 + dy;
}

std::string SvgChart::render() const {
    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto X = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto Y = [&](double y) { return kTop + (ymax - y) / (ymax - ymin) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << escape(title) << "</text>\n";

    // axes + ticks
    out << "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n";
    out << "<path d=\"M" << kLeft << " " << kTop << " V" << kTop + ph << " H" << kLeft + pw
        << "\"/>\n";
    out << "</g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    for (int i = 0; i <= 5; ++i) {
        double fx = xmin + (xmax - xmin) * i / 5.0;
        double px = X(fx);
        out << "<line x1=\"" << px << "\" y1=\"" << kTop + ph << "\" x2=\"" << px << "\" y2=\""
            << kTop + ph + 5 << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << kTop + ph + 18
            << "\" text-anchor=\"middle\">" << num(fx) << "</text>\n";
        double fy = ymin + (ymax - ymin) * i / 5.0;
        double py = Y(fy);
        out << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << py << "\" x2=\"" << kLeft
            << "\" y2=\"" << py << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\">" << num(fy) << "</text>\n";
    }
    out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel) << "</text>\n";
    out << "<text x=\"16\" y=\"" << kTop + ph / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << kTop + ph / 2 << ")\">" << escape(ylabel) << "</text>\n";
    out << "</g>\n";

    for (const auto& [ry, label] : hrules) {
        if (ry < ymin || ry > ymax) continue;
        out << "<line x1=\"" << kLeft << "\" y1=\"" << Y(ry) << "\" x2=\"" << kLeft + pw
            << "\" y2=\"" << Y(ry)
            << "\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"2 3\"/>\n";
        out << "<text x=\"" << kLeft + pw - 4 << "\" y=\"" << Y(ry) - 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\" "
            << "fill=\"#777\">" << escape(label) << "</text>\n";
    }
    for (const auto& [rx, label] : vrules) {
        if (rx < xmin || rx > xmax) continue;
        out << "<line x1=\"" << X(rx) << "\" y1=\"" << kTop << "\" x2=\"" << X(rx)
            << "\" y2=\"" << kTop + ph
            << "\" stroke=\"#999\" stroke-width=\"1\" stroke-dasharray=\"2 3\"/>\n";
        out << "<text x=\"" << X(rx) + 4 << "\" y=\"" << kTop + 12
            << "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#777\">"
            << escape(label) << "</text>\n";
    }

    for (const auto& s : series) {
        std::string dash = s.dashed ? " stroke-dasharray=\"6 4\"" : "";
        bool open = false;
        std::ostringstream d;
        for (auto [x, y] : s.points) {
            if (std::isnan(x) || std::isnan(y)) {
                open = false;
                continue;
            }
            d << (open ? " L" : " M") << X(x) << " " << Y(y);
            open = true;
        }
        std::string path = d.str();
        if (!path.empty())
            out << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.6\"" << dash << "/>\n";
        if (s.markers) {
            for (auto [x, y] : s.points) {
                if (std::isnan(x) || std::isnan(y)) continue;
                out << "<circle cx=\"" << X(x) << "\" cy=\"" << Y(y)
                    << "\" r=\"2.6\" fill=\"" << s.color << "\"/>\n";
            }
        }
    }

    double ly = kTop + 14;
    for (const auto& s : series) {
        if (s.name.empty()) continue;
        out << "<line x1=\"" << kLeft + 10 << "\" y1=\"" << ly - 4 << "\" x2=\"" << kLeft + 34
            << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"1.6\""
            << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n";
        out << "<text x=\"" << kLeft + 40 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">"
            << escape(s.name) << "</text>\n";
        ly += 15;
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace icbox
