#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace rbfmol {

/// Static log-log plot of one error series with optional guides.
struct LogLogPlot {
    std::string title;
    std::string x_label = "h";
    std::string y_label = "error";
    std::vector<double> x, y;
    std::optional<double> slope_guide;  // drawn through the finest point, or the coarsest with slope_from_coarsest
    bool slope_from_coarsest = false;
    std::optional<double> plateau_guide;  // horizontal line at a predicted level
    std::string slope_label = "predicted slope";
    std::string plateau_label = "predicted plateau";

    std::string svg(int width = 640, int height = 440) const;
};

namespace detail {

inline std::string svg_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

}  // namespace detail

inline std::string LogLogPlot::svg(int width, int height) const {
    const double ml = 70, mr = 20, mt = 40, mb = 50;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (x[i] > 0 && y[i] > 0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
            lx.push_back(std::log10(x[i]));
            ly.push_back(std::log10(y[i]));
        }
    }
    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    if (!lx.empty()) {
        x0 = *std::min_element(lx.begin(), lx.end());
        x1 = *std::max_element(lx.begin(), lx.end());
        y0 = *std::min_element(ly.begin(), ly.end());
        y1 = *std::max_element(ly.begin(), ly.end());
    }
    if (plateau_guide && *plateau_guide > 0) {
        y0 = std::min(y0, std::log10(*plateau_guide));
        y1 = std::max(y1, std::log10(*plateau_guide));
    }
    if (x1 - x0 < 1e-9) { x0 -= 0.5; x1 += 0.5; }
    if (y1 - y0 < 1e-9) { y0 -= 0.5; y1 += 0.5; }
    const double padx = 0.05 * (x1 - x0), pady = 0.08 * (y1 - y0);
    x0 -= padx; x1 += padx; y0 -= pady; y1 += pady;
    const double pw = width - ml - mr, ph = height - mt - mb;
    auto X = [&](double lv) { return ml + (lv - x0) / (x1 - x0) * pw; };
    auto Y = [&](double lv) { return mt + (y1 - lv) / (y1 - y0) * ph; };

    std::ostringstream s;
    s.precision(6);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\" viewBox=\"0 0 " << width
      << ' ' << height << "\">\n";
    s << "<defs><clipPath id=\"plot-area\"><rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\"/></clipPath></defs>\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << detail::svg_escape(title) << "</text>\n";
    s << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int d = static_cast<int>(std::ceil(x0)); d <= static_cast<int>(std::floor(x1)); ++d)
        s << "<line class=\"grid\" x1=\"" << X(d) << "\" y1=\"" << mt << "\" x2=\"" << X(d) << "\" y2=\"" << mt + ph
          << "\" stroke=\"#ddd\"/><text x=\"" << X(d) << "\" y=\"" << mt + ph + 18
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">1e" << d << "</text>\n";
    const int ystep = std::max(1, static_cast<int>(std::ceil((y1 - y0) / 10.0)));
    for (int d = static_cast<int>(std::ceil(y0)); d <= static_cast<int>(std::floor(y1)); d += ystep)
        s << "<line class=\"grid\" x1=\"" << ml << "\" y1=\"" << Y(d) << "\" x2=\"" << ml + pw << "\" y2=\"" << Y(d)
          << "\" stroke=\"#ddd\"/><text x=\"" << ml - 6 << "\" y=\"" << Y(d) + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << d << "</text>\n";
    s << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << detail::svg_escape(x_label) << "</text>\n";
    s << "<text x=\"16\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">" << detail::svg_escape(y_label) << "</text>\n";

    if (slope_guide && !lx.empty()) {
        const std::size_t k = slope_from_coarsest ? std::max_element(lx.begin(), lx.end()) - lx.begin()
                                                  : std::min_element(lx.begin(), lx.end()) - lx.begin();
        const double ya = ly[k] + *slope_guide * (x0 - lx[k]);
        const double yb = ly[k] + *slope_guide * (x1 - lx[k]);
        s << "<line class=\"slope-guide\" x1=\"" << X(x0) << "\" y1=\"" << Y(ya) << "\" x2=\"" << X(x1) << "\" y2=\"" << Y(yb)
          << "\" stroke=\"#c33\" stroke-dasharray=\"6,4\" clip-path=\"url(#plot-area)\"/>\n";
        s << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 16 << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#c33\">"
          << detail::svg_escape(slope_label) << ' ' << *slope_guide << "</text>\n";
    }
    if (plateau_guide && *plateau_guide > 0) {
        const double lv = std::log10(*plateau_guide);
        s << "<line class=\"plateau-guide\" x1=\"" << ml << "\" y1=\"" << Y(lv) << "\" x2=\"" << ml + pw << "\" y2=\"" << Y(lv)
          << "\" stroke=\"#36c\" stroke-dasharray=\"2,3\"/>\n";
        s << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 32 << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#36c\">"
          << detail::svg_escape(plateau_label) << ' ' << *plateau_guide << "</text>\n";
    }
    if (!lx.empty()) {
        s << "<polyline class=\"data\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < lx.size(); ++i) s << X(lx[i]) << ',' << Y(ly[i]) << ' ';
        s << "\"/>\n";
        for (std::size_t i = 0; i < lx.size(); ++i) s << "<circle cx=\"" << X(lx[i]) << "\" cy=\"" << Y(ly[i]) << "\" r=\"3\"/>\n";
    }
    s << "</svg>\n";
    return s.str();
}

}  // namespace rbfmol
