#include "lograt/format.hpp"
#include "lograt/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace lograt {

namespace {

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += ch;
        }
    }
    return out;
}

std::string rgb(const std::array<int, 3>& c) {
    return "rgb(" + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + ")";
}

struct Frame {
    double left, top, width, height;
    double x0, x1, y0, y1;
    double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
    double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

void axes(std::ostringstream& svg, const Frame& f, const std::string& title) {
    svg << "<rect x=\"" << fixed(f.left) << "\" y=\"" << fixed(f.top) << "\" width=\"" << fixed(f.width)
        << "\" height=\"" << fixed(f.height) << "\" fill=\"none\" stroke=\"#444\"/>\n";
    svg << "<text x=\"" << fixed(f.left) << "\" y=\"" << fixed(f.top - 6) << "\" font-size=\"12\">" << escape(title)
        << "</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double xv = f.x0 + (f.x1 - f.x0) * t / 4.0;
        const double yv = f.y0 + (f.y1 - f.y0) * t / 4.0;
        svg << "<text x=\"" << fixed(f.px(xv)) << "\" y=\"" << fixed(f.top + f.height + 14)
            << "\" font-size=\"10\" text-anchor=\"middle\">" << fixed(xv, 2) << "</text>\n";
        svg << "<text x=\"" << fixed(f.left - 4) << "\" y=\"" << fixed(f.py(yv) + 3)
            << "\" font-size=\"10\" text-anchor=\"end\">" << fixed(yv, 3) << "</text>\n";
    }
}

void polyline(std::ostringstream& svg, const Frame& f, const std::vector<double>& x, const std::vector<double>& y,
              const std::string& stroke, const std::string& extra = {}) {
    svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.2\"" << extra << " points=\"";
    for (std::size_t i = 0; i < x.size(); ++i) svg << (i ? " " : "") << fixed(f.px(x[i])) << ',' << fixed(f.py(y[i]));
    svg << "\"/>\n";
}

}  // namespace

std::array<int, 3> heat_color(double t) {
    t = std::clamp(t, 0.0, 1.0);
    constexpr std::array<int, 3> white{255, 255, 255};
    constexpr std::array<int, 3> dark_blue{8, 48, 107};
    std::array<int, 3> c{};
    for (int k = 0; k < 3; ++k) c[k] = static_cast<int>(std::lround(white[k] + t * (dark_blue[k] - white[k])));
    return c;
}

std::string heatmap_svg(const CValueMatrix& matrix) {
    const CValueMatrix scaled = matrix.scaled ? matrix : scale_matrix(matrix);
    const std::size_t m = scaled.size();
    constexpr double cell = 24.0, margin = 60.0;
    const double side = margin + cell * static_cast<double>(m) + 20.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(side + 70) << "\" height=\"" << fixed(side)
        << "\" font-family=\"sans-serif\">\n";
    svg << "<!-- lograt heatmap material=" << escape(scaled.material) << " (scaled c-values; blank = absent)\n";
    svg << "element";
    for (const auto& e : scaled.elements) svg << ',' << e;
    svg << '\n';
    for (std::size_t i = 0; i < m; ++i) {
        svg << scaled.elements[i];
        for (std::size_t j = 0; j < m; ++j) svg << ',' << (scaled.present(i, j) ? format_number(scaled(i, j)) : "");
        svg << '\n';
    }
    svg << "-->\n";
    svg << "<text x=\"4\" y=\"14\" font-size=\"12\">" << escape(scaled.material) << "</text>\n";
    for (std::size_t i = 0; i < m; ++i) {
        const double pos = margin + cell * static_cast<double>(i);
        svg << "<text x=\"" << fixed(margin - 4) << "\" y=\"" << fixed(pos + cell * 0.65)
            << "\" font-size=\"10\" text-anchor=\"end\">" << escape(scaled.elements[i]) << "</text>\n";
        svg << "<text x=\"" << fixed(pos + cell * 0.5) << "\" y=\"" << fixed(margin - 6)
            << "\" font-size=\"10\" text-anchor=\"middle\">" << escape(scaled.elements[i]) << "</text>\n";
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double x = margin + cell * static_cast<double>(j), y = margin + cell * static_cast<double>(i);
            svg << "<rect x=\"" << fixed(x) << "\" y=\"" << fixed(y) << "\" width=\"" << fixed(cell) << "\" height=\""
                << fixed(cell) << "\"";
            if (scaled.present(i, j)) {
                svg << " fill=\"" << rgb(heat_color(scaled(i, j))) << "\" stroke=\"#ddd\"/>\n";
            } else {
                svg << " fill=\"#bbbbbb\" stroke=\"#ddd\" class=\"absent\"/>\n";
                svg << "<line x1=\"" << fixed(x) << "\" y1=\"" << fixed(y) << "\" x2=\"" << fixed(x + cell)
                    << "\" y2=\"" << fixed(y + cell) << "\" stroke=\"#777\"/>\n";
            }
        }
    }
    // Color bar.
    const double bar_x = margin + cell * static_cast<double>(m) + 16;
    for (int k = 0; k < 20; ++k) {
        const double t = 1.0 - k / 19.0;
        svg << "<rect x=\"" << fixed(bar_x) << "\" y=\"" << fixed(margin + k * 8.0) << "\" width=\"12\" height=\"8\" fill=\""
            << rgb(heat_color(t)) << "\"/>\n";
    }
    svg << "<text x=\"" << fixed(bar_x + 16) << "\" y=\"" << fixed(margin + 8) << "\" font-size=\"10\">1</text>\n";
    svg << "<text x=\"" << fixed(bar_x + 16) << "\" y=\"" << fixed(margin + 160) << "\" font-size=\"10\">0</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string profile_svg(const CurvatureProfile& profile, const std::vector<double>& known_locations) {
    const auto& c = profile.curve;
    std::vector<double> scaled(c.g.size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = c.scaled(i);
    const double kmax = std::max({1e-12, profile.threshold, *std::max_element(profile.kappa.begin(), profile.kappa.end())});

    const Frame top{60, 30, 600, 180, c.x.front(), c.x.back(), 0.0, 1.0};
    const Frame bottom{60, 260, 600, 180, c.x.front(), c.x.back(), 0.0, kmax * 1.05};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"700\" height=\"480\" font-family=\"sans-serif\">\n";
    svg << "<!-- lograt profile pair=" << escape(c.numerator + "/" + c.denominator)
        << " threshold=" << format_number(profile.threshold) << " c_value=" << format_number(profile.c_value)
        << " -->\n";
    for (const auto& iv : profile.intervals)
        svg << "<rect x=\"" << fixed(bottom.px(iv.start)) << "\" y=\"" << fixed(bottom.top) << "\" width=\""
            << fixed(bottom.px(iv.end) - bottom.px(iv.start)) << "\" height=\"" << fixed(bottom.height)
            << "\" fill=\"#c6dbef\"/>\n";
    axes(svg, top, "scaled log-ratio " + c.numerator + "/" + c.denominator);
    axes(svg, bottom, "curvature");
    polyline(svg, top, c.x, scaled, "#08306b");
    polyline(svg, bottom, c.x, profile.kappa, "#08306b");
    svg << "<line x1=\"" << fixed(bottom.px(c.x.front())) << "\" y1=\"" << fixed(bottom.py(profile.threshold))
        << "\" x2=\"" << fixed(bottom.px(c.x.back())) << "\" y2=\"" << fixed(bottom.py(profile.threshold))
        << "\" stroke=\"#cb181d\" stroke-dasharray=\"5,4\"/>\n";
    for (double k : known_locations)
        svg << "<line x1=\"" << fixed(bottom.px(k)) << "\" y1=\"" << fixed(bottom.top + bottom.height) << "\" x2=\""
            << fixed(bottom.px(k)) << "\" y2=\"" << fixed(bottom.top + bottom.height - 10)
            << "\" stroke=\"#cb181d\" stroke-width=\"2\"/>\n";
    svg << "</svg>\n";
    return svg.str();
}

std::string top_curves_svg(const std::vector<TopCurve>& curves) {
    static const std::array<const char*, 6> palette{"#08306b", "#cb181d", "#238b45", "#6a51a3", "#d94801", "#525252"};
    std::size_t len = 1;
    double vmax = 1e-12;
    for (const auto& c : curves) {
        len = std::max(len, c.values.size());
        if (!c.values.empty()) vmax = std::max(vmax, c.values.front());
    }
    const Frame f{70, 30, 560, 300, 1.0, std::max(2.0, static_cast<double>(len)), 0.0, vmax * 1.05};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"380\" font-family=\"sans-serif\">\n";
    axes(svg, f, "top-ranked c-values (unscaled)");
    for (std::size_t k = 0; k < curves.size(); ++k) {
        std::vector<double> x(curves[k].values.size());
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i + 1);
        const std::string color = palette[k % palette.size()];
        polyline(svg, f, x, curves[k].values, color);
        svg << "<text x=\"" << fixed(f.left + f.width + 8) << "\" y=\"" << fixed(f.top + 12 + 14.0 * k)
            << "\" font-size=\"11\" fill=\"" << color << "\">" << escape(curves[k].material) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace lograt
