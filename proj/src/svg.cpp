#include "cmc/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

namespace cmc::svg {

namespace {

std::string fmt(double v) {
    if (!std::isfinite(v)) return "0";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                   std::chars_format::general, 6);
    return std::string(buf.data(), res.ptr);
}

}  // namespace

Chart::Chart(std::string title, double width, double height)
    : title_(std::move(title)), w_(width), h_(height) {}

void Chart::add_series(std::span<const Point2> xy, const std::string& color,
                       double stroke_width) {
    series_.push_back({{xy.begin(), xy.end()}, color, stroke_width});
}

void Chart::add_marker(double x, double y, const std::string& color,
                       double radius) {
    markers_.push_back({x, y, radius, color});
}

void Chart::add_circle(double cx, double cy, double r,
                       const std::string& color) {
    circles_.push_back({cx, cy, r, color});
}

void Chart::set_window(double xmin, double xmax, double ymin, double ymax) {
    window_set_ = true;
    xmin_ = xmin;
    xmax_ = xmax;
    ymin_ = ymin;
    ymax_ = ymax;
}

std::string Chart::str() const {
    double xmin = xmin_, xmax = xmax_, ymin = ymin_, ymax = ymax_;
    if (!window_set_) {
        xmin = ymin = std::numeric_limits<double>::infinity();
        xmax = ymax = -xmin;
        for (const Series& s : series_)
            for (const Point2& p : s.pts) {
                xmin = std::min(xmin, p[0]);
                xmax = std::max(xmax, p[0]);
                ymin = std::min(ymin, p[1]);
                ymax = std::max(ymax, p[1]);
            }
        for (const Circle& c : circles_) {
            xmin = std::min(xmin, c.cx - c.r);
            xmax = std::max(xmax, c.cx + c.r);
            ymin = std::min(ymin, c.cy - c.r);
            ymax = std::max(ymax, c.cy + c.r);
        }
        if (!(xmin < xmax)) { xmin -= 0.5; xmax += 0.5; }
        if (!(ymin < ymax)) { ymin -= 0.5; ymax += 0.5; }
        const double mx = 0.05 * (xmax - xmin), my = 0.05 * (ymax - ymin);
        xmin -= mx; xmax += mx; ymin -= my; ymax += my;
    }

    const double L = 52, R = 12, Tm = 28, B = 34;  // frame margins
    double pw = w_ - L - R, ph = h_ - Tm - B;
    double sx = pw / (xmax - xmin), sy = ph / (ymax - ymin);
    if (equal_aspect_) sx = sy = std::min(sx, sy);
    auto X = [&](double x) { return L + (x - xmin) * sx; };
    auto Y = [&](double y) { return Tm + ph - (y - ymin) * sy; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + fmt(w_) +
           " " + fmt(h_) + "\" font-family=\"monospace\" font-size=\"10\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + fmt(w_) + "\" height=\"" + fmt(h_) +
           "\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt(w_ / 2) + "\" y=\"16\" text-anchor=\"middle\">" +
           title_ + "</text>\n";
    out += "<rect x=\"" + fmt(L) + "\" y=\"" + fmt(Tm) + "\" width=\"" + fmt(pw) +
           "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#888\"/>\n";

    // Corner tick labels are enough to read scales off the frame.
    out += "<text x=\"" + fmt(L) + "\" y=\"" + fmt(h_ - 12) + "\">" + fmt(xmin) +
           "</text>\n";
    out += "<text x=\"" + fmt(L + pw) + "\" y=\"" + fmt(h_ - 12) +
           "\" text-anchor=\"end\">" + fmt(xmax) + "</text>\n";
    out += "<text x=\"" + fmt(L - 4) + "\" y=\"" + fmt(Tm + ph) +
           "\" text-anchor=\"end\">" + fmt(ymin) + "</text>\n";
    out += "<text x=\"" + fmt(L - 4) + "\" y=\"" + fmt(Tm + 8) +
           "\" text-anchor=\"end\">" + fmt(ymax) + "</text>\n";

    // Zero axes when inside the window.
    if (ymin < 0 && ymax > 0)
        out += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(Y(0)) + "\" x2=\"" +
               fmt(L + pw) + "\" y2=\"" + fmt(Y(0)) +
               "\" stroke=\"#ccc\" stroke-dasharray=\"4 3\"/>\n";
    if (xmin < 0 && xmax > 0)
        out += "<line x1=\"" + fmt(X(0)) + "\" y1=\"" + fmt(Tm) + "\" x2=\"" +
               fmt(X(0)) + "\" y2=\"" + fmt(Tm + ph) +
               "\" stroke=\"#ccc\" stroke-dasharray=\"4 3\"/>\n";

    for (const Circle& c : circles_)
        out += "<circle cx=\"" + fmt(X(c.cx)) + "\" cy=\"" + fmt(Y(c.cy)) +
               "\" r=\"" + fmt(c.r * sx) + "\" fill=\"none\" stroke=\"" +
               c.color + "\" stroke-dasharray=\"2 3\"/>\n";

    for (const Series& s : series_) {
        out += "<polyline fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"" + fmt(s.width) + "\" points=\"";
        for (const Point2& p : s.pts)
            out += fmt(X(p[0])) + "," + fmt(Y(p[1])) + " ";
        out += "\"/>\n";
    }

    for (const Marker& m : markers_)
        out += "<circle cx=\"" + fmt(X(m.x)) + "\" cy=\"" + fmt(Y(m.y)) +
               "\" r=\"" + fmt(m.r) + "\" fill=\"" + m.color + "\"/>\n";

    out += "</svg>\n";
    return out;
}

}  // namespace cmc::svg
