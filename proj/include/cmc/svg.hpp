#pragma once

#include <span>
#include <string>
#include <vector>

#include "cmc/profile_geometry.hpp"

namespace cmc::svg {

/// Minimal deterministic SVG line chart: fixed viewBox, axis frame with tick
/// labels, polyline series.  Output is plain text with no timestamps.
class Chart {
  public:
    Chart(std::string title, double width = 480, double height = 360);

    void add_series(std::span<const Point2> xy, const std::string& color,
                    double stroke_width = 1.2);
    void add_marker(double x, double y, const std::string& color,
                    double radius = 3.0);
    /// Reference circle in data coordinates (the unit-disk boundary).
    void add_circle(double cx, double cy, double r, const std::string& color);
    /// Force the data window (otherwise fitted to the series).
    void set_window(double xmin, double xmax, double ymin, double ymax);
    void set_equal_aspect(bool on) { equal_aspect_ = on; }

    std::string str() const;

  private:
    struct Series {
        std::vector<Point2> pts;
        std::string color;
        double width;
    };
    struct Marker {
        double x, y, r;
        std::string color;
    };
    struct Circle {
        double cx, cy, r;
        std::string color;
    };

    std::string title_;
    double w_, h_;
    std::vector<Series> series_;
    std::vector<Marker> markers_;
    std::vector<Circle> circles_;
    bool window_set_ = false;
    bool equal_aspect_ = false;
    double xmin_ = 0, xmax_ = 1, ymin_ = 0, ymax_ = 1;
};

}  // namespace cmc::svg
