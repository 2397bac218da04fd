// Minimal deterministic SVG emitter: polylines, circles, lines, and text on
// a fixed-size canvas. No external plotting dependency, no timestamps or
// other run-varying metadata, so identical draw calls produce identical
// bytes — outputs stay diffable.

#pragma once

#include <array>
#include <string>
#include <vector>

namespace natlas {

class SvgCanvas {
  public:
    // Pixel dimensions; the viewBox is 0 0 width height.
    SvgCanvas(double width, double height);

    void add_line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double stroke_width = 1.0, const std::string& dash = "");
    void add_polyline(const std::vector<std::array<double, 2>>& pts, const std::string& stroke,
                      double stroke_width = 1.0, const std::string& dash = "");
    void add_circle(double cx, double cy, double r, const std::string& fill,
                    const std::string& stroke = "none", double stroke_width = 1.0);
    void add_text(double x, double y, const std::string& text, double size = 12.0,
                  const std::string& fill = "#000000");

    double width() const { return width_; }
    double height() const { return height_; }

    // The complete SVG document.
    std::string to_string() const;

  private:
    double width_, height_;
    std::vector<std::string> elements_;
};

} // namespace natlas
