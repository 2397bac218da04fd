#include "natlas/svg.hpp"

#include <cstdio>
#include <stdexcept>

namespace natlas {

namespace {

// Stable short float formatting; %.6g keeps coordinates readable and makes
// repeated renders byte-identical.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape_text(const std::string& s) {
    std::string out;
    for (const char c : s) {
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

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {
    if (!(width > 0) || !(height > 0))
        throw std::invalid_argument("SvgCanvas needs positive dimensions");
}

void SvgCanvas::add_line(double x1, double y1, double x2, double y2, const std::string& stroke,
                         double stroke_width, const std::string& dash) {
    std::string el = "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
                     "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
                     num(stroke_width) + "\"";
    if (!dash.empty()) el += " stroke-dasharray=\"" + dash + "\"";
    el += "/>";
    elements_.push_back(std::move(el));
}

void SvgCanvas::add_polyline(const std::vector<std::array<double, 2>>& pts,
                             const std::string& stroke, double stroke_width,
                             const std::string& dash) {
    if (pts.size() < 2) return;
    std::string el = "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) el += ' ';
        el += num(pts[i][0]) + "," + num(pts[i][1]);
    }
    el += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) +
          "\"";
    if (!dash.empty()) el += " stroke-dasharray=\"" + dash + "\"";
    el += "/>";
    elements_.push_back(std::move(el));
}

void SvgCanvas::add_circle(double cx, double cy, double r, const std::string& fill,
                           const std::string& stroke, double stroke_width) {
    std::string el = "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) +
                     "\" fill=\"" + fill + "\"";
    if (stroke != "none")
        el += " stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) + "\"";
    el += "/>";
    elements_.push_back(std::move(el));
}

void SvgCanvas::add_text(double x, double y, const std::string& text, double size,
                         const std::string& fill) {
    elements_.push_back("<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"monospace\"" +
                        " font-size=\"" + num(size) + "\" fill=\"" + fill + "\">" +
                        escape_text(text) + "</text>");
}

std::string SvgCanvas::to_string() const {
    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) +
                      "\" height=\"" + num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " +
                      num(height_) + "\">\n";
    out += "<rect width=\"" + num(width_) + "\" height=\"" + num(height_) +
           "\" fill=\"#ffffff\"/>\n";
    for (const std::string& el : elements_) {
        out += el;
        out += '\n';
    }
    out += "</svg>\n";
    return out;
}

} // namespace natlas
