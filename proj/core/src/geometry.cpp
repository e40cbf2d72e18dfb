#include "uiground/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace uiground {

namespace {
bool unit(double v) noexcept { return v >= 0.0 && v <= 1.0; }  // false for NaN
}  // namespace

bool Point::valid() const noexcept { return unit(x) && unit(y); }

bool Box::valid() const noexcept {
    return unit(x1) && unit(y1) && unit(x2) && unit(y2) && x1 <= x2 && y1 <= y2;
}

Box checked_box(double x1, double y1, double x2, double y2) {
    Box b{x1, y1, x2, y2};
    if (!b.valid()) throw std::invalid_argument("invalid box " + to_string(b));
    return b;
}

Point checked_point(double x, double y) {
    Point p{x, y};
    if (!p.valid()) throw std::invalid_argument("invalid point " + to_string(p));
    return p;
}

Point box_center(const Box& b) noexcept { return {(b.x1 + b.x2) / 2.0, (b.y1 + b.y2) / 2.0}; }

bool point_in_box(const Point& p, const Box& b) noexcept {
    return b.x1 <= p.x && p.x <= b.x2 && b.y1 <= p.y && p.y <= b.y2;
}

double iou(const Box& a, const Box& b) noexcept {
    const double ix = std::max(0.0, std::min(a.x2, b.x2) - std::max(a.x1, b.x1));
    const double iy = std::max(0.0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0.0) return 0.0;
    return inter / uni;
}

Box expand(const Box& b, double margin) noexcept {
    return {std::clamp(b.x1 - margin, 0.0, 1.0), std::clamp(b.y1 - margin, 0.0, 1.0),
            std::clamp(b.x2 + margin, 0.0, 1.0), std::clamp(b.y2 + margin, 0.0, 1.0)};
}

std::optional<Box> normalize_pixel_box(double x1, double y1, double x2, double y2, double width,
                                       double height) noexcept {
    if (!(width > 0.0) || !(height > 0.0)) return std::nullopt;
    Box b{x1 / width, y1 / height, x2 / width, y2 / height};
    if (!b.valid()) return std::nullopt;
    return b;
}

std::string to_string(const Box& b) {
    std::ostringstream os;
    os << '(' << b.x1 << ',' << b.y1 << ',' << b.x2 << ',' << b.y2 << ')';
    return os.str();
}

std::string to_string(const Point& p) {
    std::ostringstream os;
    os << '(' << p.x << ',' << p.y << ')';
    return os.str();
}

}  // namespace uiground
