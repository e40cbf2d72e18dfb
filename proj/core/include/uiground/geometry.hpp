#pragma once

#include <optional>
#include <string>

namespace uiground {

/// Point in normalized screen coordinates, both axes in [0,1].
struct Point {
    double x = 0.0;
    double y = 0.0;

    bool valid() const noexcept;
    friend bool operator==(const Point&, const Point&) = default;
};

/// Axis-aligned box in normalized screen coordinates.
///
/// Valid boxes satisfy x1 <= x2, y1 <= y2 with every coordinate in [0,1].
/// Degenerate (zero width or height) boxes are valid.
struct Box {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    bool valid() const noexcept;
    double width() const noexcept { return x2 - x1; }
    double height() const noexcept { return y2 - y1; }
    double area() const noexcept { return width() * height(); }
    friend bool operator==(const Box&, const Box&) = default;
};

/// Throws std::invalid_argument when the box violates its invariants.
Box checked_box(double x1, double y1, double x2, double y2);
Point checked_point(double x, double y);

Point box_center(const Box& b) noexcept;

/// Boundary-inclusive containment test.
bool point_in_box(const Point& p, const Box& b) noexcept;

/// Intersection over union; 0 when both boxes have zero area.
double iou(const Box& a, const Box& b) noexcept;

/// Grows the box by `margin` on every side and clamps the result to [0,1].
Box expand(const Box& b, double margin) noexcept;

/// Pixel-space box to normalized box. Returns nullopt when the result leaves [0,1]
/// or the corners are inverted.
std::optional<Box> normalize_pixel_box(double x1, double y1, double x2, double y2, double width,
                                       double height) noexcept;

std::string to_string(const Box& b);
std::string to_string(const Point& p);

}  // namespace uiground
