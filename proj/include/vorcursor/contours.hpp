#pragma once

#include <vector>

#include "vorcursor/image.hpp"

namespace vorcursor {

struct Point {
    int x = 0;
    int y = 0;
    friend constexpr bool operator==(Point, Point) = default;
    friend constexpr auto operator<=>(Point a, Point b) { return a.y != b.y ? a.y <=> b.y : a.x <=> b.x; }
};

/// Closed outer border of one 8-connected foreground component, in
/// border-following order. Thin parts are traversed in both directions, so
/// a pixel can appear more than once.
struct Contour {
    std::vector<Point> points;
};

struct BoundingBox {
    int min_x = 0;
    int min_y = 0;
    int width = 0;
    int height = 0;

    double center_x() const { return min_x + (width - 1) / 2.0; }
    double center_y() const { return min_y + (height - 1) / 2.0; }
};

/// Outer borders of all 8-connected foreground components, in raster order
/// of discovery (Suzuki-Abe border following; hole borders are traced so
/// that labelling stays consistent but are not returned).
std::vector<Contour> find_contours(const BinaryImage& binary);

/// Absolute shoelace area of the contour polygon through pixel centers.
double contour_area(const Contour& contour);

BoundingBox bounding_box(const Contour& contour);

}  // namespace vorcursor
