#pragma once

#include "scalp/grid.hpp"

#include <vector>

namespace scalp {

/// Ordered pixels of a rasterized segment, both endpoints included.
using PixelPath = std::vector<Point>;

/// Bresenham rasterization from `from` to `to` in the plane (both z equal).
/// The minor-axis offset at driving step i is round-half-down of
/// i*|d_minor|/|d_major|, evaluated from the lexicographically smaller
/// endpoint, so linear_path(b, a) is exactly the reverse of linear_path(a, b).
PixelPath linear_path(Point from, Point to);

/// Same rasterization with three axes (26-adjacent steps).
PixelPath linear_path_3d(Point from, Point to);

/// Appends the path to `out` without clearing it. Used by the clustering
/// engine to reuse one buffer across evaluations.
void append_linear_path(Point from, Point to, std::vector<Point>& out);

/// Element `i` of the path from `from` to `to`, without building it.
/// `i` must lie in [0, linear_path_length(from, to)).
Point linear_path_point(Point from, Point to, int i);

/// Number of elements on the path: Chebyshev distance + 1.
int linear_path_length(Point from, Point to);

} // namespace scalp
