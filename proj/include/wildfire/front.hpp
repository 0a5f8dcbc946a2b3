#pragma once

#include <array>
#include <limits>
#include <span>
#include <vector>

#include "wildfire/fields.hpp"

namespace wildfire {

using Point = std::array<double, 2>;

/// Returned by front_distance when either contour is empty.
inline constexpr double kNoContour = std::numeric_limits<double>::infinity();

/// Midpoints of the marching-squares segments of the `level` contour, on the
/// square lattice joining cell centers. 2D grids only.
std::vector<Point> contour_midpoints(std::span<const double> field, const Grid& grid, double level);

/// Symmetric mean nearest-point distance (m) between the `level` contours of
/// two conforming fields; kNoContour if either contour is empty.
double front_distance(std::span<const double> field_a, std::span<const double> field_b,
                      const Grid& grid, double level);

}  // namespace wildfire
