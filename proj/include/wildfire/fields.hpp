#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wildfire {

/// Raised when a field, vector, or grid does not have the expected shape.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform cell-centered rectangular mesh. One-dimensional grids have ny == 1.
///
/// Cell (i, j) has its center at ((i + 0.5) dx, (j + 0.5) dx) and is stored at
/// linear index j * nx + i (row-major, rows along y).
struct Grid {
  int dims = 1;
  std::size_t nx = 3;
  std::size_t ny = 1;
  double dx = 1.0;

  static Grid line(std::size_t nx, double dx);
  static Grid plane(std::size_t nx, std::size_t ny, double dx);

  /// Throws ShapeError on a degenerate grid.
  void validate() const;

  std::size_t cells() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j = 0) const { return j * nx + i; }
  double x(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dx; }
  double y(std::size_t j) const { return (static_cast<double>(j) + 0.5) * dx; }
  double length_x() const { return static_cast<double>(nx) * dx; }
  double length_y() const { return static_cast<double>(ny) * dx; }

  bool operator==(const Grid&) const = default;
};

/// Temperature (K) and fuel mass fraction fields on a grid, plus the clock.
struct FireState {
  Grid grid;
  std::vector<double> T;
  std::vector<double> S;
  double time = 0.0;

  /// Uniform state: T = temperature, S = fuel everywhere.
  static FireState uniform(const Grid& grid, double temperature, double fuel = 1.0,
                           double time = 0.0);

  void check_conforming() const;

  bool operator==(const FireState&) const = default;
};

/// Flattened analysis state: all T values row-major, then all S values.
using StateVector = std::vector<double>;

StateVector flatten(const FireState& state);
void flatten_into(const FireState& state, std::span<double> out);
FireState unflatten(std::span<const double> v, const Grid& grid, double time = 0.0);

}  // namespace wildfire
