#include "wildfire/fields.hpp"

#include <algorithm>

namespace wildfire {

Grid Grid::line(std::size_t nx, double dx) {
  Grid g{1, nx, 1, dx};
  g.validate();
  return g;
}

Grid Grid::plane(std::size_t nx, std::size_t ny, double dx) {
  Grid g{2, nx, ny, dx};
  g.validate();
  return g;
}

void Grid::validate() const {
  if (dims != 1 && dims != 2) throw ShapeError("grid: dims must be 1 or 2");
  if (nx < 3) throw ShapeError("grid: nx must be at least 3");
  if (dims == 2 && ny < 3) throw ShapeError("grid: ny must be at least 3 in 2D");
  if (dims == 1 && ny != 1) throw ShapeError("grid: ny must be 1 in 1D");
  if (!(dx > 0.0)) throw ShapeError("grid: dx must be positive");
}

FireState FireState::uniform(const Grid& grid, double temperature, double fuel, double time) {
  FireState s;
  s.grid = grid;
  s.T.assign(grid.cells(), temperature);
  s.S.assign(grid.cells(), fuel);
  s.time = time;
  return s;
}

void FireState::check_conforming() const {
  const auto n = grid.cells();
  if (T.size() != n || S.size() != n)
    throw ShapeError("state: fields have " + std::to_string(T.size()) + "/" +
                     std::to_string(S.size()) + " values, grid has " + std::to_string(n) +
                     " cells");
}

StateVector flatten(const FireState& state) {
  StateVector v(2 * state.grid.cells());
  flatten_into(state, v);
  return v;
}

void flatten_into(const FireState& state, std::span<double> out) {
  state.check_conforming();
  const auto n = state.grid.cells();
  if (out.size() != 2 * n) throw ShapeError("flatten: output length mismatch");
  std::copy(state.T.begin(), state.T.end(), out.begin());
  std::copy(state.S.begin(), state.S.end(), out.begin() + static_cast<std::ptrdiff_t>(n));
}

FireState unflatten(std::span<const double> v, const Grid& grid, double time) {
  const auto n = grid.cells();
  if (v.size() != 2 * n)
    throw ShapeError("unflatten: vector has " + std::to_string(v.size()) + " entries, expected " +
                     std::to_string(2 * n));
  FireState s;
  s.grid = grid;
  s.T.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n));
  s.S.assign(v.begin() + static_cast<std::ptrdiff_t>(n), v.end());
  s.time = time;
  return s;
}

}  // namespace wildfire
