#include "wildfire/front.hpp"

#include <cmath>
#include <stdexcept>

namespace wildfire {

std::vector<Point> contour_midpoints(std::span<const double> f, const Grid& g, double level) {
  if (g.dims != 2) throw std::invalid_argument("contour_midpoints requires a 2D grid");
  if (f.size() != g.cells()) throw ShapeError("contour_midpoints: field shape mismatch");

  std::vector<Point> mids;
  for (std::size_t j = 0; j + 1 < g.ny; ++j)
    for (std::size_t i = 0; i + 1 < g.nx; ++i) {
      // corners counter-clockwise from (i, j)
      const std::array<Point, 4> pos{Point{g.x(i), g.y(j)}, Point{g.x(i + 1), g.y(j)},
                                     Point{g.x(i + 1), g.y(j + 1)}, Point{g.x(i), g.y(j + 1)}};
      const std::array<double, 4> v{f[g.index(i, j)], f[g.index(i + 1, j)], f[g.index(i + 1, j + 1)],
                                    f[g.index(i, j + 1)]};
      std::array<bool, 4> in{};
      int count = 0;
      for (int c = 0; c < 4; ++c) count += (in[c] = v[c] >= level);
      if (count == 0 || count == 4) continue;

      // crossing on edge e joins corner e and corner e + 1
      std::array<Point, 4> cross{};
      std::array<bool, 4> has{};
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if (in[a] == in[b]) continue;
        const double t = (level - v[a]) / (v[b] - v[a]);
        cross[e] = {pos[a][0] + t * (pos[b][0] - pos[a][0]), pos[a][1] + t * (pos[b][1] - pos[a][1])};
        has[e] = true;
      }
      auto emit = [&](int e1, int e2) {
        mids.push_back({0.5 * (cross[e1][0] + cross[e2][0]), 0.5 * (cross[e1][1] + cross[e2][1])});
      };

      if (count == 2 && in[0] == in[2]) {
        // saddle; resolve by the mean of the corners
        const bool center_in = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
        const bool cut_odd = (in[0] == center_in);  // isolate corners 1 and 3
        if (cut_odd) {
          emit(0, 1);
          emit(2, 3);
        } else {
          emit(3, 0);
          emit(1, 2);
        }
        continue;
      }
      int first = -1, second = -1;
      for (int e = 0; e < 4; ++e)
        if (has[e]) (first < 0 ? first : second) = e;
      emit(first, second);
    }
  return mids;
}

namespace {

double mean_nearest(const std::vector<Point>& from, const std::vector<Point>& to) {
  double total = 0.0;
  for (const auto& p : from) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : to) {
      const double dx = p[0] - q[0], dy = p[1] - q[1];
      best = std::min(best, dx * dx + dy * dy);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(from.size());
}

}  // namespace

double front_distance(std::span<const double> a, std::span<const double> b, const Grid& grid,
                      double level) {
  const auto pa = contour_midpoints(a, grid, level);
  const auto pb = contour_midpoints(b, grid, level);
  if (pa.empty() || pb.empty()) return kNoContour;
  return 0.5 * (mean_nearest(pa, pb) + mean_nearest(pb, pa));
}

}  // namespace wildfire
