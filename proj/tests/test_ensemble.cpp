#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wildfire/ensemble.hpp"

using namespace wildfire;
using doctest::Approx;

namespace {

// Coefficient of sine mode n recovered from a 1D field sampled at cell
// centers (discrete sine transform, type II orthogonality).
double project_mode(const std::vector<double>& f, std::size_t n) {
  const double N = static_cast<double>(f.size());
  double acc = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p)
    acc += f[p] * std::sin(std::numbers::pi * static_cast<double>(n) * (static_cast<double>(p) + 0.5) / N);
  return 2.0 * acc / N;
}

double gradient_energy(const std::vector<double>& f, const Grid& g) {
  double e = 0.0;
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      if (i + 1 < g.nx) e += std::pow(f[g.index(i + 1, j)] - f[g.index(i, j)], 2);
      if (j + 1 < g.ny) e += std::pow(f[g.index(i, j + 1)] - f[g.index(i, j)], 2);
    }
  return e;
}

FireState hot_patch(const Grid& g) {
  auto s = FireState::uniform(g, 300.0, 1.0);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      if (std::hypot(g.x(i) - 30.0, g.y(j) - 25.0) < 12.0) {
        s.T[g.index(i, j)] = 1100.0;
        s.S[g.index(i, j)] = 0.4;
      }
  return s;
}

}  // namespace

TEST_CASE("spectral weights") {
  CHECK(smooth_field_weight(2.0, 1) == 0.5);
  CHECK(smooth_field_weight(2.0, 3) == Approx(1.0 / 82.0));
  CHECK(smooth_field_weight(2.0, 1, 1) == Approx(1.0 / 5.0));
  CHECK(smooth_field_weight(1.5, 2, 1) == Approx(1.0 / (1.0 + std::pow(5.0, 1.5))));
}

TEST_CASE("field from coefficients") {
  const auto g = Grid::plane(40, 30, 2.0);
  std::vector<double> zero(16 * 16, 0.0);
  const auto f0 = smooth_field_from_coefficients(g, 2.0, 16, zero);
  CHECK(std::all_of(f0.begin(), f0.end(), [](double v) { return v == 0.0; }));

  // single mode (2, 1) matches the closed form
  std::vector<double> one(16 * 16, 0.0);
  one[0 * 16 + 1] = 1.0;
  const auto f = smooth_field_from_coefficients(g, 2.0, 16, one);
  const double w = 1.0 / (1.0 + 25.0);
  for (std::size_t j = 0; j < g.ny; j += 7)
    for (std::size_t i = 0; i < g.nx; i += 5)
      CHECK(f[g.index(i, j)] ==
            Approx(w * std::sin(2.0 * std::numbers::pi * g.x(i) / 80.0) * std::sin(std::numbers::pi * g.y(j) / 60.0)));

  CHECK_THROWS_AS(smooth_field_from_coefficients(g, 2.0, 16, std::vector<double>(10)), ShapeError);
  CHECK_THROWS_AS(smooth_field_from_coefficients(g, 2.0, 31, std::vector<double>(31 * 31)), std::invalid_argument);
}

TEST_CASE("random field is small at the boundary") {
  const auto g = Grid::plane(64, 64, 1.0);
  Rng rng(3);
  double edge = 0.0, interior = 0.0;
  for (int s = 0; s < 50; ++s) {
    const auto f = smooth_random_field(g, 2.0, 16, rng);
    for (std::size_t i = 0; i < g.nx; ++i) edge = std::max(edge, std::abs(f[g.index(i, 0)]));
    interior = std::max(interior, std::abs(f[g.index(32, 32)]));
  }
  CHECK(edge < 0.2 * interior);
}

TEST_CASE("mode coefficients have the prescribed variance") {
  const auto g = Grid::line(64, 1.0);
  const double alpha = 1.5;
  const std::size_t modes = 6;
  Rng rng(17);
  std::vector<double> sum2(modes + 1, 0.0);
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const auto f = smooth_random_field(g, alpha, modes, rng);
    for (std::size_t n = 1; n <= modes; ++n) sum2[n] += std::pow(project_mode(f, n), 2);
  }
  for (std::size_t n = 1; n <= modes; ++n) {
    const double w = 1.0 / (1.0 + std::pow(static_cast<double>(n), 2.0 * alpha));
    CHECK(sum2[n] / draws == Approx(w * w).epsilon(0.05));
  }
  // modes above the cutoff carry nothing
  const auto f = smooth_random_field(g, alpha, modes, rng);
  CHECK(std::abs(project_mode(f, modes + 3)) < 1e-12);
}

TEST_CASE("larger alpha gives smoother fields") {
  const auto g = Grid::plane(48, 48, 1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {1.0, 2.0, 3.0}) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 100; ++s) {
      Rng rng(s);
      total += gradient_energy(smooth_random_field(g, alpha, 16, rng), g);
    }
    CHECK(total < prev);
    prev = total;
  }
}

TEST_CASE("additive perturbation") {
  const auto g = Grid::plane(10, 10, 1.0);
  const auto s = hot_patch(Grid::plane(30, 30, 2.0));
  Rng rng(2);
  const auto f = smooth_random_field(s.grid, 2.0, 8, rng);
  CHECK(perturb_additive(s, f, 0.0) == s);
  const auto p = perturb_additive(s, f, 5.0);
  for (std::size_t q = 0; q < f.size(); ++q) CHECK(p.T[q] == s.T[q] + 5.0 * f[q]);
  CHECK(p.S == s.S);
  CHECK_THROWS_AS(perturb_additive(s, std::vector<double>(g.cells()), 1.0), ShapeError);
}

TEST_CASE("shift perturbation") {
  const auto g = Grid::plane(30, 25, 2.0);
  const auto s = hot_patch(g);
  Rng rng(4);
  const auto ux = smooth_random_field(g, 2.0, 8, rng);
  const auto uy = smooth_random_field(g, 2.0, 8, rng);

  SUBCASE("zero magnitude is the identity") { CHECK(perturb_shift(s, ux, uy, 0.0, 0.0, 300.0) == s); }

  SUBCASE("whole-cell translation") {
    const std::vector<double> one(g.cells(), 1.0), zero(g.cells(), 0.0);
    const auto p = perturb_shift(s, one, zero, g.dx, 0.0, 300.0);
    for (std::size_t j = 0; j < g.ny; ++j) {
      for (std::size_t i = 0; i + 1 < g.nx; ++i) {
        CHECK(p.T[g.index(i, j)] == s.T[g.index(i + 1, j)]);
        CHECK(p.S[g.index(i, j)] == s.S[g.index(i + 1, j)]);
      }
      CHECK(p.T[g.index(g.nx - 1, j)] == 300.0);
      CHECK(p.S[g.index(g.nx - 1, j)] == 1.0);
    }
    const auto q = perturb_shift(s, zero, one, 0.0, -g.dx, 300.0);
    for (std::size_t j = 1; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) CHECK(q.T[g.index(i, j)] == s.T[g.index(i, j - 1)]);
  }

  SUBCASE("ambient state is invariant") {
    const auto flat = FireState::uniform(g, 300.0, 1.0);
    const auto p = perturb_shift(flat, ux, uy, 150.0, 150.0, 300.0);
    for (std::size_t q = 0; q < g.cells(); ++q) {
      CHECK(p.T[q] == Approx(300.0).epsilon(1e-14));
      CHECK(p.S[q] == Approx(1.0).epsilon(1e-14));
    }
  }

  SUBCASE("interpolation stays within the data range") {
    const auto p = perturb_shift(s, ux, uy, 40.0, 40.0, 300.0);
    for (std::size_t q = 0; q < g.cells(); ++q) {
      CHECK(p.T[q] >= 300.0 - 1e-9);
      CHECK(p.T[q] <= 1100.0 + 1e-9);
      CHECK(p.S[q] >= 0.4 - 1e-12);
      CHECK(p.S[q] <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("ensemble initialization") {
  const auto g = Grid::plane(30, 25, 2.0);
  const auto s = hot_patch(g);
  SmoothFieldParams zero;
  zero.modes = 8;

  const auto same = init_ensemble(s, 5, zero, 300.0, Seed(1));
  for (const auto& m : same.members) CHECK(m == s);
  CHECK(mean_temperature_variance(same) == 0.0);

  SmoothFieldParams p = zero;
  p.c_T = 5.0;
  p.c_x = p.c_y = 10.0;
  const auto a = init_ensemble(s, 100, p, 300.0, Seed(7));
  const auto b = init_ensemble(s, 100, p, 300.0, Seed(7));
  const auto c = init_ensemble(s, 100, p, 300.0, Seed(8));
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.members[k] == b.members[k]);
  CHECK_FALSE(a.members[0] == c.members[0]);
  CHECK(a.members[0].T != a.members[1].T);
  CHECK(mean_temperature_variance(a) > 0.0);

  // member k depends only on its own substream
  const auto small = init_ensemble(s, 3, p, 300.0, Seed(7));
  CHECK(small.members[2] == a.members[2]);

  CHECK_THROWS_AS(init_ensemble(s, 1, p, 300.0, Seed(7)), std::invalid_argument);
}

TEST_CASE("reperturbation") {
  const auto g = Grid::plane(30, 25, 2.0);
  SmoothFieldParams p;
  p.modes = 8;
  p.c_T = 5.0;
  p.c_x = p.c_y = 10.0;
  const auto ens = init_ensemble(hot_patch(g), 20, p, 300.0, Seed(3));
  const auto same = reperturb(ens, p, 0.0, 300.0, Seed(4));
  for (std::size_t k = 0; k < ens.size(); ++k) CHECK(same.members[k] == ens.members[k]);

  SmoothFieldParams additive = p;
  additive.c_x = additive.c_y = 0.0;
  const auto flat = init_ensemble(FireState::uniform(g, 300.0), 20, SmoothFieldParams{2.0, 8}, 300.0, Seed(1));
  CHECK(mean_temperature_variance(reperturb(flat, additive, 1.0, 300.0, Seed(5))) > 0.0);
  CHECK(mean_temperature_variance(reperturb(ens, p, 1.0, 300.0, Seed(5))) > mean_temperature_variance(ens));
}

TEST_CASE("ensemble mean and variance against hand values") {
  const auto g = Grid::line(3, 1.0);
  Ensemble e;
  for (double t : {300.0, 310.0, 320.0}) e.members.push_back(FireState::uniform(g, t, t / 400.0));
  const auto m = ensemble_mean(e);
  CHECK(m.T[1] == Approx(310.0));
  CHECK(m.S[2] == Approx(310.0 / 400.0));
  CHECK(mean_temperature_variance(e) == Approx(100.0));
}
