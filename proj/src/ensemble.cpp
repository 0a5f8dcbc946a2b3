#include "wildfire/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace wildfire {

void SmoothFieldParams::validate() const {
  if (!(alpha > 0.5)) throw std::invalid_argument("smooth field: alpha must exceed 0.5");
  if (modes < 1) throw std::invalid_argument("smooth field: need at least one mode");
  if (c_T < 0.0 || c_x < 0.0 || c_y < 0.0)
    throw std::invalid_argument("smooth field: magnitudes must be nonnegative");
}

SmoothFieldParams SmoothFieldParams::scaled(double fraction) const {
  SmoothFieldParams p = *this;
  p.c_T *= fraction;
  p.c_x *= fraction;
  p.c_y *= fraction;
  return p;
}

double smooth_field_weight(double alpha, std::size_t i) {
  return 1.0 / (1.0 + std::pow(static_cast<double>(i), 2.0 * alpha));
}

double smooth_field_weight(double alpha, std::size_t i, std::size_t j) {
  const double r2 = static_cast<double>(i * i + j * j);
  return 1.0 / (1.0 + std::pow(r2, alpha));
}

namespace {

// basis[m * n + p] = sin((m + 1) pi x_p / L) at cell centers.
std::vector<double> sine_table(std::size_t modes, std::size_t n) {
  std::vector<double> basis(modes * n);
  for (std::size_t m = 0; m < modes; ++m)
    for (std::size_t p = 0; p < n; ++p)
      basis[m * n + p] = std::sin(std::numbers::pi * static_cast<double>(m + 1) *
                                  (static_cast<double>(p) + 0.5) / static_cast<double>(n));
  return basis;
}

}  // namespace

std::vector<double> smooth_field_from_coefficients(const Grid& grid, double alpha,
                                                   std::size_t modes,
                                                   std::span<const double> v) {
  const std::size_t nx = grid.nx, ny = grid.ny;
  if (modes > nx || (grid.dims == 2 && modes > ny))
    throw std::invalid_argument("smooth field: more modes than cells along an axis");
  const std::size_t expected = grid.dims == 2 ? modes * modes : modes;
  if (v.size() != expected) throw ShapeError("smooth field: wrong coefficient count");

  const auto sx = sine_table(modes, nx);
  std::vector<double> field(grid.cells(), 0.0);
  if (grid.dims == 1) {
    for (std::size_t m = 0; m < modes; ++m) {
      const double a = v[m] * smooth_field_weight(alpha, m + 1);
      for (std::size_t p = 0; p < nx; ++p) field[p] += a * sx[m * nx + p];
    }
    return field;
  }

  const auto sy = sine_table(modes, ny);
  // partial[b][i] = sum_a w_ab v_ab sin_a(x_i)
  std::vector<double> partial(modes * nx, 0.0);
  for (std::size_t b = 0; b < modes; ++b)
    for (std::size_t a = 0; a < modes; ++a) {
      const double coef = v[b * modes + a] * smooth_field_weight(alpha, a + 1, b + 1);
      for (std::size_t i = 0; i < nx; ++i) partial[b * nx + i] += coef * sx[a * nx + i];
    }
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t b = 0; b < modes; ++b) {
      const double s = sy[b * ny + j];
      for (std::size_t i = 0; i < nx; ++i) field[j * nx + i] += s * partial[b * nx + i];
    }
  return field;
}

std::vector<double> smooth_random_field(const Grid& grid, double alpha, std::size_t modes,
                                        Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> v(grid.dims == 2 ? modes * modes : modes);
  for (auto& x : v) x = normal(rng);
  return smooth_field_from_coefficients(grid, alpha, modes, v);
}

FireState perturb_additive(FireState state, std::span<const double> field, double c_T) {
  if (field.size() != state.T.size()) throw ShapeError("perturb_additive: field shape mismatch");
  if (c_T == 0.0) return state;
  for (std::size_t p = 0; p < field.size(); ++p) state.T[p] += c_T * field[p];
  return state;
}

FireState perturb_shift(const FireState& state, std::span<const double> ux,
                        std::span<const double> uy, double c_x, double c_y, double T_a) {
  const Grid& g = state.grid;
  if (g.dims != 2) throw std::invalid_argument("perturb_shift requires a 2D grid");
  if (ux.size() != g.cells() || uy.size() != g.cells())
    throw ShapeError("perturb_shift: shift field shape mismatch");
  if (c_x == 0.0 && c_y == 0.0) return state;

  FireState out = state;
  const double Lx = g.length_x(), Ly = g.length_y();
  const double max_i = static_cast<double>(g.nx - 1), max_j = static_cast<double>(g.ny - 1);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t p = g.index(i, j);
      const double dxs = c_x * ux[p], dys = c_y * uy[p];
      const double x = g.x(i) + dxs, y = g.y(j) + dys;
      if (x < 0.0 || x > Lx || y < 0.0 || y > Ly) {
        out.T[p] = T_a;
        out.S[p] = 1.0;
        continue;
      }
      const double fx = std::clamp(static_cast<double>(i) + dxs / g.dx, 0.0, max_i);
      const double fy = std::clamp(static_cast<double>(j) + dys / g.dx, 0.0, max_j);
      const auto i0 = std::min(static_cast<std::size_t>(fx), g.nx - 2);
      const auto j0 = std::min(static_cast<std::size_t>(fy), g.ny - 2);
      const double ax = fx - static_cast<double>(i0), ay = fy - static_cast<double>(j0);
      const std::size_t q = g.index(i0, j0);
      auto lerp2 = [&](const std::vector<double>& f) {
        return (1.0 - ay) * ((1.0 - ax) * f[q] + ax * f[q + 1]) +
               ay * ((1.0 - ax) * f[q + g.nx] + ax * f[q + g.nx + 1]);
      };
      out.T[p] = lerp2(state.T);
      out.S[p] = lerp2(state.S);
    }
  return out;
}

void Ensemble::validate() const {
  if (members.size() < 2) throw std::invalid_argument("ensemble needs at least two members");
  for (const auto& m : members) {
    if (!(m.grid == members.front().grid)) throw ShapeError("ensemble members disagree on grid");
    m.check_conforming();
  }
}

FireState perturb_member(const FireState& state, const SmoothFieldParams& params, double T_a,
                         const Seed& member_seed) {
  const Grid& g = state.grid;
  FireState out = state;
  if (params.c_T != 0.0) {
    auto rng = member_seed.child("temperature").rng();
    out = perturb_additive(std::move(out), smooth_random_field(g, params.alpha, params.modes, rng),
                           params.c_T);
  }
  if (g.dims == 2 && (params.c_x != 0.0 || params.c_y != 0.0)) {
    auto rx = member_seed.child("shift-x").rng();
    auto ry = member_seed.child("shift-y").rng();
    const auto ux = smooth_random_field(g, params.alpha, params.modes, rx);
    const auto uy = smooth_random_field(g, params.alpha, params.modes, ry);
    out = perturb_shift(out, ux, uy, params.c_x, params.c_y, T_a);
  }
  return out;
}

Ensemble init_ensemble(const FireState& comparison, std::size_t N, const SmoothFieldParams& params,
                       double T_a, const Seed& seed) {
  if (N < 2) throw std::invalid_argument("init_ensemble: N must be at least 2");
  params.validate();
  Ensemble ens;
  ens.members.reserve(N);
  for (std::size_t k = 0; k < N; ++k)
    ens.members.push_back(perturb_member(comparison, params, T_a, seed.child("member", k)));
  return ens;
}

Ensemble reperturb(Ensemble ensemble, const SmoothFieldParams& params, double fraction, double T_a,
                   const Seed& seed) {
  if (fraction < 0.0) throw std::invalid_argument("reperturb: fraction must be nonnegative");
  if (fraction == 0.0) return ensemble;
  const auto scaled = params.scaled(fraction);
  for (std::size_t k = 0; k < ensemble.members.size(); ++k)
    ensemble.members[k] = perturb_member(ensemble.members[k], scaled, T_a, seed.child("member", k));
  return ensemble;
}

FireState ensemble_mean(const Ensemble& ens) {
  ens.validate();
  FireState mean = FireState::uniform(ens.grid(), 0.0, 0.0, ens.members.front().time);
  for (const auto& m : ens.members)
    for (std::size_t p = 0; p < m.T.size(); ++p) {
      mean.T[p] += m.T[p];
      mean.S[p] += m.S[p];
    }
  const double inv = 1.0 / static_cast<double>(ens.size());
  for (std::size_t p = 0; p < mean.T.size(); ++p) {
    mean.T[p] *= inv;
    mean.S[p] *= inv;
  }
  return mean;
}

double mean_temperature_variance(const Ensemble& ens) {
  const auto mean = ensemble_mean(ens);
  double total = 0.0;
  for (const auto& m : ens.members)
    for (std::size_t p = 0; p < m.T.size(); ++p) {
      const double d = m.T[p] - mean.T[p];
      total += d * d;
    }
  return total / (static_cast<double>(ens.size() - 1) * static_cast<double>(mean.T.size()));
}

}  // namespace wildfire
