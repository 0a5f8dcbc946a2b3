#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wildfire/fields.hpp"
#include "wildfire/seed.hpp"

namespace wildfire {

struct SmoothFieldParams {
  double alpha = 2.0;      ///< smoothness order, > 0.5
  std::size_t modes = 32;  ///< retained sine modes per axis
  double c_T = 0.0;        ///< additive temperature magnitude, K
  double c_x = 0.0;        ///< shift magnitude along x, m
  double c_y = 0.0;        ///< shift magnitude along y, m

  void validate() const;
  SmoothFieldParams scaled(double fraction) const;
};

/// Spectral weight of sine mode (i) in 1D or (i, j) in 2D.
double smooth_field_weight(double alpha, std::size_t i);
double smooth_field_weight(double alpha, std::size_t i, std::size_t j);

/// Evaluates sum v * weight * sin(i pi x / Lx) [* sin(j pi y / Ly)] at cell
/// centers. `coefficients` holds modes (1D) or modes * modes (2D, x-mode
/// fastest) standard normal draws.
std::vector<double> smooth_field_from_coefficients(const Grid& grid, double alpha,
                                                   std::size_t modes,
                                                   std::span<const double> coefficients);

/// Random field with independent N(0, 1) mode coefficients drawn from `rng`.
std::vector<double> smooth_random_field(const Grid& grid, double alpha, std::size_t modes,
                                        Rng& rng);

/// T <- T + c_T * field. S is left alone.
FireState perturb_additive(FireState state, std::span<const double> field, double c_T);

/// Spatial warp: T(x, y) <- T(x + c_x ux, y + c_y uy) by bilinear
/// interpolation; samples outside the domain take T_a (and S = 1).
FireState perturb_shift(const FireState& state, std::span<const double> shift_x,
                        std::span<const double> shift_y, double c_x, double c_y, double T_a);

struct Ensemble {
  std::vector<FireState> members;

  std::size_t size() const { return members.size(); }
  const Grid& grid() const { return members.front().grid; }
  void validate() const;
};

/// Additive temperature perturbation followed by an independent warp per
/// member. Member k only draws from `seed` children indexed by k.
Ensemble init_ensemble(const FireState& comparison, std::size_t N, const SmoothFieldParams& params,
                       double T_a, const Seed& seed);

/// Applies the initialization perturbation with every magnitude scaled by
/// `fraction` to each member.
Ensemble reperturb(Ensemble ensemble, const SmoothFieldParams& params, double fraction, double T_a,
                   const Seed& seed);

FireState perturb_member(const FireState& state, const SmoothFieldParams& params, double T_a,
                         const Seed& member_seed);

FireState ensemble_mean(const Ensemble& ensemble);
/// Pointwise sample variance of T (N - 1 normalization), averaged over cells.
double mean_temperature_variance(const Ensemble& ensemble);

}  // namespace wildfire
