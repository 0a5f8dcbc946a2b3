#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string_view>

namespace wildfire {

/// How the heat-diffusion term uses k.
///
/// `linear` is div(k grad T) with k in m^2/s. `cubic` is div(k T^3 grad T),
/// the radiative form whose k carries units m^2 s^-1 K^-3.
enum class DiffusionMode { linear, cubic };

std::string_view to_string(DiffusionMode mode);
DiffusionMode diffusion_mode_from_string(std::string_view name);

/// Homogenized coefficients of the two-equation fire model.
struct ModelCoefficients {
  double k = 0.0;    ///< diffusivity
  double A = 0.0;    ///< temperature rise rate at full burn, K/s
  double B = 0.0;    ///< Arrhenius activation temperature, K
  double C = 0.0;    ///< scaled heat-loss coefficient, 1/K
  double C_S = 0.0;  ///< fuel disappearance rate, 1/s
  double T_a = 300.0;
  double T_0 = 300.0;  ///< reaction cutoff; r(T) = 0 for T <= T_0
  std::array<double, 2> wind{0.0, 0.0};
  DiffusionMode diffusion = DiffusionMode::linear;

  /// Throws std::invalid_argument unless k, A, B, C, C_S are positive and finite.
  void validate() const;
};

struct NondimParams {
  double lambda = 0.0;
  double beta = 0.0;
};

struct Scales {
  double T1 = 1.0;  ///< K
  double x1 = 1.0;  ///< m
  double t1 = 1.0;  ///< s
};

/// Roots of the heat balance f(T) = r(T) - C (T - T_a).
struct EquilibriumSet {
  std::optional<double> Tp;  ///< stable, low
  std::optional<double> Ti;  ///< unstable, auto-ignition
  std::optional<double> Tc;  ///< stable, combustion
  int root_count = 0;

  /// True when the full low / ignition / combustion triple was found.
  bool complete() const { return Tp && Ti && Tc; }
};

struct RootScan {
  double T_max = 3000.0;
  double step = 1.0;
  double tolerance = 1e-6;
  double derivative_step = 1e-3;
};

/// Modified Arrhenius rate exp(-B / (T - T_0)), zero at and below T_0.
double reaction_rate(double T, double B, double T_0);
inline double reaction_rate(double T, const ModelCoefficients& c) {
  return reaction_rate(T, c.B, c.T_0);
}

double heat_balance(double T, double B, double C, double T_a, double T_0);

EquilibriumSet equilibrium_points(double B, double C, double T_a, double T_0,
                                  const RootScan& scan = {});

struct ArrheniusFit {
  double B = 0.0;
  double C = 0.0;
};

/// Solves f(Ti) = f(Tc) = 0 for B and C. Requires T_0 <= T_a < Ti < Tc.
ArrheniusFit identify_BC(double Ti, double Tc, double T_a, double T_0);

/// A from the 1/e cooling time: A C t_c = 1.
double identify_A(double C, double t_c);

NondimParams nondim_params(const ModelCoefficients& coeffs);

/// Physical coefficients reproducing the dimensionless system with the given
/// scales. The returned set has T_0 = T_a and no wind.
ModelCoefficients rescale_coefficients(const NondimParams& nd, const Scales& scales, double T_a,
                                       DiffusionMode mode = DiffusionMode::linear);

/// Scales natural to a coefficient set in linear mode:
/// T1 = B, t1 = B / A, x1 = sqrt(k B / A).
Scales natural_scales(const ModelCoefficients& coeffs);

/// Coefficients of the dimensionless system (T_a = T_0 = 0, k = A = B = 1).
ModelCoefficients dimensionless_coefficients(const NondimParams& nd);

/// Shape of a traveling combustion wave: peak rise above ambient (K), width
/// at 50 % of the peak (m), and front speed (m/s).
struct WaveMetrics {
  double Tmax = 0.0;
  double width = 0.0;
  double speed = 0.0;
};

/// T1 = Tmax / Tmax~, x1 = w / w~, t1 = x1 v~ / v, so that v = (x1 / t1) v~.
Scales scales_from_wave(const WaveMetrics& nondim_wave, const WaveMetrics& physical_wave);

}  // namespace wildfire
