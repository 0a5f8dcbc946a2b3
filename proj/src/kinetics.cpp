#include "wildfire/kinetics.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace wildfire {

std::string_view to_string(DiffusionMode mode) {
  return mode == DiffusionMode::linear ? "linear" : "cubic";
}

DiffusionMode diffusion_mode_from_string(std::string_view name) {
  if (name == "linear") return DiffusionMode::linear;
  if (name == "cubic") return DiffusionMode::cubic;
  throw std::invalid_argument("unknown diffusion mode '" + std::string(name) +
                              "' (expected linear or cubic)");
}

void ModelCoefficients::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string("coefficient ") + name + " must be positive");
  };
  positive(k, "k");
  positive(A, "A");
  positive(B, "B");
  positive(C, "C");
  positive(C_S, "C_S");
  if (!std::isfinite(T_a) || !std::isfinite(T_0))
    throw std::invalid_argument("temperatures T_a and T_0 must be finite");
}

double reaction_rate(double T, double B, double T_0) {
  if (!(T > T_0)) return 0.0;
  return std::exp(-B / (T - T_0));
}

double heat_balance(double T, double B, double C, double T_a, double T_0) {
  return reaction_rate(T, B, T_0) - C * (T - T_a);
}

EquilibriumSet equilibrium_points(double B, double C, double T_a, double T_0,
                                  const RootScan& scan) {
  auto f = [&](double T) { return heat_balance(T, B, C, T_a, T_0); };

  std::vector<double> roots;
  const bool degenerate_ambient = (T_0 == T_a);
  if (degenerate_ambient) roots.push_back(T_a);

  double lo = degenerate_ambient ? T_a : T_0;
  double f_lo = f(lo);
  for (double hi = lo + scan.step; hi <= scan.T_max + 0.5 * scan.step; hi += scan.step) {
    const double f_hi = f(hi);
    if (f_hi == 0.0) {
      roots.push_back(hi);
    } else if (f_lo != 0.0 && std::signbit(f_lo) != std::signbit(f_hi)) {
      double a = lo, b = hi, fa = f_lo;
      while (b - a > scan.tolerance) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (fm == 0.0) {
          a = b = mid;
          break;
        }
        if (std::signbit(fm) == std::signbit(fa)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    lo = hi;
    f_lo = f_hi;
  }

  EquilibriumSet out;
  out.root_count = static_cast<int>(roots.size());
  const double h = scan.derivative_step;
  for (double r : roots) {
    const bool stable = (f(r + h) - f(r - h)) / (2.0 * h) < 0.0;
    if (!stable) {
      if (!out.Ti) out.Ti = r;
    } else if (!out.Ti) {
      if (!out.Tp) out.Tp = r;
    } else if (!out.Tc) {
      out.Tc = r;
    }
  }
  return out;
}

ArrheniusFit identify_BC(double Ti, double Tc, double T_a, double T_0) {
  if (!(T_0 <= T_a && T_a < Ti && Ti < Tc))
    throw std::invalid_argument("identify_BC requires T_0 <= T_a < Ti < Tc");
  ArrheniusFit fit;
  fit.B = std::log((Ti - T_a) / (Tc - T_a)) / (1.0 / (Tc - T_0) - 1.0 / (Ti - T_0));
  fit.C = std::exp(-fit.B / (Ti - T_0)) / (Ti - T_a);
  return fit;
}

double identify_A(double C, double t_c) {
  if (!(C > 0.0) || !(t_c > 0.0))
    throw std::invalid_argument("identify_A requires positive C and cooling time");
  return 1.0 / (C * t_c);
}

NondimParams nondim_params(const ModelCoefficients& c) {
  return {c.C * c.B, c.B * c.C_S / c.A};
}

ModelCoefficients rescale_coefficients(const NondimParams& nd, const Scales& s, double T_a,
                                       DiffusionMode mode) {
  if (!(s.T1 > 0.0 && s.x1 > 0.0 && s.t1 > 0.0))
    throw std::invalid_argument("rescale_coefficients requires positive scales");
  ModelCoefficients c;
  c.A = s.T1 / s.t1;
  c.B = s.T1;
  c.C = nd.lambda / s.T1;
  c.C_S = nd.beta / s.t1;
  c.k = mode == DiffusionMode::linear ? s.x1 * s.x1 / s.t1
                                      : s.x1 * s.x1 / (s.T1 * s.T1 * s.T1 * s.t1);
  c.T_a = T_a;
  c.T_0 = T_a;
  c.diffusion = mode;
  return c;
}

Scales natural_scales(const ModelCoefficients& c) {
  return {c.B, std::sqrt(c.k * c.B / c.A), c.B / c.A};
}

ModelCoefficients dimensionless_coefficients(const NondimParams& nd) {
  ModelCoefficients c;
  c.k = 1.0;
  c.A = 1.0;
  c.B = 1.0;
  c.C = nd.lambda;
  c.C_S = nd.beta;
  c.T_a = 0.0;
  c.T_0 = 0.0;
  return c;
}

Scales scales_from_wave(const WaveMetrics& nd, const WaveMetrics& phys) {
  for (double v : {nd.Tmax, nd.width, nd.speed, phys.Tmax, phys.width, phys.speed})
    if (!(v > 0.0)) throw std::invalid_argument("scales_from_wave requires positive metrics");
  Scales s;
  s.T1 = phys.Tmax / nd.Tmax;
  s.x1 = phys.width / nd.width;
  s.t1 = s.x1 * nd.speed / phys.speed;
  return s;
}

}  // namespace wildfire
