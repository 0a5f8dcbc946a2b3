#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildfire/fields.hpp"
#include "wildfire/kinetics.hpp"
#include "wildfire/seed.hpp"

namespace wildfire {

/// Raised when a time step produces a non-finite value.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double time, std::size_t cell)
      : std::runtime_error(what), time_(time), cell_(cell) {}
  double time() const { return time_; }
  std::size_t cell() const { return cell_; }

 private:
  double time_;
  std::size_t cell_;
};

struct Tendencies {
  std::vector<double> dT;
  std::vector<double> dS;
};

/// Right-hand side of the heat and fuel equations.
///
/// Diffusion by second-order central differences, advection by first-order
/// upwinding on the sign of each wind component, zero-gradient boundaries via
/// reflected ghost cells.
Tendencies tendencies(const FireState& state, const ModelCoefficients& coeffs);

/// Diffusion term alone, written into `out` (length = cells).
void diffusion_term(const FireState& state, const ModelCoefficients& coeffs,
                    std::vector<double>& out);

/// One forward Euler step; S is clamped to [0, 1] afterwards.
FireState step_euler(const FireState& state, const ModelCoefficients& coeffs, double dt);

/// In-place variant used by long runs; `scratch` is reused across calls.
void step_euler_inplace(FireState& state, const ModelCoefficients& coeffs, double dt,
                        Tendencies& scratch);

struct StabilityReport {
  double dt_limit = 0.0;          ///< dx^2 / (4 k_eff)
  bool diffusion_stable = true;   ///< dt <= dt_limit
  double front_resolution = 0.0;  ///< sqrt(k_eff B / A) / dx, cells per front length
  std::string note;
};

/// Explicit-diffusion stability guard. `T_peak` sets k_eff = k T_peak^3 in
/// cubic mode. A front resolution well below one cell is the regime in which
/// explicit runs were seen to go unstable as k/dx shrinks; it is reported only.
StabilityReport check_stability(const ModelCoefficients& coeffs, const Grid& grid, double dt,
                                double T_peak);

struct Trajectory {
  std::vector<FireState> snapshots;
};

/// Advances `state` to `t_end` with fixed step `dt` (the last step is
/// shortened to land on t_end). Records the initial state, every
/// `snapshot_every`-th step, and the final state.
Trajectory run(const FireState& state, const ModelCoefficients& coeffs, double t_end, double dt,
               std::size_t snapshot_every);

/// Same integration as run() without recording snapshots.
FireState advance(FireState state, const ModelCoefficients& coeffs, double t_end, double dt);

/// T = Tc exp(-(x - x0)^2 / sigma^2) + T_a at cell centers.
FireState ignite_gaussian_1d(FireState state, double x0, double sigma, double Tc, double T_a);

/// Sets T = T_ign in cells whose centers lie strictly inside the square.
FireState ignite_square_2d(FireState state, std::array<double, 2> center, double side,
                           double T_ign);

/// S = 1, then 0 in a vertical strip of `break_width` through the domain
/// center, then a per-cell uniform shift in [-noise, noise], clamped to [0, 1].
FireState apply_fuel_break_and_noise(FireState state, double break_width, double noise_half_range,
                                     Rng& rng);

enum class WaveStatus { sustained, no_sustained_wave };

struct WaveMeasurement {
  WaveStatus status = WaveStatus::no_sustained_wave;
  std::optional<WaveMetrics> metrics;
  /// Leading-edge crossing position per snapshot (NaN where none).
  std::vector<double> front_positions;
  std::vector<double> times;
  /// Front position at the last snapshot minus the first.
  double displacement = 0.0;
  std::string reason;
};

struct WaveOptions {
  double reference_level = 0.5;
  double T_a = 300.0;
  /// Final peak rise below this (K) counts as an extinguished wave.
  double min_peak = 50.0;
};

/// Measures Tmax, 50 % width, and front speed of a 1D traveling wave.
///
/// The leading edge is the outermost (largest x) crossing of
/// T_a + level * Tmax; speed is its least-squares slope over the second half
/// of the trajectory. Width is taken around the final peak.
WaveMeasurement measure_wave(const Trajectory& trajectory, const WaveOptions& options);

}  // namespace wildfire
