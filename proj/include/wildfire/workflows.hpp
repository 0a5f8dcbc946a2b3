#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildfire/config.hpp"
#include "wildfire/ensemble.hpp"
#include "wildfire/kinetics.hpp"
#include "wildfire/solver.hpp"

namespace wildfire {

/// Divergence inside the twin experiment, tagged with where it happened.
class MemberDivergenceError : public DivergenceError {
 public:
  MemberDivergenceError(const DivergenceError& cause, std::string run, std::size_t cycle);
  const std::string& run_name() const { return run_; }
  std::size_t cycle() const { return cycle_; }

 private:
  std::string run_;
  std::size_t cycle_;
};

/// Initial state from the configured ignition and fuel map. The fuel noise is
/// drawn from the "fuel" child of the root seed, so every run built from the
/// same config shares one fuel map.
FireState initial_state(const ExperimentConfig& cfg, double ignition_offset_x = 0.0);

// ---------------------------------------------------------------------------
// 1D calibration

struct CalibrationReport {
  WaveStatus status = WaveStatus::no_sustained_wave;
  std::string reason;
  DiffusionMode diffusion = DiffusionMode::linear;
  std::optional<ArrheniusFit> initial_fit;  ///< B, C from (T_i, T_c)
  std::optional<double> initial_A;          ///< A from t_c
  NondimParams nondim;
  Scales natural;
  std::optional<WaveMetrics> measured;
  double displacement = 0.0;
  double elapsed = 0.0;  ///< simulated seconds
  std::optional<WaveMetrics> dimensionless_wave;
  std::optional<Scales> recovered;  ///< scales_from_wave(dimensionless, measured)
  StabilityReport stability;
  std::vector<double> front_times;
  std::vector<double> front_positions;
};

/// Identifies B, C, A from the calibration inputs, runs the Gaussian-ignition
/// simulation, and measures the wave. When `out` is set, writes
/// calibration.json, calibration.csv, fronts.csv, and profile.csv there.
CalibrationReport run_calibrate_1d(const ExperimentConfig& cfg,
                                   const std::optional<std::filesystem::path>& out = std::nullopt);

// ---------------------------------------------------------------------------
// Free simulation

/// Runs from the configured initial state to t_end. Writes snapshots to `out`
/// every `snapshot_every` steps when set.
FireState run_simulation(const ExperimentConfig& cfg,
                         const std::optional<std::filesystem::path>& out = std::nullopt);

// ---------------------------------------------------------------------------
// Twin experiment

struct CycleReport {
  std::size_t cycle = 0;
  double time = 0.0;
  double rmse_prior = 0.0;      ///< ensemble-mean T vs reference, K
  double rmse_posterior = 0.0;
  double front_prior = 0.0;     ///< front_distance, m
  double front_posterior = 0.0;
  double front_comparison = 0.0;  ///< no-assimilation run vs reference
  double variance_prior = 0.0;    ///< mean pointwise T variance, K^2
  double variance_posterior = 0.0;
  double reference_fuel = 0.0;    ///< sum of S over the reference run
  double wall_seconds = 0.0;
};

struct TwinOptions {
  std::optional<std::filesystem::path> out;
  std::size_t snapshot_cycles = 0;
  std::function<void(const CycleReport&)> on_cycle;
};

struct TwinResult {
  std::vector<CycleReport> cycles;
  FireState reference;
  FireState comparison;
  Ensemble ensemble;  ///< final analysis ensemble (after reperturbation)
  FireState posterior_mean;  ///< mean after the last analysis, before reperturbation
};

/// Advances every member to t_end. Members are independent and may be spread
/// over `threads` workers without affecting the result.
void advance_ensemble(Ensemble& ensemble, const ModelCoefficients& coeffs, double t_end, double dt,
                      std::size_t threads, std::size_t cycle = 0);

TwinResult run_twin_experiment(const ExperimentConfig& cfg, const TwinOptions& options = {});

/// Deterministic CSV of the cycle metrics (wall time excluded).
std::string metrics_csv(const std::vector<CycleReport>& cycles);

}  // namespace wildfire
