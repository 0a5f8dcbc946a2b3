#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "wildfire/ensemble.hpp"
#include "wildfire/fields.hpp"
#include "wildfire/kinetics.hpp"

namespace wildfire {

/// Malformed or invalid experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct IgnitionSpec {
  enum class Shape { gaussian, square };
  Shape shape = Shape::square;
  std::array<double, 2> center{0.0, 0.0};  ///< m; y ignored for gaussian
  double sigma = 0.0;                      ///< gaussian width, m
  double side = 0.0;                       ///< square side, m
  double temperature = 1200.0;  ///< square: absolute T; gaussian: amplitude above T_a
};

struct FuelSpec {
  double break_width = 0.0;
  double noise = 0.0;
};

struct CalibrationSpec {
  double T_i = 0.0;
  double T_c = 0.0;
  double t_c = 0.0;
  std::optional<double> target_Tmax;
  std::optional<double> target_width;
  std::optional<double> target_speed;
  std::optional<double> target_displacement;  ///< m over the whole run
};

struct AssimilationSpec {
  double cycle_length = 100.0;
  std::size_t cycles = 10;
  std::size_t stride = 5;
  double variance = 10.0;
  double rho = 750.0;
  double reperturb = 0.05;
  double reference_offset = 100.0;  ///< m, along +x
  double front_level = 400.0;       ///< contour level above T_a, K
};

struct ExperimentConfig {
  Grid grid;
  double dt = 1.0;
  double t_end = 0.0;
  std::size_t snapshot_every = 0;  ///< steps between trajectory snapshots
  ModelCoefficients model;
  std::optional<CalibrationSpec> calibration;
  IgnitionSpec ignition;
  FuelSpec fuel;
  std::size_t ensemble_size = 50;
  SmoothFieldParams perturbation;
  AssimilationSpec assimilation;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  std::size_t snapshot_cycles = 0;  ///< write ensemble snapshots every k cycles (0: never)
  std::size_t threads = 0;          ///< 0: hardware concurrency

  void validate() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const std::string& text);

}  // namespace wildfire
