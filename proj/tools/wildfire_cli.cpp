// Command-line front end: calibrate1d, simulate, assimilate, inspect.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "wildfire/config.hpp"
#include "wildfire/snapshot.hpp"
#include "wildfire/workflows.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitIo = 4;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> snapshots;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "Experiment configuration (JSON)")->required();
  cmd->add_option("--seed", o.seed, "Root seed; overrides the configuration");
  cmd->add_option("--out", o.out, "Output directory; overrides the configuration");
  cmd->add_option("--snapshots", o.snapshots, "Write snapshots every k cycles (assimilate) or k steps");
}

wildfire::ExperimentConfig resolve(const CommonOptions& o) {
  auto cfg = wildfire::load_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
  return cfg;
}

int calibrate(const CommonOptions& o) {
  auto cfg = resolve(o);
  if (o.snapshots) cfg.snapshot_every = *o.snapshots;
  const auto rep = wildfire::run_calibrate_1d(cfg, cfg.output_dir);
  std::cout << std::setprecision(6);
  if (rep.initial_fit)
    std::cout << "identified   B = " << rep.initial_fit->B << " K, C = " << rep.initial_fit->C
              << " 1/K, A = " << *rep.initial_A << " K/s\n";
  std::cout << "nondim       lambda = " << rep.nondim.lambda << ", beta = " << rep.nondim.beta << '\n'
            << "diffusion    " << wildfire::to_string(rep.diffusion) << '\n';
  if (!rep.stability.note.empty()) std::cout << "stability    " << rep.stability.note << '\n';
  if (rep.measured) {
    std::cout << "wave         Tmax = " << rep.measured->Tmax << " K, width = " << rep.measured->width
              << " m, speed = " << rep.measured->speed << " m/s, displacement = " << rep.displacement
              << " m in " << rep.elapsed << " s\n";
  } else {
    std::cout << "status       no sustained wave (" << rep.reason << ")\n";
  }
  std::cout << "report       " << (cfg.output_dir / "calibration.json").string() << '\n';
  return 0;
}

int simulate(const CommonOptions& o) {
  auto cfg = resolve(o);
  if (o.snapshots) cfg.snapshot_every = *o.snapshots;
  const auto final_state = wildfire::run_simulation(cfg, cfg.output_dir);
  std::cout << "simulated to t = " << final_state.time << " s; wrote "
            << (cfg.output_dir / "final.bin").string() << '\n';
  return 0;
}

int assimilate(const CommonOptions& o) {
  auto cfg = resolve(o);
  wildfire::TwinOptions opts;
  opts.out = cfg.output_dir;
  opts.snapshot_cycles = o.snapshots.value_or(cfg.snapshot_cycles);
  opts.on_cycle = [](const wildfire::CycleReport& r) {
    std::cout << std::fixed << std::setprecision(2) << "cycle " << std::setw(3) << r.cycle
              << "  t=" << r.time << " s  rmse " << r.rmse_prior << " -> " << r.rmse_posterior
              << " K  front " << r.front_prior << " -> " << r.front_posterior << " m  (no DA "
              << r.front_comparison << " m)  " << r.wall_seconds << " s" << std::endl;
  };
  wildfire::run_twin_experiment(cfg, opts);
  std::cout << "metrics in " << (cfg.output_dir / "metrics.csv").string() << '\n';
  return 0;
}

int inspect(const std::string& snapshot, const std::optional<std::string>& out) {
  const auto state = wildfire::read_snapshot(snapshot);
  const auto& g = state.grid;
  std::cerr << "dims=" << g.dims << " nx=" << g.nx << " ny=" << g.ny << " dx=" << g.dx
            << " time=" << state.time << '\n';
  if (out) {
    wildfire::write_snapshot_csv(state, *out);
  } else {
    std::cout << "i,j,x,y,T,S\n" << std::setprecision(17);
    for (std::size_t j = 0; j < g.ny; ++j)
      for (std::size_t i = 0; i < g.nx; ++i) {
        const auto p = g.index(i, j);
        std::cout << i << ',' << j << ',' << g.x(i) << ',' << g.y(j) << ',' << state.T[p] << ','
                  << state.S[p] << '\n';
      }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-equation wildfire model with ensemble Kalman filter assimilation"};
  app.require_subcommand(1);

  CommonOptions cal_opts, sim_opts, da_opts;
  auto* cal = app.add_subcommand("calibrate1d", "Identify coefficients and measure the 1D traveling wave");
  add_common(cal, cal_opts);
  auto* sim = app.add_subcommand("simulate", "Run a free simulation from the configured ignition");
  add_common(sim, sim_opts);
  auto* da = app.add_subcommand("assimilate", "Run the twin data-assimilation experiment");
  add_common(da, da_opts);

  std::string snapshot;
  std::optional<std::string> csv_out;
  auto* ins = app.add_subcommand("inspect", "Convert a binary snapshot to CSV");
  ins->add_option("snapshot", snapshot, "Snapshot file")->required();
  ins->add_option("--out", csv_out, "CSV output path (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*cal) return calibrate(cal_opts);
    if (*sim) return simulate(sim_opts);
    if (*da) return assimilate(da_opts);
    if (*ins) return inspect(snapshot, csv_out);
  } catch (const wildfire::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wildfire::DivergenceError& e) {
    std::cerr << "numerical divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const wildfire::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
