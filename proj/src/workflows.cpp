#include "wildfire/workflows.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wildfire/enkf.hpp"
#include "wildfire/front.hpp"
#include "wildfire/snapshot.hpp"

namespace wildfire {

MemberDivergenceError::MemberDivergenceError(const DivergenceError& cause, std::string run,
                                             std::size_t cycle)
    : DivergenceError(run + " diverged in cycle " + std::to_string(cycle) + ": " + cause.what(),
                      cause.time(), cause.cell()),
      run_(std::move(run)),
      cycle_(cycle) {}

FireState initial_state(const ExperimentConfig& cfg, double ignition_offset_x) {
  const auto& m = cfg.model;
  FireState state = FireState::uniform(cfg.grid, m.T_a, 1.0);
  if (cfg.fuel.break_width > 0.0 || cfg.fuel.noise > 0.0) {
    auto rng = Seed(cfg.seed).child("fuel").rng();
    state = apply_fuel_break_and_noise(std::move(state), cfg.fuel.break_width, cfg.fuel.noise, rng);
  }
  const auto& ig = cfg.ignition;
  if (ig.shape == IgnitionSpec::Shape::gaussian)
    return ignite_gaussian_1d(std::move(state), ig.center[0] + ignition_offset_x, ig.sigma,
                              ig.temperature, m.T_a);
  return ignite_square_2d(std::move(state), {ig.center[0] + ignition_offset_x, ig.center[1]}, ig.side,
                          ig.temperature);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::size_t default_cadence(const ExperimentConfig& cfg) {
  if (cfg.snapshot_every > 0) return cfg.snapshot_every;
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt));
  return std::max<std::size_t>(1, steps / 100);
}

std::string status_name(WaveStatus s) {
  return s == WaveStatus::sustained ? "sustained" : "no sustained wave";
}

void write_calibration_files(const CalibrationReport& rep, const ExperimentConfig& cfg,
                             const FireState& final_state, const std::filesystem::path& dir) {
  ensure_dir(dir);
  nlohmann::json j;
  j["status"] = status_name(rep.status);
  if (!rep.reason.empty()) j["reason"] = rep.reason;
  j["diffusion_mode"] = std::string(to_string(rep.diffusion));
  if (rep.initial_fit) j["identified"] = {{"B", rep.initial_fit->B}, {"C", rep.initial_fit->C}};
  if (rep.initial_A) j["identified"]["A"] = *rep.initial_A;
  const auto& m = cfg.model;
  j["coefficients"] = {{"k", m.k}, {"A", m.A}, {"B", m.B}, {"C", m.C}, {"C_S", m.C_S},
                       {"T_a", m.T_a}, {"T_0", m.T_0}};
  j["nondimensional"] = {{"lambda", rep.nondim.lambda}, {"beta", rep.nondim.beta}};
  j["natural_scales"] = {{"T1", rep.natural.T1}, {"x1", rep.natural.x1}, {"t1", rep.natural.t1}};
  if (rep.measured)
    j["measured"] = {{"Tmax", rep.measured->Tmax}, {"width", rep.measured->width},
                     {"speed", rep.measured->speed}, {"displacement", rep.displacement},
                     {"elapsed", rep.elapsed}};
  if (rep.dimensionless_wave)
    j["dimensionless_wave"] = {{"Tmax", rep.dimensionless_wave->Tmax},
                               {"width", rep.dimensionless_wave->width},
                               {"speed", rep.dimensionless_wave->speed}};
  if (rep.recovered)
    j["recovered_scales"] = {{"T1", rep.recovered->T1}, {"x1", rep.recovered->x1}, {"t1", rep.recovered->t1}};
  j["stability"] = {{"dt_limit", rep.stability.dt_limit},
                    {"diffusion_stable", rep.stability.diffusion_stable},
                    {"front_resolution", rep.stability.front_resolution},
                    {"note", rep.stability.note}};
  open_out(dir / "calibration.json") << j.dump(2) << '\n';

  auto table = open_out(dir / "calibration.csv");
  table << "quantity,measured,target\n";
  auto row = [&](const char* name, std::optional<double> measured, std::optional<double> target) {
    table << name << ',';
    if (measured) table << *measured;
    table << ',';
    if (target) table << *target;
    table << '\n';
  };
  const auto& cal = cfg.calibration;
  auto tgt = [&](std::optional<double> CalibrationSpec::*field) {
    return cal ? (*cal).*field : std::nullopt;
  };
  std::optional<double> Tmax, width, speed, disp;
  if (rep.measured) {
    Tmax = rep.measured->Tmax;
    width = rep.measured->width;
    speed = rep.measured->speed;
    disp = rep.displacement;
  }
  row("Tmax", Tmax, tgt(&CalibrationSpec::target_Tmax));
  row("width", width, tgt(&CalibrationSpec::target_width));
  row("speed", speed, tgt(&CalibrationSpec::target_speed));
  row("displacement", disp, tgt(&CalibrationSpec::target_displacement));

  auto fronts = open_out(dir / "fronts.csv");
  fronts << "time,front_x\n";
  for (std::size_t k = 0; k < rep.front_times.size(); ++k)
    fronts << rep.front_times[k] << ',' << rep.front_positions[k] << '\n';

  auto profile = open_out(dir / "profile.csv");
  profile << "x,T,S\n";
  for (std::size_t i = 0; i < final_state.grid.nx; ++i)
    profile << final_state.grid.x(i) << ',' << final_state.T[i] << ',' << final_state.S[i] << '\n';
}

}  // namespace

CalibrationReport run_calibrate_1d(const ExperimentConfig& cfg,
                                   const std::optional<std::filesystem::path>& out) {
  if (cfg.grid.dims != 1) throw ConfigError("calibrate1d requires a 1D grid");
  const auto& m = cfg.model;
  CalibrationReport rep;
  rep.diffusion = m.diffusion;
  if (cfg.calibration) {
    rep.initial_fit = identify_BC(cfg.calibration->T_i, cfg.calibration->T_c, m.T_a, m.T_0);
    rep.initial_A = identify_A(rep.initial_fit->C, cfg.calibration->t_c);
  }
  rep.nondim = nondim_params(m);
  rep.natural = natural_scales(m);

  const FireState start = initial_state(cfg);
  const double T_peak = *std::max_element(start.T.begin(), start.T.end());
  rep.stability = check_stability(m, cfg.grid, cfg.dt, T_peak);

  const std::size_t cadence = default_cadence(cfg);
  const Trajectory traj = run(start, m, cfg.t_end, cfg.dt, cadence);
  WaveOptions opt;
  opt.T_a = m.T_a;
  const WaveMeasurement wave = measure_wave(traj, opt);
  rep.status = wave.status;
  rep.reason = wave.reason;
  rep.front_times = wave.times;
  rep.front_positions = wave.front_positions;
  rep.elapsed = traj.snapshots.back().time - traj.snapshots.front().time;
  if (wave.metrics) {
    rep.measured = wave.metrics;
    rep.displacement = wave.displacement;
  }

  if (rep.measured && m.diffusion == DiffusionMode::linear) {
    // Same mesh in dimensionless units; forward Euler maps onto it exactly.
    const Scales& s = rep.natural;
    FireState nd = start;
    nd.grid = Grid::line(cfg.grid.nx, cfg.grid.dx / s.x1);
    for (auto& T : nd.T) T = (T - m.T_a) / s.T1;
    nd.time = start.time / s.t1;
    const auto nd_coeffs = dimensionless_coefficients(rep.nondim);
    const Trajectory nd_traj = run(nd, nd_coeffs, cfg.t_end / s.t1, cfg.dt / s.t1, cadence);
    WaveOptions nd_opt;
    nd_opt.T_a = 0.0;
    nd_opt.min_peak = opt.min_peak / s.T1;
    const auto nd_wave = measure_wave(nd_traj, nd_opt);
    if (nd_wave.metrics) {
      rep.dimensionless_wave = nd_wave.metrics;
      rep.recovered = scales_from_wave(*nd_wave.metrics, *rep.measured);
    }
  }

  if (out) write_calibration_files(rep, cfg, traj.snapshots.back(), *out);
  return rep;
}

FireState run_simulation(const ExperimentConfig& cfg, const std::optional<std::filesystem::path>& out) {
  FireState state = initial_state(cfg);
  if (!out || cfg.snapshot_every == 0) {
    state = advance(std::move(state), cfg.model, cfg.t_end, cfg.dt);
  } else {
    ensure_dir(*out);
    const auto traj = run(state, cfg.model, cfg.t_end, cfg.dt, cfg.snapshot_every);
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
      std::ostringstream name;
      name << "snapshot_" << std::setw(5) << std::setfill('0') << k << ".bin";
      write_snapshot(traj.snapshots[k], *out / name.str());
    }
    state = traj.snapshots.back();
  }
  if (out) {
    ensure_dir(*out);
    write_snapshot(state, *out / "final.bin");
  }
  return state;
}

void advance_ensemble(Ensemble& ensemble, const ModelCoefficients& coeffs, double t_end, double dt,
                      std::size_t threads, std::size_t cycle) {
  const std::size_t N = ensemble.size();
  std::vector<std::exception_ptr> errors(N);
  auto work = [&](std::size_t k) {
    try {
      ensemble.members[k] = advance(std::move(ensemble.members[k]), coeffs, t_end, dt);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  std::size_t workers = threads == 0 ? std::thread::hardware_concurrency() : threads;
  workers = std::clamp<std::size_t>(workers, 1, N);
  if (workers == 1) {
    for (std::size_t k = 0; k < N; ++k) work(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < N; k += workers) work(k);
      });
  }

  for (std::size_t k = 0; k < N; ++k) {
    if (!errors[k]) continue;
    try {
      std::rethrow_exception(errors[k]);
    } catch (const DivergenceError& e) {
      throw MemberDivergenceError(e, "ensemble member " + std::to_string(k), cycle);
    }
  }
}

namespace {

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t p = 0; p < a.size(); ++p) s += (a[p] - b[p]) * (a[p] - b[p]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

FireState advance_named(FireState s, const ExperimentConfig& cfg, double t_end, const char* name,
                        std::size_t cycle) {
  try {
    return advance(std::move(s), cfg.model, t_end, cfg.dt);
  } catch (const DivergenceError& e) {
    throw MemberDivergenceError(e, name, cycle);
  }
}

void write_contours(const std::filesystem::path& path, const FireState& mean, const FireState& reference,
                    const FireState& comparison, double level) {
  auto out = open_out(path);
  out << "field,x,y\n";
  auto emit = [&](const char* label, const FireState& s) {
    for (const auto& p : contour_midpoints(s.T, s.grid, level)) out << label << ',' << p[0] << ',' << p[1] << '\n';
  };
  emit("mean", mean);
  emit("reference", reference);
  emit("comparison", comparison);
}

}  // namespace

std::string metrics_csv(const std::vector<CycleReport>& cycles) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "cycle,time,rmse_prior,rmse_posterior,front_prior,front_posterior,front_comparison,"
         "variance_prior,variance_posterior,reference_fuel\n";
  for (const auto& c : cycles)
    out << c.cycle << ',' << c.time << ',' << c.rmse_prior << ',' << c.rmse_posterior << ','
        << c.front_prior << ',' << c.front_posterior << ',' << c.front_comparison << ','
        << c.variance_prior << ',' << c.variance_posterior << ',' << c.reference_fuel << '\n';
  return out.str();
}

TwinResult run_twin_experiment(const ExperimentConfig& cfg, const TwinOptions& options) {
  if (cfg.grid.dims != 2) throw ConfigError("assimilate requires a 2D grid");
  const auto& a = cfg.assimilation;
  const auto& m = cfg.model;
  const Seed root(cfg.seed);
  const Grid& grid = cfg.grid;
  const double level = m.T_a + a.front_level;

  TwinResult res;
  res.comparison = initial_state(cfg);
  res.reference = initial_state(cfg, a.reference_offset);
  res.ensemble = init_ensemble(res.comparison, cfg.ensemble_size, cfg.perturbation, m.T_a,
                               root.child("ensemble"));
  if (options.out) ensure_dir(*options.out);

  for (std::size_t c = 1; c <= a.cycles; ++c) {
    const auto wall_start = std::chrono::steady_clock::now();
    const double t = res.comparison.time + a.cycle_length;
    CycleReport rep;
    rep.cycle = c;
    rep.time = t;

    advance_ensemble(res.ensemble, m, t, cfg.dt, cfg.threads, c);
    res.reference = advance_named(std::move(res.reference), cfg, t, "reference", c);
    res.comparison = advance_named(std::move(res.comparison), cfg, t, "comparison", c);

    const FireState prior_mean = ensemble_mean(res.ensemble);
    rep.rmse_prior = rmse(prior_mean.T, res.reference.T);
    rep.front_prior = front_distance(prior_mean.T, res.reference.T, grid, level);
    rep.variance_prior = mean_temperature_variance(res.ensemble);

    const auto spec = strided_observations(res.reference, a.stride, a.variance);
    EnsembleMatrix U = to_matrix(res.ensemble);
    U = analysis(U, spec, AnalysisConfig{a.rho, true, root.child("data", c)});
    if (a.rho > 0.0) U = regularize(U, grid, a.rho, root.child("regularize", c));
    res.ensemble = from_matrix(U, grid, t, true);

    res.posterior_mean = ensemble_mean(res.ensemble);
    rep.rmse_posterior = rmse(res.posterior_mean.T, res.reference.T);
    rep.front_posterior = front_distance(res.posterior_mean.T, res.reference.T, grid, level);
    rep.variance_posterior = mean_temperature_variance(res.ensemble);
    rep.front_comparison = front_distance(res.comparison.T, res.reference.T, grid, level);
    rep.reference_fuel = std::accumulate(res.reference.S.begin(), res.reference.S.end(), 0.0);

    if (options.out && options.snapshot_cycles > 0 && c % options.snapshot_cycles == 0) {
      std::ostringstream tag;
      tag << "cycle_" << std::setw(3) << std::setfill('0') << c;
      write_snapshot(prior_mean, *options.out / (tag.str() + "_prior_mean.bin"));
      write_snapshot(res.posterior_mean, *options.out / (tag.str() + "_posterior_mean.bin"));
      write_snapshot(res.reference, *options.out / (tag.str() + "_reference.bin"));
      write_snapshot(res.comparison, *options.out / (tag.str() + "_comparison.bin"));
    }

    res.ensemble = reperturb(std::move(res.ensemble), cfg.perturbation, a.reperturb, m.T_a,
                             root.child("reperturb", c));

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    res.cycles.push_back(rep);
    if (options.on_cycle) options.on_cycle(rep);
  }

  if (options.out) {
    open_out(*options.out / "metrics.csv") << metrics_csv(res.cycles);
    auto timing = open_out(*options.out / "timing.csv");
    timing << "cycle,wall_seconds\n";
    for (const auto& c : res.cycles) timing << c.cycle << ',' << c.wall_seconds << '\n';
    if (!res.cycles.empty()) {
      write_snapshot(res.posterior_mean, *options.out / "final_mean.bin");
      write_snapshot(res.reference, *options.out / "final_reference.bin");
      write_snapshot(res.comparison, *options.out / "final_comparison.bin");
      write_contours(*options.out / "final_contours.csv", res.posterior_mean, res.reference,
                     res.comparison, level);
    }
  }
  return res;
}

}  // namespace wildfire
