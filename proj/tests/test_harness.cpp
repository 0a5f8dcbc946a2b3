#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "wildfire/front.hpp"
#include "wildfire/snapshot.hpp"
#include "wildfire/workflows.hpp"

using namespace wildfire;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = WILDFIRE_CONFIG_DIR;

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wildfire_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Shrunken twin setup: same physics as the full experiment on a 60 x 60 grid.
ExperimentConfig small_twin() {
  auto cfg = load_config(kConfigs / "twin_2d.json");
  cfg.grid = Grid::plane(60, 60, 2.0);
  cfg.ignition.center = {30.0, 60.0};
  cfg.ignition.side = 16.0;
  cfg.fuel.break_width = 10.0;
  cfg.ensemble_size = 8;
  cfg.perturbation.modes = 8;
  cfg.perturbation.c_x = cfg.perturbation.c_y = 10.0;
  cfg.assimilation.cycles = 3;
  cfg.assimilation.cycle_length = 40.0;
  cfg.assimilation.reference_offset = 10.0;
  cfg.threads = 1;
  cfg.validate();
  return cfg;
}

FireState disc(const Grid& g, double cx, double cy, double r) {
  auto s = FireState::uniform(g, 300.0, 1.0);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i)
      s.T[g.index(i, j)] = 300.0 + 900.0 / (1.0 + std::exp((std::hypot(g.x(i) - cx, g.y(j) - cy) - r) / 2.0));
  return s;
}

}  // namespace

TEST_CASE("configuration file for the twin experiment") {
  const auto cfg = load_config(kConfigs / "twin_2d.json");
  CHECK(cfg.grid == Grid::plane(250, 250, 2.0));
  CHECK(cfg.dt == 1.0);
  CHECK(cfg.t_end == 1000.0);
  CHECK(cfg.model.k == 0.2136);
  CHECK(cfg.model.A == 187.93);
  CHECK(cfg.model.B == 558.49);
  CHECK(cfg.model.C == 4.8372e-5);
  CHECK(cfg.model.C_S == 0.1625);
  CHECK(cfg.model.T_a == 300.0);
  CHECK(cfg.model.T_0 == 300.0);
  CHECK(cfg.model.diffusion == DiffusionMode::linear);
  CHECK(cfg.ignition.shape == IgnitionSpec::Shape::square);
  CHECK(cfg.ignition.center[0] == 100.0);
  CHECK(cfg.ignition.side == 50.0);
  CHECK(cfg.ignition.temperature == 1200.0);
  CHECK(cfg.fuel.break_width == 25.0);
  CHECK(cfg.fuel.noise == 0.3);
  CHECK(cfg.ensemble_size == 50);
  CHECK(cfg.perturbation.c_T == 5.0);
  CHECK(cfg.perturbation.c_x == 150.0);
  CHECK(cfg.perturbation.modes == 32);
  CHECK(cfg.assimilation.cycle_length == 100.0);
  CHECK(cfg.assimilation.cycles == 10);
  CHECK(cfg.assimilation.stride == 5);
  CHECK(cfg.assimilation.variance == 10.0);
  CHECK(cfg.assimilation.rho == 750.0);
  CHECK(cfg.assimilation.reperturb == 0.05);
  CHECK(cfg.seed == 1);
}

TEST_CASE("configuration errors") {
  const auto text = slurp(kConfigs / "twin_2d.json");
  CHECK_THROWS_AS(parse_config(""), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/wildfire.json"), ConfigError);

  auto mutate = [&](const std::string& from, const std::string& to) {
    auto t = text;
    const auto pos = t.find(from);
    REQUIRE(pos != std::string::npos);
    return t.replace(pos, from.size(), to);
  };
  auto message = [](const std::string& t) {
    try {
      parse_config(t);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(mutate("\"dt\": 1.0", "\"dt\": -1.0")).find("dt") != std::string::npos);
  CHECK(message(mutate("\"seed\": 1", "\"seed\": 1, \"sede\": 2")).find("sede") != std::string::npos);
  CHECK(message(mutate("\"rho\": 750.0", "\"rho\": 750.0, \"rh0\": 1")).find("assimilation.rh0") != std::string::npos);
  CHECK(message(mutate("\"linear\"", "\"quartic\"")).find("diffusion") != std::string::npos);
  CHECK(message(mutate("{\n  \"grid\"", "{\n  \"grid\" ,")).find("line 2") != std::string::npos);
}

TEST_CASE("snapshot round trip") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1500.0);
  const auto dir = scratch_dir("snap");
  for (const auto& g : {Grid::plane(250, 250, 2.0), Grid::line(17, 0.3)}) {
    auto s = FireState::uniform(g, 0.0, 0.0, 123.456);
    for (auto& v : s.T) v = u(rng);
    for (auto& v : s.S) v = u(rng) / 1500.0;
    write_snapshot(s, dir / "s.bin");
    CHECK(read_snapshot(dir / "s.bin") == s);
    CHECK(fs::file_size(dir / "s.bin") == 48 + 16 * g.cells());
  }

  const auto bytes = encode_snapshot(FireState::uniform(Grid::plane(4, 4, 1.0), 300.0));
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  CHECK_THROWS_AS(decode_snapshot(truncated), CorruptSnapshotError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad_magic), CorruptSnapshotError);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK_THROWS_AS(decode_snapshot(trailing), CorruptSnapshotError);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.bin"), IoError);

  write_snapshot_csv(FireState::uniform(Grid::plane(3, 3, 1.0), 300.0), dir / "s.csv");
  const auto csv = slurp(dir / "s.csv");
  CHECK(csv.rfind("i,j,x,y,T,S\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
}

TEST_CASE("front distance") {
  const auto g = Grid::plane(80, 80, 2.0);
  const auto a = disc(g, 70.0, 80.0, 30.0);
  CHECK(front_distance(a.T, a.T, g, 700.0) == 0.0);

  const auto b = disc(g, 80.0, 80.0, 30.0);  // 5 cells over
  const double d = front_distance(a.T, b.T, g, 700.0);
  // symmetric mean nearest distance of two circles offset by 10 m is below
  // 10 m; bound it by the exact continuum value within one cell
  double cont = 0.0;
  const int K = 20000;
  for (int k = 0; k < K; ++k) {
    const double th = 2.0 * M_PI * (k + 0.5) / K;
    const double px = 30.0 * std::cos(th) + 10.0, py = 30.0 * std::sin(th);
    cont += std::abs(std::hypot(px, py) - 30.0);
  }
  cont /= K;
  CHECK(std::abs(d - cont) < g.dx);
  CHECK(d > 0.0);

  const auto flat = FireState::uniform(g, 300.0);
  CHECK(front_distance(flat.T, a.T, g, 700.0) == kNoContour);
  CHECK(contour_midpoints(a.T, g, 700.0).size() > 50);
}

TEST_CASE("1D calibration workflow") {
  const auto cfg = load_config(kConfigs / "calibration_1d.json");
  const auto dir = scratch_dir("cal");
  const auto rep = run_calibrate_1d(cfg, dir);
  REQUIRE(rep.status == WaveStatus::sustained);
  CHECK(rep.nondim.lambda == Approx(cfg.model.C * cfg.model.B).epsilon(1e-14));
  CHECK(rep.nondim.beta == Approx(cfg.model.B * cfg.model.C_S / cfg.model.A).epsilon(1e-14));
  REQUIRE(rep.initial_fit);
  CHECK(rep.initial_fit->B == Approx(558.49).epsilon(1e-5));
  CHECK(rep.measured->speed == Approx(0.17).epsilon(0.3));
  REQUIRE(rep.recovered);
  CHECK(rep.recovered->t1 == Approx(rep.natural.t1).epsilon(1e-3));
  CHECK(rep.recovered->x1 == Approx(rep.natural.x1).epsilon(1e-3));
  for (const char* f : {"calibration.json", "calibration.csv", "fronts.csv", "profile.csv"})
    CHECK(fs::exists(dir / f));

  SUBCASE("domain size does not set the speed") {
    auto wide = cfg;
    wide.grid = Grid::line(1000, 2.0);
    wide.ignition.center[0] = 1000.0;
    const auto w = run_calibrate_1d(wide);
    REQUIRE(w.status == WaveStatus::sustained);
    CHECK(std::abs(w.measured->speed / rep.measured->speed - 1.0) < 0.02);
  }

  SUBCASE("cold-boundary variant") {
    const auto cold = run_calibrate_1d(load_config(kConfigs / "calibration_1d_cold.json"));
    CHECK(cold.status == WaveStatus::no_sustained_wave);
    CHECK_FALSE(cold.reason.empty());
  }
}

TEST_CASE("free simulation writes snapshots") {
  auto cfg = small_twin();
  cfg.t_end = 20.0;
  cfg.snapshot_every = 10;
  const auto dir = scratch_dir("sim");
  const auto end = run_simulation(cfg, dir);
  CHECK(end.time == 20.0);
  CHECK(read_snapshot(dir / "final.bin") == end);
  CHECK(read_snapshot(dir / "snapshot_00000.bin") == initial_state(cfg));
  CHECK(fs::exists(dir / "snapshot_00002.bin"));
}

TEST_CASE("ensemble members advance exactly like single runs") {
  const auto cfg = small_twin();
  const auto base = initial_state(cfg);
  auto params = cfg.perturbation;
  const auto ens0 = init_ensemble(base, 4, params, cfg.model.T_a, Seed(5));
  auto one = ens0, two = ens0;
  advance_ensemble(one, cfg.model, 30.0, cfg.dt, 1);
  advance_ensemble(two, cfg.model, 30.0, cfg.dt, 3);
  for (std::size_t k = 0; k < ens0.size(); ++k) {
    CHECK(one.members[k] == two.members[k]);
    CHECK(one.members[k] == advance(ens0.members[k], cfg.model, 30.0, cfg.dt));
  }
}

TEST_CASE("degenerate twin keeps every run on the reference") {
  auto cfg = small_twin();
  cfg.assimilation.reference_offset = 0.0;
  cfg.perturbation.c_T = cfg.perturbation.c_x = cfg.perturbation.c_y = 0.0;
  const auto res = run_twin_experiment(cfg);
  REQUIRE(res.cycles.size() == 3);
  for (const auto& c : res.cycles) {
    CHECK(c.rmse_prior < 1e-9);
    CHECK(c.rmse_posterior < 1e-9);
    CHECK(c.front_comparison == 0.0);
    CHECK(c.variance_posterior < 1e-18);
  }
}

TEST_CASE("small twin experiment") {
  const auto cfg = small_twin();
  const auto dir = scratch_dir("twin");
  TwinOptions opt;
  opt.out = dir;
  opt.snapshot_cycles = 1;
  std::size_t seen = 0;
  opt.on_cycle = [&](const CycleReport&) { ++seen; };
  const auto a = run_twin_experiment(cfg, opt);
  CHECK(seen == 3);

  double prev_fuel = std::numeric_limits<double>::infinity();
  for (const auto& c : a.cycles) {
    CHECK(c.reference_fuel <= prev_fuel);
    prev_fuel = c.reference_fuel;
    CHECK(std::isfinite(c.rmse_posterior));
    CHECK(c.variance_posterior < c.variance_prior);
  }
  CHECK(a.cycles.back().time == Approx(120.0));
  for (const char* f : {"metrics.csv", "timing.csv", "final_mean.bin", "final_reference.bin",
                        "final_comparison.bin", "final_contours.csv", "cycle_001_posterior_mean.bin"})
    CHECK(fs::exists(dir / f));
  CHECK(slurp(dir / "metrics.csv") == metrics_csv(a.cycles));

  SUBCASE("same seed, same bytes") {
    const auto b = run_twin_experiment(cfg);
    CHECK(metrics_csv(a.cycles) == metrics_csv(b.cycles));
    CHECK(encode_snapshot(a.posterior_mean) == encode_snapshot(b.posterior_mean));
    for (std::size_t k = 0; k < a.ensemble.size(); ++k) CHECK(a.ensemble.members[k] == b.ensemble.members[k]);
  }
  SUBCASE("thread count does not change the result") {
    auto threaded = cfg;
    threaded.threads = 3;
    CHECK(metrics_csv(run_twin_experiment(threaded).cycles) == metrics_csv(a.cycles));
  }
  SUBCASE("another seed changes the ensemble") {
    auto other = cfg;
    other.seed = 2;
    CHECK(metrics_csv(run_twin_experiment(other).cycles) != metrics_csv(a.cycles));
  }
}

TEST_CASE("command line exit codes") {
  const std::string cli = WILDFIRE_CLI;
  const auto dir = scratch_dir("cli");
  auto status = [](const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  };
  CHECK(status(cli + " --help") == 0);
  CHECK(status(cli + " simulate") == 2);
  CHECK(status(cli + " simulate --config /nonexistent.json") == 2);

  {
    std::ofstream(dir / "bad.bin") << "not a snapshot";
  }
  CHECK(status(cli + " inspect " + (dir / "bad.bin").string()) == 4);

  write_snapshot(FireState::uniform(Grid::plane(3, 3, 1.0), 300.0), dir / "ok.bin");
  CHECK(status(cli + " inspect " + (dir / "ok.bin").string() + " --out " + (dir / "ok.csv").string()) == 0);
  CHECK(fs::exists(dir / "ok.csv"));
}
