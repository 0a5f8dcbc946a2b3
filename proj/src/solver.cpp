#include "wildfire/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace wildfire {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double cube(double v) { return v * v * v; }

// Flux-form Laplacian with k(T) = k T^3 evaluated at the face mean.
inline double cubic_flux(double k, double center, double neighbor) {
  const double face = 0.5 * (center + neighbor);
  return k * cube(face) * (neighbor - center);
}

}  // namespace

void diffusion_term(const FireState& state, const ModelCoefficients& c, std::vector<double>& out) {
  const Grid& g = state.grid;
  const auto& T = state.T;
  const std::size_t nx = g.nx, ny = g.ny;
  out.resize(g.cells());
  const double inv_dx2 = 1.0 / (g.dx * g.dx);

  if (c.diffusion == DiffusionMode::linear) {
    const double kc = c.k * inv_dx2;
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t row = j * nx;
      for (std::size_t i = 0; i < nx; ++i) {
        const std::size_t p = row + i;
        const double t = T[p];
        const double w = i > 0 ? T[p - 1] : t;
        const double e = i + 1 < nx ? T[p + 1] : t;
        double sum = w + e - 2.0 * t;
        if (g.dims == 2) {
          const double s = j > 0 ? T[p - nx] : t;
          const double n = j + 1 < ny ? T[p + nx] : t;
          sum += s + n - 2.0 * t;
        }
        out[p] = kc * sum;
      }
    }
    return;
  }

  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t row = j * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t p = row + i;
      const double t = T[p];
      double sum = 0.0;
      if (i > 0) sum += cubic_flux(c.k, t, T[p - 1]);
      if (i + 1 < nx) sum += cubic_flux(c.k, t, T[p + 1]);
      if (g.dims == 2) {
        if (j > 0) sum += cubic_flux(c.k, t, T[p - nx]);
        if (j + 1 < ny) sum += cubic_flux(c.k, t, T[p + nx]);
      }
      out[p] = inv_dx2 * sum;
    }
  }
}

namespace {

void compute_tendencies(const FireState& state, const ModelCoefficients& c, Tendencies& out) {
  state.check_conforming();
  const Grid& g = state.grid;
  const auto& T = state.T;
  const auto& S = state.S;
  const std::size_t nx = g.nx, ny = g.ny;

  diffusion_term(state, c, out.dT);
  out.dS.resize(g.cells());

  const double vx = c.wind[0];
  const double vy = g.dims == 2 ? c.wind[1] : 0.0;
  const bool advect = vx != 0.0 || vy != 0.0;
  const double inv_dx = 1.0 / g.dx;

  for (std::size_t j = 0; j < ny; ++j) {
    const std::size_t row = j * nx;
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t p = row + i;
      const double t = T[p];
      double adv = 0.0;
      if (advect) {
        if (vx > 0.0) {
          adv -= vx * (t - (i > 0 ? T[p - 1] : t)) * inv_dx;
        } else if (vx < 0.0) {
          adv -= vx * ((i + 1 < nx ? T[p + 1] : t) - t) * inv_dx;
        }
        if (vy > 0.0) {
          adv -= vy * (t - (j > 0 ? T[p - nx] : t)) * inv_dx;
        } else if (vy < 0.0) {
          adv -= vy * ((j + 1 < ny ? T[p + nx] : t) - t) * inv_dx;
        }
      }
      const double r = reaction_rate(t, c.B, c.T_0);
      out.dT[p] += adv + c.A * (S[p] * r - c.C * (t - c.T_a));
      out.dS[p] = -c.C_S * S[p] * r;
    }
  }
}

}  // namespace

Tendencies tendencies(const FireState& state, const ModelCoefficients& coeffs) {
  Tendencies out;
  compute_tendencies(state, coeffs, out);
  return out;
}

void step_euler_inplace(FireState& state, const ModelCoefficients& coeffs, double dt,
                        Tendencies& scratch) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_euler: dt must be positive");
  compute_tendencies(state, coeffs, scratch);
  const std::size_t n = state.grid.cells();
  for (std::size_t p = 0; p < n; ++p) {
    const double t = state.T[p] + dt * scratch.dT[p];
    const double s = state.S[p] + dt * scratch.dS[p];
    if (!std::isfinite(t) || !std::isfinite(s)) {
      std::ostringstream msg;
      msg << "solver diverged at t=" << state.time + dt << " s, cell " << p << " (T=" << t
          << ", S=" << s << ", dt=" << dt << ")";
      throw DivergenceError(msg.str(), state.time + dt, p);
    }
    state.T[p] = t;
    state.S[p] = std::clamp(s, 0.0, 1.0);
  }
  state.time += dt;
}

FireState step_euler(const FireState& state, const ModelCoefficients& coeffs, double dt) {
  FireState next = state;
  Tendencies scratch;
  step_euler_inplace(next, coeffs, dt, scratch);
  return next;
}

StabilityReport check_stability(const ModelCoefficients& c, const Grid& grid, double dt,
                                double T_peak) {
  StabilityReport rep;
  const double k_eff = c.diffusion == DiffusionMode::linear ? c.k : c.k * cube(T_peak);
  rep.dt_limit = grid.dx * grid.dx / (4.0 * k_eff);
  rep.diffusion_stable = dt <= rep.dt_limit;
  rep.front_resolution = std::sqrt(k_eff * c.B / c.A) / grid.dx;
  std::ostringstream note;
  if (!rep.diffusion_stable)
    note << "dt=" << dt << " exceeds explicit diffusion limit " << rep.dt_limit << " s. ";
  if (rep.front_resolution < 1.0)
    note << "front length sqrt(kB/A) spans " << rep.front_resolution
         << " cells; explicit runs lose stability as k/dx decreases further.";
  rep.note = note.str();
  return rep;
}

namespace {

template <class OnStep>
FireState integrate(FireState state, const ModelCoefficients& coeffs, double t_end, double dt,
                    OnStep&& on_step) {
  if (!(dt > 0.0)) throw std::invalid_argument("run: dt must be positive");
  if (t_end < state.time) throw std::invalid_argument("run: t_end precedes the state time");
  Tendencies scratch;
  const double eps = 1e-9 * dt;
  std::size_t steps = 0;
  while (state.time < t_end - eps) {
    const double remaining = t_end - state.time;
    const bool last = remaining <= dt + eps;
    step_euler_inplace(state, coeffs, last ? remaining : dt, scratch);
    if (last) state.time = t_end;
    ++steps;
    on_step(state, steps, last);
  }
  return state;
}

}  // namespace

Trajectory run(const FireState& state, const ModelCoefficients& coeffs, double t_end, double dt,
               std::size_t snapshot_every) {
  Trajectory traj;
  traj.snapshots.push_back(state);
  integrate(state, coeffs, t_end, dt, [&](const FireState& s, std::size_t step, bool last) {
    if (last || (snapshot_every > 0 && step % snapshot_every == 0)) traj.snapshots.push_back(s);
  });
  return traj;
}

FireState advance(FireState state, const ModelCoefficients& coeffs, double t_end, double dt) {
  return integrate(std::move(state), coeffs, t_end, dt, [](const FireState&, std::size_t, bool) {});
}

FireState ignite_gaussian_1d(FireState state, double x0, double sigma, double Tc, double T_a) {
  const Grid& g = state.grid;
  if (x0 < 0.0 || x0 > g.length_x()) throw std::invalid_argument("ignition center outside domain");
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      const double d = g.x(i) - x0;
      state.T[g.index(i, j)] = Tc * std::exp(-d * d / (sigma * sigma)) + T_a;
    }
  return state;
}

FireState ignite_square_2d(FireState state, std::array<double, 2> center, double side,
                           double T_ign) {
  const Grid& g = state.grid;
  const double half = 0.5 * side;
  for (std::size_t j = 0; j < g.ny; ++j) {
    if (!(std::abs(g.y(j) - center[1]) < half)) continue;
    for (std::size_t i = 0; i < g.nx; ++i)
      if (std::abs(g.x(i) - center[0]) < half) state.T[g.index(i, j)] = T_ign;
  }
  return state;
}

FireState apply_fuel_break_and_noise(FireState state, double break_width, double noise_half_range,
                                     Rng& rng) {
  if (noise_half_range < 0.0 || noise_half_range >= 1.0)
    throw std::invalid_argument("fuel noise half-range must lie in [0, 1)");
  const Grid& g = state.grid;
  const double mid = 0.5 * g.length_x();
  std::uniform_real_distribution<double> shift(-noise_half_range, noise_half_range);
  for (std::size_t j = 0; j < g.ny; ++j)
    for (std::size_t i = 0; i < g.nx; ++i) {
      double s = std::abs(g.x(i) - mid) < 0.5 * break_width ? 0.0 : 1.0;
      if (noise_half_range > 0.0) s += shift(rng);
      state.S[g.index(i, j)] = std::clamp(s, 0.0, 1.0);
    }
  return state;
}

namespace {

// Largest-x crossing of `level`, interpolated linearly; NaN if T never
// reaches the level or the level region touches the right boundary.
double leading_crossing(const FireState& s, double level) {
  const Grid& g = s.grid;
  for (std::size_t i = g.nx; i-- > 0;) {
    if (s.T[i] >= level) {
      if (i + 1 == g.nx) return kNaN;
      const double a = s.T[i], b = s.T[i + 1];
      return g.x(i) + (a - level) / (a - b) * g.dx;
    }
  }
  return kNaN;
}

}  // namespace

WaveMeasurement measure_wave(const Trajectory& traj, const WaveOptions& opt) {
  WaveMeasurement out;
  if (traj.snapshots.size() < 2) throw std::invalid_argument("measure_wave needs >= 2 snapshots");
  if (traj.snapshots.front().grid.dims != 1)
    throw std::invalid_argument("measure_wave expects a 1D trajectory");

  for (const auto& s : traj.snapshots) {
    const double peak = *std::max_element(s.T.begin(), s.T.end()) - opt.T_a;
    out.times.push_back(s.time);
    out.front_positions.push_back(peak > 0.0 ? leading_crossing(s, opt.T_a + opt.reference_level * peak)
                                             : kNaN);
  }

  const FireState& last = traj.snapshots.back();
  const auto peak_it = std::max_element(last.T.begin(), last.T.end());
  const double Tmax = *peak_it - opt.T_a;
  if (!(Tmax >= opt.min_peak)) {
    std::ostringstream msg;
    msg << "peak rise decayed to " << Tmax << " K";
    out.reason = msg.str();
    return out;
  }

  const Grid& g = last.grid;
  const double level = opt.T_a + opt.reference_level * Tmax;
  const auto ip = static_cast<std::size_t>(peak_it - last.T.begin());
  double right = kNaN, left = kNaN;
  for (std::size_t i = ip; i + 1 < g.nx; ++i)
    if (last.T[i + 1] < level) {
      right = g.x(i) + (last.T[i] - level) / (last.T[i] - last.T[i + 1]) * g.dx;
      break;
    }
  for (std::size_t i = ip; i > 0; --i)
    if (last.T[i - 1] < level) {
      left = g.x(i) - (last.T[i] - level) / (last.T[i] - last.T[i - 1]) * g.dx;
      break;
    }
  if (std::isnan(left) || std::isnan(right)) {
    out.reason = "burning region reaches the domain boundary";
    return out;
  }

  const double t_first = out.times.front(), t_last = out.times.back();
  const double t_half = t_first + 0.5 * (t_last - t_first);
  double st = 0, sx = 0, stt = 0, stx = 0;
  int count = 0;
  for (std::size_t k = 0; k < out.times.size(); ++k) {
    if (out.times[k] < t_half) continue;
    const double x = out.front_positions[k];
    if (std::isnan(x)) {
      out.reason = "leading edge lost during the second half of the run";
      return out;
    }
    const double t = out.times[k];
    st += t;
    sx += x;
    stt += t * t;
    stx += t * x;
    ++count;
  }
  const double denom = count * stt - st * st;
  if (count < 2 || !(denom > 0.0)) {
    out.reason = "too few snapshots in the second half to fit a speed";
    return out;
  }
  const double speed = (count * stx - st * sx) / denom;
  if (!(speed > 0.0)) {
    out.reason = "leading edge is not advancing";
    return out;
  }

  out.status = WaveStatus::sustained;
  out.metrics = WaveMetrics{Tmax, right - left, speed};
  const double x0 = out.front_positions.front();
  out.displacement = std::isnan(x0) ? kNaN : out.front_positions.back() - x0;
  return out;
}

}  // namespace wildfire
