#include "wildfire/enkf.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace wildfire {

void ObservationSpec::validate() const {
  const auto m = samples.size();
  if (m == 0) throw std::invalid_argument("observation spec is empty");
  if (static_cast<std::size_t>(values.size()) != m || static_cast<std::size_t>(variances.size()) != m)
    throw ShapeError("observation spec: values/variances length mismatch");
  for (const auto& s : samples)
    if (s.cell >= cells) throw std::out_of_range("observation cell index out of range");
  if (!(variances.array() > 0.0).all()) throw std::invalid_argument("observation variances must be positive");
}

ObservationSpec strided_observations(const FireState& truth, std::size_t stride, double variance) {
  if (stride < 1) throw std::invalid_argument("observation stride must be at least 1");
  const Grid& g = truth.grid;
  ObservationSpec spec;
  spec.cells = g.cells();
  std::vector<std::size_t> cells;
  for (std::size_t j = 0; j < g.ny; j += stride)
    for (std::size_t i = 0; i < g.nx; i += stride) cells.push_back(g.index(i, j));
  for (auto var : {Variable::temperature, Variable::fuel})
    for (auto c : cells) spec.samples.push_back({var, c});
  const auto m = static_cast<Eigen::Index>(spec.samples.size());
  spec.values.resize(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto& s = spec.samples[static_cast<std::size_t>(r)];
    spec.values[r] = s.var == Variable::temperature ? truth.T[s.cell] : truth.S[s.cell];
  }
  spec.variances = Eigen::VectorXd::Constant(m, variance);
  return spec;
}

Eigen::VectorXd observe(std::span<const double> u, const ObservationSpec& spec) {
  if (u.size() != 2 * spec.cells) throw ShapeError("observe: state length does not match spec");
  Eigen::VectorXd out(static_cast<Eigen::Index>(spec.size()));
  for (std::size_t r = 0; r < spec.size(); ++r) {
    const auto idx = spec.state_index(spec.samples[r]);
    if (spec.samples[r].cell >= spec.cells) throw std::out_of_range("observe: cell index out of range");
    out[static_cast<Eigen::Index>(r)] = u[idx];
  }
  return out;
}

Eigen::MatrixXd observe_columns(const EnsembleMatrix& U, const ObservationSpec& spec) {
  Eigen::MatrixXd HU(static_cast<Eigen::Index>(spec.size()), U.cols());
  for (Eigen::Index j = 0; j < U.cols(); ++j)
    HU.col(j) = observe(std::span<const double>(U.col(j).data(), static_cast<std::size_t>(U.rows())), spec);
  return HU;
}

Eigen::MatrixXd perturb_data(const Eigen::VectorXd& d, const Eigen::VectorXd& R_diag, std::size_t N,
                             const Seed& seed) {
  if (N < 1) throw std::invalid_argument("perturb_data: N must be at least 1");
  if (R_diag.size() != d.size()) throw ShapeError("perturb_data: R length mismatch");
  Eigen::MatrixXd D(d.size(), static_cast<Eigen::Index>(N));
  const Eigen::VectorXd sd = R_diag.cwiseSqrt();
  for (std::size_t j = 0; j < N; ++j) {
    auto rng = seed.child("member", j).rng();
    std::normal_distribution<double> normal(0.0, 1.0);
    auto col = D.col(static_cast<Eigen::Index>(j));
    for (Eigen::Index r = 0; r < d.size(); ++r) col[r] = d[r] + sd[r] * normal(rng);
  }
  return D;
}

EnsembleStats ensemble_stats(const EnsembleMatrix& U) {
  if (U.cols() < 2) throw std::invalid_argument("ensemble_stats: need at least two members");
  EnsembleStats st;
  st.mean = U.rowwise().mean();
  st.anomalies = U.colwise() - st.mean;
  return st;
}

EnsembleMatrix analysis_from_predictions(const EnsembleMatrix& U_f, const Eigen::MatrixXd& HU,
                                         const Eigen::VectorXd& d, const Eigen::VectorXd& R_diag,
                                         bool perturb, const Seed& seed, InnerSolve solve) {
  const Eigen::Index N = U_f.cols();
  if (N < 2) throw std::invalid_argument("analysis: need at least two members");
  if (HU.cols() != N || HU.rows() != d.size() || R_diag.size() != d.size() || d.size() == 0)
    throw ShapeError("analysis: inconsistent observation dimensions");
  if (!U_f.allFinite() || !HU.allFinite() || !d.allFinite())
    throw AnalysisError("analysis: non-finite input");
  if (!(R_diag.array() > 0.0).all()) throw AnalysisError("analysis: R must be positive definite");

  const double scale = 1.0 / static_cast<double>(N - 1);
  const EnsembleStats st = ensemble_stats(U_f);
  const Eigen::MatrixXd HA = HU.colwise() - HU.rowwise().mean();
  const Eigen::VectorXd r_inv = R_diag.cwiseInverse();

  Eigen::MatrixXd Y = perturb ? perturb_data(d, R_diag, static_cast<std::size_t>(N), seed)
                              : Eigen::MatrixXd(d.replicate(1, N));
  Y -= HU;

  if (solve == InnerSolve::automatic)
    solve = HA.rows() < N ? InnerSolve::innovation : InnerSolve::woodbury;

  Eigen::MatrixXd Z;  // P^-1 Y
  if (solve == InnerSolve::innovation) {
    Eigen::MatrixXd P = scale * (HA * HA.transpose());
    P.diagonal() += R_diag;
    const Eigen::LLT<Eigen::MatrixXd> llt(P);
    if (llt.info() != Eigen::Success) throw AnalysisError("analysis: innovation factorization failed");
    Z = llt.solve(Y);
  } else {
    // M = I + (HA)^T R^-1 (HA) / (N - 1)
    const Eigen::MatrixXd RinvHA = r_inv.asDiagonal() * HA;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N);
    M.noalias() += scale * (HA.transpose() * RinvHA);
    const Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw AnalysisError("analysis: inner N x N factorization failed");

    // P^-1 Y = R^-1 [Y - HA M^-1 (HA)^T R^-1 Y / (N - 1)]
    const Eigen::MatrixXd inner = llt.solve(RinvHA.transpose() * Y);
    Z = Y;
    Z.noalias() -= scale * (HA * inner);
    Z = r_inv.asDiagonal() * Z;
  }

  // associate the product so no N x N matrix is formed when m < N
  EnsembleMatrix U_a = U_f;
  if (HA.rows() < N) {
    const Eigen::MatrixXd K = scale * (st.anomalies * HA.transpose());
    U_a.noalias() += K * Z;
  } else {
    const Eigen::MatrixXd G = scale * (HA.transpose() * Z);
    U_a.noalias() += st.anomalies * G;
  }
  if (!U_a.allFinite()) throw AnalysisError("analysis: update produced non-finite values");
  return U_a;
}

EnsembleMatrix analysis(const EnsembleMatrix& U_f, const ObservationSpec& spec,
                        const AnalysisConfig& cfg) {
  spec.validate();
  if (static_cast<std::size_t>(U_f.rows()) != 2 * spec.cells)
    throw ShapeError("analysis: ensemble state length does not match observation grid");
  return analysis_from_predictions(U_f, observe_columns(U_f, spec), spec.values, spec.variances,
                                   cfg.perturb_data, cfg.seed);
}

Eigen::VectorXd temperature_gradient(std::span<const double> u, const Grid& g) {
  if (u.size() < g.cells()) throw ShapeError("temperature_gradient: state too short");
  const std::size_t nx = g.nx, ny = g.ny;
  const std::size_t mx = (nx - 1) * ny;
  const std::size_t my = g.dims == 2 ? nx * (ny - 1) : 0;
  Eigen::VectorXd grad(static_cast<Eigen::Index>(mx + my));
  const double inv = 1.0 / g.dx;
  Eigen::Index r = 0;
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i + 1 < nx; ++i) grad[r++] = (u[j * nx + i + 1] - u[j * nx + i]) * inv;
  if (g.dims == 2)
    for (std::size_t j = 0; j + 1 < ny; ++j)
      for (std::size_t i = 0; i < nx; ++i) grad[r++] = (u[(j + 1) * nx + i] - u[j * nx + i]) * inv;
  return grad;
}

EnsembleMatrix regularize(const EnsembleMatrix& U, const Grid& grid, double rho, const Seed& seed,
                          bool perturb) {
  if (!(rho > 0.0)) throw std::invalid_argument("regularize: rho must be positive");
  if (static_cast<std::size_t>(U.rows()) != 2 * grid.cells())
    throw ShapeError("regularize: ensemble state length does not match grid");
  const auto n = static_cast<std::size_t>(U.rows());
  auto column = [&](Eigen::Index j) { return std::span<const double>(U.col(j).data(), n); };

  const Eigen::VectorXd mean = U.rowwise().mean();
  const Eigen::VectorXd d = temperature_gradient(std::span<const double>(mean.data(), n), grid);
  Eigen::MatrixXd G(d.size(), U.cols());
  for (Eigen::Index j = 0; j < U.cols(); ++j) G.col(j) = temperature_gradient(column(j), grid);
  return analysis_from_predictions(U, G, d, Eigen::VectorXd::Constant(d.size(), rho), perturb, seed);
}

EnsembleMatrix to_matrix(const Ensemble& ensemble) {
  ensemble.validate();
  const auto n = 2 * ensemble.grid().cells();
  EnsembleMatrix U(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(ensemble.size()));
  for (std::size_t j = 0; j < ensemble.size(); ++j)
    flatten_into(ensemble.members[j], std::span<double>(U.col(static_cast<Eigen::Index>(j)).data(), n));
  return U;
}

Ensemble from_matrix(const EnsembleMatrix& U, const Grid& grid, double time, bool clamp_fuel) {
  const auto n = static_cast<std::size_t>(U.rows());
  Ensemble ens;
  for (Eigen::Index j = 0; j < U.cols(); ++j) {
    auto s = unflatten(std::span<const double>(U.col(j).data(), n), grid, time);
    if (clamp_fuel)
      for (auto& v : s.S) v = std::clamp(v, 0.0, 1.0);
    ens.members.push_back(std::move(s));
  }
  return ens;
}

}  // namespace wildfire
