#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "wildfire/ensemble.hpp"
#include "wildfire/fields.hpp"
#include "wildfire/seed.hpp"

namespace wildfire {

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// n x N matrix whose columns are flattened member states.
using EnsembleMatrix = Eigen::MatrixXd;

enum class Variable { temperature, fuel };

struct Sample {
  Variable var = Variable::temperature;
  std::size_t cell = 0;
};

/// Pointwise observations of T and S with independent errors.
struct ObservationSpec {
  std::size_t cells = 0;  ///< cell count of the observed grid
  std::vector<Sample> samples;
  Eigen::VectorXd values;     ///< d
  Eigen::VectorXd variances;  ///< diagonal of R

  std::size_t size() const { return samples.size(); }
  std::size_t state_index(const Sample& s) const {
    return s.var == Variable::temperature ? s.cell : cells + s.cell;
  }
  void validate() const;
};

/// Samples T and S of `truth` at every `stride`-th cell along each axis,
/// starting at cell 0, all with the same error variance.
ObservationSpec strided_observations(const FireState& truth, std::size_t stride, double variance);

/// h(u) = H u as a selection; H itself is never formed.
Eigen::VectorXd observe(std::span<const double> u, const ObservationSpec& spec);
Eigen::MatrixXd observe_columns(const EnsembleMatrix& U, const ObservationSpec& spec);

/// D = [d + v_1, ..., d + v_N], v_j ~ N(0, diag(R)); column j draws from
/// seed.child("member", j).
Eigen::MatrixXd perturb_data(const Eigen::VectorXd& d, const Eigen::VectorXd& R_diag,
                             std::size_t N, const Seed& seed);

struct EnsembleStats {
  Eigen::VectorXd mean;
  Eigen::MatrixXd anomalies;  ///< columns u_i - mean
};

EnsembleStats ensemble_stats(const EnsembleMatrix& U);

struct AnalysisConfig {
  double rho = 0.0;  ///< gradient-penalty variance; 0 disables the pass
  bool perturb_data = true;
  Seed seed{};
};

/// How P^{-1} is applied. `woodbury` factors only an N x N SPD matrix;
/// `innovation` factors the m x m matrix P itself; `automatic` picks the
/// smaller of the two.
enum class InnerSolve { automatic, woodbury, innovation };

/// Randomized-data EnKF update from predicted observations HU (m x N):
///
///   U_a = U_f + A (HA)^T P^{-1} (D - HU) / (N - 1),  P = HA (HA)^T / (N - 1) + R,
///
/// with P^{-1} applied through the Sherman-Morrison-Woodbury identity for
/// diagonal R when m >= N, so the m x m matrix P is never formed.
EnsembleMatrix analysis_from_predictions(const EnsembleMatrix& U_f, const Eigen::MatrixXd& HU,
                                         const Eigen::VectorXd& d, const Eigen::VectorXd& R_diag,
                                         bool perturb, const Seed& seed,
                                         InnerSolve solve = InnerSolve::automatic);

/// Primary data analysis with the pointwise observation function.
EnsembleMatrix analysis(const EnsembleMatrix& U_f, const ObservationSpec& spec,
                        const AnalysisConfig& cfg);

/// Forward-difference gradient of the T block of a state vector, x
/// differences first then y, divided by dx.
Eigen::VectorXd temperature_gradient(std::span<const double> u, const Grid& grid);

/// Second analysis pass observing grad T of every member against the
/// gradient of the current ensemble mean, with error covariance rho I.
EnsembleMatrix regularize(const EnsembleMatrix& U, const Grid& grid, double rho, const Seed& seed,
                          bool perturb = true);

EnsembleMatrix to_matrix(const Ensemble& ensemble);
/// Rebuilds members; S is clamped to [0, 1] when `clamp_fuel` is set.
Ensemble from_matrix(const EnsembleMatrix& U, const Grid& grid, double time, bool clamp_fuel);

}  // namespace wildfire
