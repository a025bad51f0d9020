#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "xurdf/errors.hpp"
#include "xurdf/kinematics.hpp"
#include "xurdf/model.hpp"

namespace xurdf {

/// Rows [offset, offset + dim) of the stacked residual belong to closure `closure`.
struct ClosureSlice {
  int closure = 0;
  int offset = 0;
  int dim = 0;
};

std::vector<ClosureSlice> closure_slices(const RobotModel& model);

/**
 * Stacked closure residual.
 *
 * 6D: log6(oMa^-1 oMb), a twist in frame a (angular first).
 * 3D: p_b - p_a in world coordinates.
 */
struct ConstraintResidual {
  Eigen::VectorXd values;
  std::vector<ClosureSlice> slices;
};

struct ConstraintJacobian {
  Eigen::MatrixXd matrix;  ///< m x n_v
  std::vector<ClosureSlice> slices;
};

/// Throws AngleNearPi with the closure name as subject.
ConstraintResidual residual(const RobotModel& model, const KinematicsCache& cache);
ConstraintJacobian jacobian(const RobotModel& model, const KinematicsCache& cache);

/// k(q, v) = -(dK/dt) v, by a central difference of K along integrate(q, v, +-eps).
Eigen::VectorXd acceleration_bias(const RobotModel& model, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& v, double eps = 1e-6);

struct ProjectionOptions {
  double tol = 1e-8;  ///< on the infinity norm of the residual
  int max_iterations = 100;
  double initial_damping = 1e-6;
};

struct ProjectionStats {
  int iterations = 0;
  int rejected = 0;
  double initial_norm = 0.0;  ///< infinity norm
  double final_norm = 0.0;    ///< infinity norm
  double damping = 0.0;
  /// Euclidean residual norm after each accepted step, starting at q0.
  std::vector<double> accepted_norms;
};

/// Thrown by project() on MaxIterations; keeps the last iterate.
class ProjectionError : public Error {
 public:
  ProjectionError(const std::string& subject, const std::string& message, ProjectionStats stats,
                  Eigen::VectorXd last)
      : Error(ErrorCode::MaxIterations, subject, message),
        stats_(std::move(stats)),
        last_(std::move(last)) {}

  const ProjectionStats& stats() const { return stats_; }
  const Eigen::VectorXd& last() const { return last_; }

 private:
  ProjectionStats stats_;
  Eigen::VectorXd last_;
};

struct Projection {
  Eigen::VectorXd q;
  ProjectionStats stats;
};

/**
 * Levenberg-Marquardt on the residual with steps retracted through integrate().
 * A step is accepted when the Euclidean residual norm decreases.
 */
Projection project(const RobotModel& model, const Eigen::VectorXd& q0,
                   const ProjectionOptions& options = {});

struct MobilityReport {
  int n_q = 0;
  int n_v = 0;
  int m = 0;
  int rank_k = 0;
  int n_actuated = 0;
  int internal_mobilities = 0;
  int net_dof = 0;
  double residual_norm = 0.0;      ///< infinity norm at the evaluation configuration
  double smallest_retained = 0.0;  ///< smallest singular value counted in the rank
  std::vector<Finding> warnings;   ///< RankMarginal, OffManifold, OverActuated
};

MobilityReport mobility_report(const RobotModel& model, const Eigen::VectorXd& q);

}  // namespace xurdf
