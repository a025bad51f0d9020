#include "xurdf/constraints.hpp"

#include <algorithm>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "xurdf/number_format.hpp"

namespace xurdf {

namespace {

constexpr double kRankTol = 1e-8;
constexpr double kOffManifold = 1e-6;

// 6D residual rows of a closure, relabeling the log failure with the closure name.
Twist relative_log(const ResolvedClosure& closure, const Placement& a_m_b) {
  try {
    return log_se3(a_m_b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AngleNearPi) throw;
    throw Error(ErrorCode::AngleNearPi, closure.name,
                "relative rotation of the closure frames is within 1e-6 rad of pi");
  }
}

Matrix6 relative_log_jacobian(const ResolvedClosure& closure, const Placement& a_m_b) {
  try {
    return log_jacobian_se3(a_m_b);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::AngleNearPi) throw;
    throw Error(ErrorCode::AngleNearPi, closure.name,
                "relative rotation of the closure frames is within 1e-6 rad of pi");
  }
}

}  // namespace

std::vector<ClosureSlice> closure_slices(const RobotModel& model) {
  std::vector<ClosureSlice> slices;
  int offset = 0;
  for (size_t c = 0; c < model.closures.size(); ++c) {
    const int dim = model.closures[c].dim();
    slices.push_back({static_cast<int>(c), offset, dim});
    offset += dim;
  }
  return slices;
}

ConstraintResidual residual(const RobotModel& model, const KinematicsCache& cache) {
  ConstraintResidual out;
  out.slices = closure_slices(model);
  out.values = Eigen::VectorXd::Zero(model.constraint_dim());
  for (const auto& slice : out.slices) {
    const ResolvedClosure& closure = model.closures[static_cast<size_t>(slice.closure)];
    const Placement& a = cache.frames[static_cast<size_t>(closure.frame_a)];
    const Placement& b = cache.frames[static_cast<size_t>(closure.frame_b)];
    if (closure.type == ConstraintType::Constraint6D) {
      out.values.segment<6>(slice.offset) = relative_log(closure, a.inverse() * b).vector();
    } else {
      out.values.segment<3>(slice.offset) = b.translation() - a.translation();
    }
  }
  return out;
}

ConstraintJacobian jacobian(const RobotModel& model, const KinematicsCache& cache) {
  ConstraintJacobian out;
  out.slices = closure_slices(model);
  out.matrix = Eigen::MatrixXd::Zero(model.constraint_dim(), model.nv);
  for (const auto& slice : out.slices) {
    const ResolvedClosure& closure = model.closures[static_cast<size_t>(slice.closure)];
    const Placement& a = cache.frames[static_cast<size_t>(closure.frame_a)];
    const Placement& b = cache.frames[static_cast<size_t>(closure.frame_b)];
    const Matrix6X ja = frame_jacobian(model, cache, closure.frame_a);
    const Matrix6X jb = frame_jacobian(model, cache, closure.frame_b);
    if (closure.type == ConstraintType::Constraint3D) {
      out.matrix.block(slice.offset, 0, 3, model.nv) = jb.bottomRows<3>() - ja.bottomRows<3>();
      continue;
    }
    // Twist of b relative to a, in b coordinates.
    const Matrix3 rbt = b.rotation_matrix().transpose();
    const Matrix3 lever = skew(b.translation() - a.translation());
    Matrix6X rel(6, model.nv);
    rel.topRows<3>() = rbt * (jb.topRows<3>() - ja.topRows<3>());
    rel.bottomRows<3>() = rbt * (jb.bottomRows<3>() - ja.bottomRows<3>() + lever * ja.topRows<3>());
    out.matrix.block(slice.offset, 0, 6, model.nv) =
        relative_log_jacobian(closure, a.inverse() * b) * rel;
  }
  return out;
}

Eigen::VectorXd acceleration_bias(const RobotModel& model, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& v, double eps) {
  if (v.size() != model.nv) {
    throw Error(ErrorCode::DimensionMismatch, model.name, "tangent vector size mismatch");
  }
  const Eigen::VectorXd plus = integrate(model, q, v, eps);
  const Eigen::VectorXd minus = integrate(model, q, v, -eps);
  const Eigen::MatrixXd kp = jacobian(model, forward_kinematics(model, plus)).matrix;
  const Eigen::MatrixXd km = jacobian(model, forward_kinematics(model, minus)).matrix;
  return -((kp - km) / (2.0 * eps)) * v;
}

Projection project(const RobotModel& model, const Eigen::VectorXd& q0,
                   const ProjectionOptions& options) {
  check_configuration(model, q0);
  Projection out;
  out.q = q0;
  ProjectionStats& stats = out.stats;
  double lambda = options.initial_damping;

  KinematicsCache cache = forward_kinematics(model, out.q);
  Eigen::VectorXd phi = residual(model, cache).values;
  stats.initial_norm = phi.size() ? phi.lpNorm<Eigen::Infinity>() : 0.0;
  stats.final_norm = stats.initial_norm;
  stats.accepted_norms.push_back(phi.norm());

  while (stats.final_norm >= options.tol) {
    if (stats.iterations >= options.max_iterations) {
      stats.damping = lambda;
      throw ProjectionError(model.name,
                            "no convergence after " + std::to_string(stats.iterations) +
                                " iterations, residual " + format_double(stats.final_norm),
                            stats, out.q);
    }
    ++stats.iterations;
    const Eigen::MatrixXd k = jacobian(model, cache).matrix;
    const Eigen::MatrixXd normal =
        k.transpose() * k + lambda * Eigen::MatrixXd::Identity(model.nv, model.nv);
    const Eigen::VectorXd step = normal.ldlt().solve(-k.transpose() * phi);
    const Eigen::VectorXd candidate = integrate(model, out.q, step);

    bool accepted = false;
    KinematicsCache next;
    Eigen::VectorXd next_phi;
    try {
      next = forward_kinematics(model, candidate);
      next_phi = residual(model, next).values;
      accepted = next_phi.allFinite() && next_phi.norm() < phi.norm();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AngleNearPi) throw;
    }
    if (!accepted) {
      ++stats.rejected;
      lambda *= 10.0;
      continue;
    }
    out.q = candidate;
    cache = std::move(next);
    phi = std::move(next_phi);
    stats.final_norm = phi.lpNorm<Eigen::Infinity>();
    stats.accepted_norms.push_back(phi.norm());
    lambda = std::max(lambda / 10.0, 1e-15);
  }
  stats.damping = lambda;
  return out;
}

MobilityReport mobility_report(const RobotModel& model, const Eigen::VectorXd& q) {
  MobilityReport report;
  report.n_q = model.nq;
  report.n_v = model.nv;
  report.m = model.constraint_dim();
  report.n_actuated = model.actuated_dofs();

  const KinematicsCache cache = forward_kinematics(model, q);
  const Eigen::VectorXd phi = residual(model, cache).values;
  report.residual_norm = phi.size() ? phi.lpNorm<Eigen::Infinity>() : 0.0;
  if (report.m > 0) {
    const Eigen::MatrixXd k = jacobian(model, cache).matrix;
    report.rank_k = numerical_rank(k, kRankTol);
    if (report.rank_k > 0) {
      const Eigen::JacobiSVD<Eigen::MatrixXd> svd(k);
      const auto& sigma = svd.singularValues();
      report.smallest_retained = sigma(report.rank_k - 1);
      const double cutoff = kRankTol * sigma(0);
      if (report.smallest_retained < 100.0 * cutoff) {
        report.warnings.push_back({"RankMarginal", model.name,
                                   "smallest retained singular value " +
                                       format_double(report.smallest_retained) +
                                       " is within 100x of the rank cutoff"});
      }
    }
  }
  report.net_dof = report.n_v - report.rank_k;
  report.internal_mobilities = report.net_dof - report.n_actuated;
  if (report.residual_norm > kOffManifold) {
    report.warnings.push_back({"OffManifold", model.name,
                               "residual " + format_double(report.residual_norm) +
                                   " at the evaluation configuration"});
  }
  if (report.internal_mobilities < 0) {
    report.warnings.push_back({"OverActuated", model.name,
                               "more actuated velocities than free mobilities"});
  }
  return report;
}

}  // namespace xurdf
