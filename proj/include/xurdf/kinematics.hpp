#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xurdf/model.hpp"
#include "xurdf/se3.hpp"

namespace xurdf {

/// World placements of every joint and frame, valid for `q` only.
struct KinematicsCache {
  Eigen::VectorXd q;
  std::vector<Placement> joints;
  std::vector<Placement> frames;
};

Eigen::VectorXd neutral(const RobotModel& model);

/// Manifold retraction: q (+) v*dt, joint by joint.
Eigen::VectorXd integrate(const RobotModel& model, const Eigen::VectorXd& q,
                          const Eigen::VectorXd& v, double dt = 1.0);

/**
 * Uniformly random configuration: bounded scalar joints inside their
 * limits (or [-pi, pi] / [-1, 1] m without limits), uniform rotations,
 * floating/planar translations in [-1, 1] m.
 */
Eigen::VectorXd random_configuration(const RobotModel& model, std::mt19937_64& rng);

/// Throws DimensionMismatch when q does not have n_q entries.
void check_configuration(const RobotModel& model, const Eigen::VectorXd& q);

/// Motion of a joint relative to its rest placement, for its q block.
Placement joint_transform(const JointModel& joint, const Eigen::Ref<const Eigen::VectorXd>& q);

/// Motion subspace S in the moving joint frame (angular rows first): twist = S * v_block.
Matrix6X joint_motion_subspace(const JointModel& joint);

KinematicsCache forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q);

/**
 * Local-world-aligned Jacobian of a frame: rows are the frame's angular
 * velocity and the velocity of its origin, both in world axes.
 * Throws FrameIndexOutOfRange.
 */
Matrix6X frame_jacobian(const RobotModel& model, const KinematicsCache& cache, int frame);

/// Converts a local-world-aligned Jacobian to body-local axes of the frame.
Matrix6X to_local_jacobian(const Matrix6X& jacobian, const Placement& world_frame);

/// Joint-space inertia matrix by the composite-rigid-body recursion.
Eigen::MatrixXd crba(const RobotModel& model, const Eigen::VectorXd& q);

/// One "<index> <joint> <kind> q[a:b] v[c:d]" line per joint with a nonempty block.
std::string describe_layout(const RobotModel& model);

}  // namespace xurdf
