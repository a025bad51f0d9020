#pragma once

// Reference computations used only by tests. They avoid the closed forms
// used by the library: matrix series, finite differences and naive sums.

#include <cmath>

#include <Eigen/Dense>

#include "xurdf/constraints.hpp"
#include "xurdf/kinematics.hpp"
#include "xurdf/model.hpp"
#include "xurdf/se3.hpp"

namespace oracle {

using xurdf::Matrix6;
using xurdf::Matrix6X;
using xurdf::Vector3;
using xurdf::Vector6;

inline Eigen::Matrix3d hat(const Vector3& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

inline Eigen::Matrix4d twist_matrix(const Vector6& xi) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m.topLeftCorner<3, 3>() = hat(xi.head<3>());
  m.topRightCorner<3, 1>() = xi.tail<3>();
  return m;
}

/// exp of a 4x4 matrix by scaling and squaring of a truncated Taylor series.
inline Eigen::Matrix4d expm(const Eigen::Matrix4d& a) {
  int squarings = 0;
  double norm = a.lpNorm<Eigen::Infinity>();
  while (norm > 0.05) {
    norm /= 2.0;
    ++squarings;
  }
  const Eigen::Matrix4d x = a / std::pow(2.0, squarings);
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d sum = Eigen::Matrix4d::Identity();
  for (int k = 1; k < 30; ++k) {
    term = term * x / k;
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Principal matrix logarithm by inverse scaling and squaring
/// (Denman-Beavers square roots, then the log(I + X) series).
inline Eigen::Matrix4d logm(const Eigen::Matrix4d& a) {
  Eigen::Matrix4d y = a;
  int roots = 0;
  while ((y - Eigen::Matrix4d::Identity()).lpNorm<Eigen::Infinity>() > 1e-3 && roots < 60) {
    Eigen::Matrix4d z = Eigen::Matrix4d::Identity();
    for (int it = 0; it < 100; ++it) {
      const Eigen::Matrix4d yn = 0.5 * (y + z.inverse());
      const Eigen::Matrix4d zn = 0.5 * (z + y.inverse());
      const bool done = (yn - y).lpNorm<Eigen::Infinity>() < 1e-16;
      y = yn;
      z = zn;
      if (done) break;
    }
    ++roots;
  }
  const Eigen::Matrix4d x = y - Eigen::Matrix4d::Identity();
  Eigen::Matrix4d term = Eigen::Matrix4d::Identity();
  Eigen::Matrix4d sum = Eigen::Matrix4d::Zero();
  for (int k = 1; k < 40; ++k) {
    term = term * x;
    sum += ((k % 2) ? 1.0 : -1.0) * term / k;
  }
  return sum * std::pow(2.0, roots);
}

inline Vector6 log_via_matrix(const xurdf::Placement& m) {
  const Eigen::Matrix4d l = logm(m.matrix());
  Vector6 xi;
  xi << l(2, 1), l(0, 2), l(1, 0), l.topRightCorner<3, 1>();
  return xi;
}

/// ad of a twist, angular first.
inline Matrix6 ad(const Vector6& xi) {
  Matrix6 m = Matrix6::Zero();
  m.topLeftCorner<3, 3>() = hat(xi.head<3>());
  m.bottomRightCorner<3, 3>() = hat(xi.head<3>());
  m.bottomLeftCorner<3, 3>() = hat(xi.tail<3>());
  return m;
}

/// Right Jacobian of exp on SE(3) as the series sum_k (-ad)^k / (k+1)!.
inline Matrix6 right_jacobian_series(const Vector6& xi) {
  Matrix6 term = Matrix6::Identity();
  Matrix6 sum = Matrix6::Identity();
  const Matrix6 minus_ad = -ad(xi);
  for (int k = 1; k < 60; ++k) {
    term = term * minus_ad / (k + 1);
    sum += term;
  }
  return sum;
}

/// World-aligned frame Jacobian by central differences through integrate().
inline Matrix6X fd_frame_jacobian(const xurdf::RobotModel& model, const Eigen::VectorXd& q,
                                  int frame, double eps = 1e-6) {
  Matrix6X out(6, model.nv);
  for (int i = 0; i < model.nv; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(model.nv);
    e(i) = 1.0;
    const auto plus =
        xurdf::forward_kinematics(model, xurdf::integrate(model, q, e, eps)).frames[frame];
    const auto minus =
        xurdf::forward_kinematics(model, xurdf::integrate(model, q, e, -eps)).frames[frame];
    const Eigen::Matrix3d dr = plus.rotation_matrix() * minus.rotation_matrix().transpose();
    const Eigen::AngleAxisd aa(dr);
    out.block<3, 1>(0, i) = aa.axis() * aa.angle() / (2.0 * eps);
    out.block<3, 1>(3, i) = (plus.translation() - minus.translation()) / (2.0 * eps);
  }
  return out;
}

inline Eigen::VectorXd stacked_residual(const xurdf::RobotModel& model, const Eigen::VectorXd& q) {
  return xurdf::residual(model, xurdf::forward_kinematics(model, q)).values;
}

/// dphi/dv by central differences through integrate().
inline Eigen::MatrixXd fd_constraint_jacobian(const xurdf::RobotModel& model,
                                              const Eigen::VectorXd& q, double eps = 1e-6) {
  Eigen::MatrixXd out(model.constraint_dim(), model.nv);
  for (int i = 0; i < model.nv; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(model.nv);
    e(i) = 1.0;
    out.col(i) = (stacked_residual(model, xurdf::integrate(model, q, e, eps)) -
                  stacked_residual(model, xurdf::integrate(model, q, e, -eps))) /
                 (2.0 * eps);
  }
  return out;
}

/// Joint-space inertia as sum over bodies of J^T I J, each body seen from its joint frame.
inline Eigen::MatrixXd naive_mass_matrix(const xurdf::RobotModel& model, const Eigen::VectorXd& q) {
  const auto cache = xurdf::forward_kinematics(model, q);
  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(model.nv, model.nv);
  for (size_t j = 1; j < model.joints.size(); ++j) {
    // A Body frame coincident with the joint frame.
    int frame = -1;
    for (size_t f = 0; f < model.frames.size(); ++f) {
      if (model.frames[f].parent_joint == static_cast<int>(j) &&
          model.frames[f].placement == xurdf::Placement::identity()) {
        frame = static_cast<int>(f);
        break;
      }
    }
    if (frame < 0) continue;
    const Matrix6X jac = xurdf::frame_jacobian(model, cache, frame);
    const xurdf::Placement axes(cache.joints[j].rotation(), Vector3::Zero());
    const Matrix6 inertia = model.joints[j].body.transformed(axes).matrix();
    mass += jac.transpose() * inertia * jac;
  }
  return mass;
}

}  // namespace oracle
