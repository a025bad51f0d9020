#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace xurdf {

using Vector3 = Eigen::Vector3d;
using Matrix3 = Eigen::Matrix3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/**
 * Unit quaternion rotation.
 *
 * Stored normalized and with the double cover resolved: w >= 0, and when
 * w == 0 the first nonzero of (x, y, z) is positive. Two Rotation values
 * describing the same rotation therefore compare equal coefficient-wise.
 */
class Rotation {
 public:
  Rotation() = default;
  /// Normalizes and canonicalizes `q`.
  explicit Rotation(const Eigen::Quaterniond& q);

  static Rotation identity() { return Rotation(); }
  static Rotation from_matrix(const Matrix3& m);
  static Rotation from_axis_angle(const Vector3& axis, double angle);
  /// Fixed-axis roll, pitch, yaw: R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static Rotation from_rpy(double roll, double pitch, double yaw);

  const Eigen::Quaterniond& quaternion() const { return q_; }
  Matrix3 matrix() const { return q_.toRotationMatrix(); }
  /// Rotation angle in [0, pi].
  double angle() const;

  Rotation inverse() const;
  Rotation operator*(const Rotation& other) const;
  Vector3 operator*(const Vector3& v) const { return q_ * v; }

  bool operator==(const Rotation& other) const { return q_.coeffs() == other.q_.coeffs(); }

 private:
  Eigen::Quaterniond q_ = Eigen::Quaterniond::Identity();
};

/// Rigid transform aMb: maps coordinates expressed in b into a.
class Placement {
 public:
  Placement() : translation_(Vector3::Zero()) {}
  Placement(const Rotation& rotation, const Vector3& translation)
      : rotation_(rotation), translation_(translation) {}

  static Placement identity() { return Placement(); }
  static Placement from_translation(const Vector3& t) { return {Rotation(), t}; }
  static Placement from_matrix(const Eigen::Matrix4d& m);

  const Rotation& rotation() const { return rotation_; }
  const Vector3& translation() const { return translation_; }
  Matrix3 rotation_matrix() const { return rotation_.matrix(); }
  Eigen::Matrix4d matrix() const;

  Placement inverse() const;
  /// Group product, a * b.
  Placement operator*(const Placement& other) const;
  /// Maps a point expressed in the child frame to the parent frame.
  Vector3 act(const Vector3& point) const { return rotation_ * point + translation_; }

  bool operator==(const Placement& other) const {
    return rotation_ == other.rotation_ && translation_ == other.translation_;
  }

 private:
  Rotation rotation_;
  Vector3 translation_;
};

/// se(3) element, angular part first everywhere in this library.
struct Twist {
  Vector3 angular = Vector3::Zero();
  Vector3 linear = Vector3::Zero();

  static Twist from_vector(const Vector6& v) { return {v.head<3>(), v.tail<3>()}; }
  Vector6 vector() const {
    Vector6 v;
    v << angular, linear;
    return v;
  }
};

inline Placement compose(const Placement& a, const Placement& b) { return a * b; }

Matrix3 skew(const Vector3& v);

Rotation exp_so3(const Vector3& omega);
/// Rotation vector of `r`, with norm in [0, pi].
Vector3 log_so3(const Rotation& r);

Placement exp_se3(const Twist& v);
/// Throws Error(AngleNearPi) when the rotation angle is within 1e-6 of pi.
Twist log_se3(const Placement& m);

/// Right Jacobian of the SO(3) exponential: exp(w + d) ~ exp(w) exp(Jr(w) d).
Matrix3 right_jacobian_so3(const Vector3& omega);
Matrix3 inverse_right_jacobian_so3(const Vector3& omega);
/// Right Jacobian of the SE(3) exponential, angular-first ordering.
Matrix6 right_jacobian_se3(const Twist& v);
/**
 * Derivative of log_se3 under right perturbation:
 * log(M exp(d)) ~ log(M) + log_jacobian_se3(M) d.
 * Throws AngleNearPi like log_se3.
 */
Matrix6 log_jacobian_se3(const Placement& m);

/// Adjoint action on twists (angular first): Ad(M) maps b-frame twists to a-frame.
Matrix6 adjoint(const Placement& m);

/// Number of singular values above tol * sigma_max; 0 for an all-zero or empty matrix.
int numerical_rank(const Eigen::MatrixXd& matrix, double tol);

/// Smallest eigenvalue of a symmetric matrix (+inf for an empty matrix).
double min_symmetric_eigenvalue(const Eigen::MatrixXd& matrix);

}  // namespace xurdf
