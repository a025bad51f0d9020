#include "xurdf/se3.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "xurdf/errors.hpp"
#include "xurdf/number_format.hpp"

namespace xurdf {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSmallAngle = 1e-4;
constexpr double kNearPiMargin = 1e-6;

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  const double n = q.norm();
  if (!(n > 0.0) || !std::isfinite(n)) return Eigen::Quaterniond::Identity();
  q.coeffs() /= n;
  bool flip = q.w() < 0.0;
  if (q.w() == 0.0) {
    for (double c : {q.x(), q.y(), q.z()}) {
      if (c != 0.0) {
        flip = c < 0.0;
        break;
      }
    }
  }
  if (flip) q.coeffs() = -q.coeffs();
  return q;
}

}  // namespace

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(canonical(q)) {}

Rotation Rotation::from_matrix(const Matrix3& m) {
  return Rotation(Eigen::Quaterniond(m));
}

Rotation Rotation::from_axis_angle(const Vector3& axis, double angle) {
  return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis.normalized())));
}

Rotation Rotation::from_rpy(double roll, double pitch, double yaw) {
  const Eigen::Quaterniond q = Eigen::AngleAxisd(yaw, Vector3::UnitZ()) *
                               Eigen::AngleAxisd(pitch, Vector3::UnitY()) *
                               Eigen::AngleAxisd(roll, Vector3::UnitX());
  return Rotation(q);
}

double Rotation::angle() const {
  return 2.0 * std::atan2(q_.vec().norm(), q_.w());
}

Rotation Rotation::inverse() const { return Rotation(q_.conjugate()); }

Rotation Rotation::operator*(const Rotation& other) const {
  return Rotation(q_ * other.q_);
}

Placement Placement::from_matrix(const Eigen::Matrix4d& m) {
  return {Rotation::from_matrix(m.topLeftCorner<3, 3>()), m.topRightCorner<3, 1>()};
}

Eigen::Matrix4d Placement::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_matrix();
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Placement Placement::inverse() const {
  const Rotation inv = rotation_.inverse();
  return {inv, -(inv * translation_)};
}

Placement Placement::operator*(const Placement& other) const {
  return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
}

Matrix3 skew(const Vector3& v) {
  Matrix3 s;
  s << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return s;
}

Rotation exp_so3(const Vector3& omega) {
  const double theta = omega.norm();
  // sin(theta/2)/theta
  const double k = theta < kSmallAngle ? 0.5 - theta * theta / 48.0
                                       : std::sin(0.5 * theta) / theta;
  Eigen::Quaterniond q;
  q.w() = std::cos(0.5 * theta);
  q.vec() = k * omega;
  return Rotation(q);
}

Vector3 log_so3(const Rotation& r) {
  const Eigen::Quaterniond& q = r.quaternion();
  const double s = q.vec().norm();
  const double w = q.w();  // >= 0 by canonicalization
  if (s < 1e-8) {
    // theta / s = 2 atan(s/w) / s
    return (2.0 / w - 2.0 * s * s / (3.0 * w * w * w)) * q.vec();
  }
  const double theta = 2.0 * std::atan2(s, w);
  return (theta / s) * q.vec();
}

Placement exp_se3(const Twist& v) {
  const double theta = v.angular.norm();
  const Matrix3 w = skew(v.angular);
  double a, b;
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 0.5 - t2 / 24.0;
    b = 1.0 / 6.0 - t2 / 120.0;
  } else {
    a = (1.0 - std::cos(theta)) / (theta * theta);
    b = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  const Matrix3 left = Matrix3::Identity() + a * w + b * w * w;
  return {exp_so3(v.angular), left * v.linear};
}

Twist log_se3(const Placement& m) {
  const Vector3 omega = log_so3(m.rotation());
  const double theta = omega.norm();
  if (theta > kPi - kNearPiMargin) {
    throw Error(ErrorCode::AngleNearPi, "",
                "rotation angle " + format_double(theta) + " too close to pi");
  }
  const Matrix3 w = skew(omega);
  double c;
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = (1.0 - theta * std::sin(theta) / (2.0 * (1.0 - std::cos(theta)))) / (theta * theta);
  }
  const Matrix3 left_inv = Matrix3::Identity() - 0.5 * w + c * w * w;
  return {omega, left_inv * m.translation()};
}

Matrix3 right_jacobian_so3(const Vector3& omega) {
  const double theta = omega.norm();
  const Matrix3 w = skew(omega);
  double a, b;
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    a = 0.5 - t2 / 24.0;
    b = 1.0 / 6.0 - t2 / 120.0;
  } else {
    a = (1.0 - std::cos(theta)) / (theta * theta);
    b = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  return Matrix3::Identity() - a * w + b * w * w;
}

Matrix3 inverse_right_jacobian_so3(const Vector3& omega) {
  const double theta = omega.norm();
  const Matrix3 w = skew(omega);
  double c;
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Matrix3::Identity() + 0.5 * w + c * w * w;
}

namespace {

// Coupling block of the left SE(3) Jacobian for a twist (phi, rho).
Matrix3 left_coupling(const Vector3& rho, const Vector3& phi) {
  const double theta = phi.norm();
  const Matrix3 p = skew(phi);
  const Matrix3 r = skew(rho);
  double c1, c2, c3;
  if (theta < 1e-2) {
    const double t2 = theta * theta;
    c1 = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    c2 = 1.0 / 24.0 - t2 / 720.0 + t2 * t2 / 40320.0;
    c3 = 1.0 / 120.0 - t2 / 2520.0 + t2 * t2 / 120960.0;
  } else {
    const double s = std::sin(theta), c = std::cos(theta);
    const double t2 = theta * theta;
    c1 = (theta - s) / (t2 * theta);
    c2 = (t2 + 2.0 * c - 2.0) / (2.0 * t2 * t2);
    c3 = (2.0 * theta - 3.0 * s + theta * c) / (2.0 * t2 * t2 * theta);
  }
  const Matrix3 pr = p * r;
  const Matrix3 rp = r * p;
  const Matrix3 prp = pr * p;
  const Matrix3 pp = p * p;
  return 0.5 * r + c1 * (pr + rp + prp) + c2 * (pp * r + rp * p - 3.0 * prp) +
         c3 * (prp * p + pp * r * p);
}

}  // namespace

Matrix6 right_jacobian_se3(const Twist& v) {
  Matrix6 j = Matrix6::Zero();
  const Matrix3 jr = right_jacobian_so3(v.angular);
  j.topLeftCorner<3, 3>() = jr;
  j.bottomRightCorner<3, 3>() = jr;
  j.bottomLeftCorner<3, 3>() = left_coupling(-v.linear, -v.angular);
  return j;
}

Matrix6 log_jacobian_se3(const Placement& m) {
  const Twist v = log_se3(m);
  const Matrix3 jr_inv = inverse_right_jacobian_so3(v.angular);
  const Matrix3 q = left_coupling(-v.linear, -v.angular);
  Matrix6 j = Matrix6::Zero();
  j.topLeftCorner<3, 3>() = jr_inv;
  j.bottomRightCorner<3, 3>() = jr_inv;
  j.bottomLeftCorner<3, 3>() = -jr_inv * q * jr_inv;
  return j;
}

Matrix6 adjoint(const Placement& m) {
  const Matrix3 r = m.rotation_matrix();
  Matrix6 ad = Matrix6::Zero();
  ad.topLeftCorner<3, 3>() = r;
  ad.bottomRightCorner<3, 3>() = r;
  ad.bottomLeftCorner<3, 3>() = skew(m.translation()) * r;
  return ad;
}

int numerical_rank(const Eigen::MatrixXd& matrix, double tol) {
  if (matrix.size() == 0) return 0;
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(0) > 0.0)) return 0;
  const double cutoff = tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  return rank;
}

double min_symmetric_eigenvalue(const Eigen::MatrixXd& matrix) {
  if (matrix.size() == 0) return std::numeric_limits<double>::infinity();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

}  // namespace xurdf
