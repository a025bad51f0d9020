#include "xurdf/kinematics.hpp"

#include <cmath>
#include <sstream>

#include "xurdf/errors.hpp"

namespace xurdf {

namespace {

constexpr double kPi = 3.14159265358979323846;

// In-plane basis (e1, e2) for a planar joint with normal `n`.
std::pair<Vector3, Vector3> plane_basis(const Vector3& n) {
  const Vector3 a = n.normalized();
  const Vector3 ref = std::abs(a.x()) < 0.9 ? Vector3::UnitX() : Vector3::UnitY();
  const Vector3 e1 = (ref - a * a.dot(ref)).normalized();
  return {e1, a.cross(e1)};
}

Rotation quaternion_block(const Eigen::Ref<const Eigen::VectorXd>& q, int at) {
  return Rotation(Eigen::Quaterniond(q(at), q(at + 1), q(at + 2), q(at + 3)));
}

void write_quaternion(Eigen::Ref<Eigen::VectorXd> q, int at, const Rotation& r) {
  const Eigen::Quaterniond& quat = r.quaternion();
  q(at) = quat.w();
  q(at + 1) = quat.x();
  q(at + 2) = quat.y();
  q(at + 3) = quat.z();
}

}  // namespace

Eigen::VectorXd neutral(const RobotModel& model) {
  Eigen::VectorXd q = Eigen::VectorXd::Zero(model.nq);
  for (const auto& joint : model.joints) {
    const int o = joint.q_offset;
    switch (joint.kind) {
      case JointKind::Continuous: q(o) = 1.0; break;
      case JointKind::Spherical: q(o) = 1.0; break;
      case JointKind::Planar: q(o + 2) = 1.0; break;
      case JointKind::Floating: q(o + 3) = 1.0; break;
      default: break;
    }
  }
  return q;
}

void check_configuration(const RobotModel& model, const Eigen::VectorXd& q) {
  if (q.size() != model.nq) {
    throw Error(ErrorCode::DimensionMismatch, model.name,
                "configuration has " + std::to_string(q.size()) + " entries, model needs " +
                    std::to_string(model.nq));
  }
}

Placement joint_transform(const JointModel& joint, const Eigen::Ref<const Eigen::VectorXd>& q) {
  const int o = joint.q_offset;
  switch (joint.kind) {
    case JointKind::Fixed:
      return Placement::identity();
    case JointKind::Revolute:
      return {Rotation::from_axis_angle(joint.axis, q(o)), Vector3::Zero()};
    case JointKind::Prismatic:
      return Placement::from_translation(joint.axis * q(o));
    case JointKind::Continuous:
      return {Rotation::from_axis_angle(joint.axis, std::atan2(q(o + 1), q(o))), Vector3::Zero()};
    case JointKind::Spherical:
      return {quaternion_block(q, o), Vector3::Zero()};
    case JointKind::Floating:
      return {quaternion_block(q, o + 3), q.segment<3>(o)};
    case JointKind::Planar: {
      const auto [e1, e2] = plane_basis(joint.axis);
      const double angle = std::atan2(q(o + 3), q(o + 2));
      return {Rotation::from_axis_angle(joint.axis, angle), q(o) * e1 + q(o + 1) * e2};
    }
  }
  return Placement::identity();
}

Matrix6X joint_motion_subspace(const JointModel& joint) {
  Matrix6X s = Matrix6X::Zero(6, tangent_size(joint.kind));
  const Vector3 a = joint.axis.normalized();
  switch (joint.kind) {
    case JointKind::Fixed:
      break;
    case JointKind::Revolute:
    case JointKind::Continuous:
      s.block<3, 1>(0, 0) = a;
      break;
    case JointKind::Prismatic:
      s.block<3, 1>(3, 0) = a;
      break;
    case JointKind::Spherical:
      s.topRows<3>() = Matrix3::Identity();
      break;
    case JointKind::Floating:
      s = Matrix6::Identity();
      break;
    case JointKind::Planar: {
      const auto [e1, e2] = plane_basis(a);
      s.block<3, 1>(3, 0) = e1;
      s.block<3, 1>(3, 1) = e2;
      s.block<3, 1>(0, 2) = a;
      break;
    }
  }
  return s;
}

Eigen::VectorXd integrate(const RobotModel& model, const Eigen::VectorXd& q,
                          const Eigen::VectorXd& v, double dt) {
  check_configuration(model, q);
  if (v.size() != model.nv) {
    throw Error(ErrorCode::DimensionMismatch, model.name, "tangent vector size mismatch");
  }
  Eigen::VectorXd out = q;
  for (const auto& joint : model.joints) {
    const int o = joint.q_offset;
    const int w = joint.v_offset;
    switch (joint.kind) {
      case JointKind::Fixed:
        break;
      case JointKind::Revolute:
      case JointKind::Prismatic:
        out(o) = q(o) + v(w) * dt;
        break;
      case JointKind::Continuous: {
        const double phi = v(w) * dt;
        const double c = q(o) * std::cos(phi) - q(o + 1) * std::sin(phi);
        const double s = q(o + 1) * std::cos(phi) + q(o) * std::sin(phi);
        const double n = std::hypot(c, s);
        out(o) = c / n;
        out(o + 1) = s / n;
        break;
      }
      case JointKind::Spherical: {
        const Rotation r = quaternion_block(q, o) * exp_so3(v.segment<3>(w) * dt);
        write_quaternion(out, o, r);
        break;
      }
      case JointKind::Floating: {
        const Placement m(quaternion_block(q, o + 3), q.segment<3>(o));
        const Placement next = m * exp_se3(Twist::from_vector(v.segment<6>(w) * dt));
        out.segment<3>(o) = next.translation();
        write_quaternion(out, o + 3, next.rotation());
        break;
      }
      case JointKind::Planar: {
        const double phi = v(w + 2) * dt;
        const double vx = v(w) * dt, vy = v(w + 1) * dt;
        double a, b;  // sin(phi)/phi, (1 - cos(phi))/phi
        if (std::abs(phi) < 1e-6) {
          a = 1.0 - phi * phi / 6.0;
          b = 0.5 * phi;
        } else {
          a = std::sin(phi) / phi;
          b = (1.0 - std::cos(phi)) / phi;
        }
        const double lx = a * vx - b * vy;
        const double ly = b * vx + a * vy;
        const double c0 = q(o + 2), s0 = q(o + 3);
        const double n0 = std::hypot(c0, s0);
        const double c = c0 / n0, s = s0 / n0;
        out(o) = q(o) + c * lx - s * ly;
        out(o + 1) = q(o + 1) + s * lx + c * ly;
        const double c1 = c * std::cos(phi) - s * std::sin(phi);
        const double s1 = s * std::cos(phi) + c * std::sin(phi);
        out(o + 2) = c1;
        out(o + 3) = s1;
        break;
      }
    }
  }
  return out;
}

Eigen::VectorXd random_configuration(const RobotModel& model, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto uniform_rotation = [&]() {
    return Rotation(Eigen::Quaterniond(gauss(rng), gauss(rng), gauss(rng), gauss(rng)));
  };
  Eigen::VectorXd q = neutral(model);
  for (const auto& joint : model.joints) {
    const int o = joint.q_offset;
    switch (joint.kind) {
      case JointKind::Fixed:
        break;
      case JointKind::Revolute:
      case JointKind::Prismatic: {
        double lo = joint.kind == JointKind::Revolute ? -kPi : -1.0;
        double hi = -lo;
        if (joint.limits && joint.limits->upper > joint.limits->lower) {
          lo = joint.limits->lower;
          hi = joint.limits->upper;
        }
        q(o) = std::uniform_real_distribution<double>(lo, hi)(rng);
        break;
      }
      case JointKind::Continuous: {
        const double angle = kPi * unit(rng);
        q(o) = std::cos(angle);
        q(o + 1) = std::sin(angle);
        break;
      }
      case JointKind::Spherical:
        write_quaternion(q, o, uniform_rotation());
        break;
      case JointKind::Floating:
        q.segment<3>(o) = Vector3(unit(rng), unit(rng), unit(rng));
        write_quaternion(q, o + 3, uniform_rotation());
        break;
      case JointKind::Planar: {
        const double angle = kPi * unit(rng);
        q(o) = unit(rng);
        q(o + 1) = unit(rng);
        q(o + 2) = std::cos(angle);
        q(o + 3) = std::sin(angle);
        break;
      }
    }
  }
  return q;
}

KinematicsCache forward_kinematics(const RobotModel& model, const Eigen::VectorXd& q) {
  check_configuration(model, q);
  KinematicsCache cache;
  cache.q = q;
  cache.joints.resize(model.joints.size());
  for (size_t i = 0; i < model.joints.size(); ++i) {
    const JointModel& joint = model.joints[i];
    if (joint.parent < 0) {
      cache.joints[i] = joint.placement * joint_transform(joint, q);
      continue;
    }
    cache.joints[i] = cache.joints[static_cast<size_t>(joint.parent)] * joint.placement *
                      joint_transform(joint, q);
  }
  cache.frames.reserve(model.frames.size());
  for (const auto& frame : model.frames) {
    cache.frames.push_back(cache.joints[static_cast<size_t>(frame.parent_joint)] *
                           frame.placement);
  }
  return cache;
}

Matrix6X frame_jacobian(const RobotModel& model, const KinematicsCache& cache, int frame) {
  if (frame < 0 || frame >= static_cast<int>(model.frames.size())) {
    throw Error(ErrorCode::FrameIndexOutOfRange, std::to_string(frame),
                "model has " + std::to_string(model.frames.size()) + " frames");
  }
  Matrix6X jac = Matrix6X::Zero(6, model.nv);
  const Vector3 target = cache.frames[static_cast<size_t>(frame)].translation();
  for (int j = model.frames[static_cast<size_t>(frame)].parent_joint; j > 0;
       j = model.joints[static_cast<size_t>(j)].parent) {
    const JointModel& joint = model.joints[static_cast<size_t>(j)];
    if (joint.nv == 0) continue;
    const Placement& world = cache.joints[static_cast<size_t>(j)];
    const Matrix3 r = world.rotation_matrix();
    const Vector3 lever = target - world.translation();
    const Matrix6X s = joint_motion_subspace(joint);
    for (int c = 0; c < joint.nv; ++c) {
      const Vector3 omega = r * s.block<3, 1>(0, c);
      const Vector3 vel = r * s.block<3, 1>(3, c) + omega.cross(lever);
      jac.block<3, 1>(0, joint.v_offset + c) = omega;
      jac.block<3, 1>(3, joint.v_offset + c) = vel;
    }
  }
  return jac;
}

Matrix6X to_local_jacobian(const Matrix6X& jacobian, const Placement& world_frame) {
  const Matrix3 rt = world_frame.rotation_matrix().transpose();
  Matrix6X out(6, jacobian.cols());
  out.topRows<3>() = rt * jacobian.topRows<3>();
  out.bottomRows<3>() = rt * jacobian.bottomRows<3>();
  return out;
}

Eigen::MatrixXd crba(const RobotModel& model, const Eigen::VectorXd& q) {
  const KinematicsCache cache = forward_kinematics(model, q);
  const size_t n = model.joints.size();

  // Composite inertias and motion subspaces, both about the world origin.
  std::vector<Matrix6> composite(n);
  std::vector<Matrix6X> subspace(n);
  for (size_t i = 0; i < n; ++i) {
    const JointModel& joint = model.joints[i];
    const Placement& world = cache.joints[i];
    composite[i] = joint.body.transformed(world).matrix();
    const Matrix3 r = world.rotation_matrix();
    const Matrix6X s = joint_motion_subspace(joint);
    subspace[i].resize(6, joint.nv);
    for (int c = 0; c < joint.nv; ++c) {
      const Vector3 omega = r * s.block<3, 1>(0, c);
      subspace[i].block<3, 1>(0, c) = omega;
      subspace[i].block<3, 1>(3, c) = r * s.block<3, 1>(3, c) - omega.cross(world.translation());
    }
  }
  for (size_t i = n; i-- > 1;) {
    composite[static_cast<size_t>(model.joints[i].parent)] += composite[i];
  }

  Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(model.nv, model.nv);
  for (size_t i = 1; i < n; ++i) {
    const JointModel& joint = model.joints[i];
    if (joint.nv == 0) continue;
    const Matrix6X force = composite[i] * subspace[i];
    const Eigen::MatrixXd diagonal = subspace[i].transpose() * force;
    mass.block(joint.v_offset, joint.v_offset, joint.nv, joint.nv) =
        0.5 * (diagonal + diagonal.transpose());
    for (int j = joint.parent; j > 0; j = model.joints[static_cast<size_t>(j)].parent) {
      const JointModel& ancestor = model.joints[static_cast<size_t>(j)];
      if (ancestor.nv == 0) continue;
      const Eigen::MatrixXd block = subspace[static_cast<size_t>(j)].transpose() * force;
      mass.block(ancestor.v_offset, joint.v_offset, ancestor.nv, joint.nv) = block;
      mass.block(joint.v_offset, ancestor.v_offset, joint.nv, ancestor.nv) = block.transpose();
    }
  }
  return mass;
}

std::string describe_layout(const RobotModel& model) {
  std::ostringstream out;
  for (size_t i = 0; i < model.joints.size(); ++i) {
    const JointModel& joint = model.joints[i];
    if (joint.nq == 0 && joint.nv == 0) continue;
    out << i << " " << joint.name << " " << to_string(joint.kind) << " q[" << joint.q_offset
        << ":" << joint.q_offset + joint.nq << "] v[" << joint.v_offset << ":"
        << joint.v_offset + joint.nv << "]\n";
  }
  return out.str();
}

}  // namespace xurdf
