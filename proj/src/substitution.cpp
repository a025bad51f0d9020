#include <Eigen/SVD>

#include <algorithm>

#include "substitution_internal.hpp"
#include "xurdf/number_format.hpp"

namespace xurdf {

namespace detail {

namespace {

bool is_rotational(JointKind kind) {
  return kind == JointKind::Revolute || kind == JointKind::Continuous;
}

int child_count(const RobotModel& model, int joint) {
  return static_cast<int>(std::count_if(model.joints.begin(), model.joints.end(),
                                        [joint](const JointModel& j) { return j.parent == joint; }));
}

double line_distance(const Vector3& p1, const Vector3& d1, const Vector3& p2,
                     const Vector3& d2) {
  const Vector3 n = d1.cross(d2);
  const double s = n.norm();
  if (s < 1e-12) return (p2 - p1).cross(d1).norm();
  return std::abs((p2 - p1).dot(n)) / s;
}

std::string spherical_name(const RobotModel& model, const std::string& a, const std::string& b,
                           const std::string& c) {
  size_t n = 0;
  while (n < a.size() && n < b.size() && n < c.size() && a[n] == b[n] && a[n] == c[n]) ++n;
  std::string prefix = a.substr(0, n);
  while (!prefix.empty() && (prefix.back() == '_' || prefix.back() == '-')) prefix.pop_back();
  if (!prefix.empty() && model.joint_index(prefix) < 0) return prefix;
  return a + "_spherical";
}

}  // namespace

TripleCheck check_triple(const RobotModel& model, int j1, int j2, int j3,
                         const SubstitutionTolerances& tol) {
  TripleCheck out;
  const int n = static_cast<int>(model.joints.size());
  if (j1 <= 0 || j2 <= 0 || j3 <= 0 || j1 >= n || j2 >= n || j3 >= n) {
    out.reason = "joint index out of range";
    return out;
  }
  const JointModel& a = model.joints[static_cast<size_t>(j1)];
  const JointModel& b = model.joints[static_cast<size_t>(j2)];
  const JointModel& c = model.joints[static_cast<size_t>(j3)];
  if (b.parent != j1 || c.parent != j2) {
    out.reason = "joints are not consecutive";
    return out;
  }
  for (const JointModel* j : {&a, &b, &c}) {
    if (!is_rotational(j->kind)) {
      out.reason = "'" + j->name + "' is " + std::string(to_string(j->kind)) + ", not revolute";
      return out;
    }
  }
  if (child_count(model, j1) != 1 || child_count(model, j2) != 1) {
    out.reason = "an intermediate body branches";
    return out;
  }
  for (const auto& frame : model.frames) {
    if ((frame.parent_joint == j1 || frame.parent_joint == j2) &&
        frame.kind != FrameKind::Body) {
      out.reason = "frame '" + frame.name + "' sits on an intermediate body";
      return out;
    }
  }
  for (const auto& closure : model.closures) {
    for (int f : {closure.frame_a, closure.frame_b}) {
      const int parent = model.frames[static_cast<size_t>(f)].parent_joint;
      if (parent == j1 || parent == j2) {
        out.reason = "closure '" + closure.name + "' uses an intermediate body";
        return out;
      }
    }
  }
  for (const auto& act : model.actuated) {
    if (act.joint == j1 || act.joint == j2 || act.joint == j3) {
      out.reason = "'" + act.name + "' is actuated";
      return out;
    }
  }
  for (const JointModel* j : {&a, &b}) {
    if (!(j->body.mass < tol.mass)) {
      out.reason = "body after '" + j->name + "' has mass " + format_double(j->body.mass);
      return out;
    }
  }

  // Axis lines in the parent frame of j1, joints at rest.
  const Placement m1 = a.placement;
  const Placement m12 = m1 * b.placement;
  const Placement m123 = m12 * c.placement;
  const Vector3 p[3] = {m1.translation(), m12.translation(), m123.translation()};
  const Vector3 d[3] = {m1.rotation() * a.axis.normalized(), m12.rotation() * b.axis.normalized(),
                        m123.rotation() * c.axis.normalized()};
  for (int i = 0; i < 3; ++i) {
    for (int k = i + 1; k < 3; ++k) {
      const double dist = line_distance(p[i], d[i], p[k], d[k]);
      if (!(dist < tol.concurrency)) {
        out.reason = "axes are not concurrent (distance " + format_double(dist) + " m)";
        return out;
      }
    }
  }
  Matrix3 axes;
  axes << d[0], d[1], d[2];
  const Eigen::JacobiSVD<Matrix3> svd(axes);
  const double smallest = svd.singularValues()(2);
  if (!(smallest > tol.axis_rank)) {
    out.reason = "axes do not span three directions (sigma_min " + format_double(smallest) + ")";
    return out;
  }
  // Least-squares point closest to the three lines.
  Matrix3 lhs = Matrix3::Zero();
  Vector3 rhs = Vector3::Zero();
  for (int i = 0; i < 3; ++i) {
    const Matrix3 proj = Matrix3::Identity() - d[i] * d[i].transpose();
    lhs += proj;
    rhs += proj * p[i];
  }
  out.center = lhs.ldlt().solve(rhs);
  out.ok = true;
  return out;
}

void replace_triple(RobotModel& model, int j1, int j2, int j3, const Vector3& center,
                    bool forced) {
  const JointModel a = model.joints[static_cast<size_t>(j1)];
  const JointModel b = model.joints[static_cast<size_t>(j2)];
  const JointModel c = model.joints[static_cast<size_t>(j3)];

  const Placement m1 = a.placement;
  const Placement m12 = m1 * b.placement;
  const Placement m123 = m12 * c.placement;
  const Placement ms(m1.rotation(), center);
  const Placement ms_inv = ms.inverse();
  // Offset from the spherical frame to the old third-joint frame.
  const Placement mc = ms_inv * m123;

  JointModel s;
  s.name = spherical_name(model, a.name, b.name, c.name);
  s.kind = JointKind::Spherical;
  s.parent = a.parent;
  s.placement = ms;
  s.link = c.link;
  s.body = c.body.transformed(mc) + a.body.transformed(ms_inv * m1) +
           b.body.transformed(ms_inv * m12);

  SphericalSubstitution trace;
  trace.spherical = s.name;
  trace.replaced = {a.name, b.name, c.name};
  trace.limits = {a.limits, b.limits, c.limits};
  trace.forced = forced;

  // New joint indices: j1 becomes the spherical joint, j2 and j3 disappear.
  const int n = static_cast<int>(model.joints.size());
  std::vector<int> remap(static_cast<size_t>(n), -1);
  std::vector<JointModel> joints;
  for (int i = 0; i < n; ++i) {
    if (i == j2 || i == j3) continue;
    remap[static_cast<size_t>(i)] = static_cast<int>(joints.size());
    joints.push_back(i == j1 ? s : model.joints[static_cast<size_t>(i)]);
  }
  remap[static_cast<size_t>(j3)] = remap[static_cast<size_t>(j1)];
  for (auto& joint : joints) {
    if (joint.parent < 0) continue;
    if (joint.parent == j3) joint.placement = mc * joint.placement;
    joint.parent = remap[static_cast<size_t>(joint.parent)];
  }

  std::vector<FrameModel> frames;
  std::vector<int> frame_remap(model.frames.size(), -1);
  for (size_t f = 0; f < model.frames.size(); ++f) {
    FrameModel frame = model.frames[f];
    if (frame.parent_joint == j1 || frame.parent_joint == j2) {
      trace.dropped_frames.push_back(frame.name);
      continue;
    }
    if (frame.parent_joint == j3) frame.placement = mc * frame.placement;
    frame.parent_joint = remap[static_cast<size_t>(frame.parent_joint)];
    frame_remap[f] = static_cast<int>(frames.size());
    frames.push_back(std::move(frame));
  }

  for (auto& closure : model.closures) {
    closure.frame_a = frame_remap[static_cast<size_t>(closure.frame_a)];
    closure.frame_b = frame_remap[static_cast<size_t>(closure.frame_b)];
  }
  for (auto& act : model.actuated) act.joint = remap[static_cast<size_t>(act.joint)];

  model.joints = std::move(joints);
  model.frames = std::move(frames);
  model.substitutions.push_back(std::move(trace));
}

}  // namespace detail

RobotModel substitute_spherical(const RobotModel& model, const SubstitutionTolerances& tol) {
  RobotModel out = model;
  bool changed = false;
  for (int j1 = 1; j1 < static_cast<int>(out.joints.size()); ++j1) {
    // j2 and j3 are the unique children down the chain, if any.
    auto only_child = [&out](int joint) {
      int found = -1;
      for (int i = 0; i < static_cast<int>(out.joints.size()); ++i) {
        if (out.joints[static_cast<size_t>(i)].parent != joint) continue;
        if (found >= 0) return -1;
        found = i;
      }
      return found;
    };
    const int j2 = only_child(j1);
    if (j2 < 0) continue;
    const int j3 = only_child(j2);
    if (j3 < 0) continue;
    const detail::TripleCheck check = detail::check_triple(out, j1, j2, j3, tol);
    if (!check.ok) continue;
    detail::replace_triple(out, j1, j2, j3, check.center, false);
    changed = true;
  }
  if (changed) assign_layout(out);
  return out;
}

}  // namespace xurdf
