#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xurdf/se3.hpp"

namespace xurdf {

/// `<origin xyz rpy>` kept as written, so documents round-trip exactly.
struct Origin {
  Vector3 xyz = Vector3::Zero();
  Vector3 rpy = Vector3::Zero();

  Placement placement() const;
  bool operator==(const Origin&) const = default;
};

/// Mass properties: rotational inertia taken about the center of mass, in link axes.
struct SpatialInertia {
  double mass = 0.0;
  Vector3 com = Vector3::Zero();
  Matrix3 rotational = Matrix3::Zero();

  static SpatialInertia zero() { return {}; }
  /// Same body seen from a frame `m` in which the current frame sits (mMcurrent).
  SpatialInertia transformed(const Placement& m) const;
  /// Sum of two bodies, both expressed in the same frame.
  SpatialInertia operator+(const SpatialInertia& other) const;
  /// 6x6 matrix about the frame origin for twists (angular; linear).
  Matrix6 matrix() const;

  bool operator==(const SpatialInertia&) const = default;
};

struct Inertial {
  Origin origin;
  double mass = 0.0;
  double ixx = 0.0, ixy = 0.0, ixz = 0.0, iyy = 0.0, iyz = 0.0, izz = 0.0;

  SpatialInertia spatial() const;
  bool operator==(const Inertial&) const = default;
};

struct LinkDesc {
  std::string name;
  /// Absent when the link has no `<inertial>` element (a pure frame).
  std::optional<Inertial> inertial;
  /// visual, collision and other unmodelled children, verbatim.
  std::vector<std::string> opaque;

  double mass() const { return inertial ? inertial->mass : 0.0; }
  bool operator==(const LinkDesc&) const = default;
};

enum class JointType { Revolute, Continuous, Prismatic, Fixed, Floating, Planar };

std::string_view to_string(JointType type);
std::optional<JointType> joint_type_from_string(std::string_view text);

struct JointLimits {
  std::optional<double> lower;
  std::optional<double> upper;
  std::optional<double> effort;
  std::optional<double> velocity;

  bool has_position() const { return lower.has_value() || upper.has_value(); }
  bool operator==(const JointLimits&) const = default;
};

struct JointDesc {
  std::string name;
  JointType type = JointType::Fixed;
  std::string parent;
  std::string child;
  Origin origin;
  Vector3 axis = Vector3::UnitX();
  std::optional<JointLimits> limits;
  /// mimic, dynamics, calibration, safety_controller, ... verbatim.
  std::vector<std::string> opaque;

  bool operator==(const JointDesc&) const = default;
};

/**
 * A parsed URDF robot. Links and joints keep document order; the
 * constructor-free aggregate is only produced by parse_urdf, which
 * guarantees a single root and the tree property.
 */
struct UrdfDocument {
  std::string name;
  std::vector<LinkDesc> links;
  std::vector<JointDesc> joints;
  /// Robot-level elements such as transmission, gazebo and material.
  std::vector<std::string> opaque;

  const LinkDesc* find_link(std::string_view link) const;
  const JointDesc* find_joint(std::string_view joint) const;
  /// The joint whose child is `link`, or nullptr for the root.
  const JointDesc* parent_joint(std::string_view link) const;
  const std::string& root_link() const;

  bool operator==(const UrdfDocument&) const = default;
};

/// Parses URDF text. Throws Error with one of the URDF error codes.
UrdfDocument parse_urdf(std::string_view xml_text);

/// Canonical URDF text; floats printed shortest-exact.
std::string serialize_urdf(const UrdfDocument& doc);

/**
 * Physical-plausibility warnings on link inertias (asymmetry, negative
 * principal moments, triangle inequality). Empty when every link is fine.
 */
struct InertiaIssue {
  std::string link;
  std::string code;
  std::string message;
};
std::vector<InertiaIssue> check_link_inertias(const UrdfDocument& doc);

}  // namespace xurdf
