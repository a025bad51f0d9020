#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xurdf/extension.hpp"
#include "xurdf/se3.hpp"
#include "xurdf/urdf.hpp"

namespace xurdf {

/**
 * Joint kinds and their configuration / tangent sizes:
 *
 *   Fixed        0 0   (only the synthetic root joint)
 *   Revolute     1 1   angle
 *   Prismatic    1 1   displacement
 *   Continuous   2 1   (cos, sin)
 *   Spherical    4 3   quaternion (w, x, y, z)
 *   Planar       4 3   (x, y, cos, sin); tangent (vx, vy, wz) in the moving frame
 *   Floating     7 6   (x, y, z, qw, qx, qy, qz); tangent (angular, linear) in the moving frame
 */
enum class JointKind { Fixed, Revolute, Continuous, Prismatic, Floating, Planar, Spherical };

std::string_view to_string(JointKind kind);
int config_size(JointKind kind);
int tangent_size(JointKind kind);

struct PositionLimits {
  double lower = 0.0;
  double upper = 0.0;
  bool operator==(const PositionLimits&) const = default;
};

struct JointModel {
  std::string name;
  JointKind kind = JointKind::Fixed;
  int parent = -1;
  /// Joint frame in the parent joint frame, joint at rest.
  Placement placement;
  /// Unit axis in the joint frame (rotation/translation axis, or plane normal).
  Vector3 axis = Vector3::UnitX();
  int q_offset = 0;
  int nq = 0;
  int v_offset = 0;
  int nv = 0;
  /// Box limits from the URDF; recorded, never enforced.
  std::optional<PositionLimits> limits;
  /// Everything rigidly carried by this joint, expressed in the joint frame.
  SpatialInertia body;
  /// URDF link whose frame coincides with the joint frame.
  std::string link;

  bool operator==(const JointModel&) const = default;
};

enum class FrameKind {
  Body,   ///< a URDF link that is part of a rigid body
  Fixed,  ///< a massless leaf link hung on a fixed joint (contact frames, tool frames)
};

struct FrameModel {
  std::string name;
  FrameKind kind = FrameKind::Body;
  int parent_joint = 0;
  Placement placement;
  /// The link's own inertia in the link frame; empty when the link has no <inertial>.
  std::optional<SpatialInertia> link_inertia;

  bool operator==(const FrameModel&) const = default;
};

struct ResolvedClosure {
  std::string name;
  ConstraintType type = ConstraintType::Constraint6D;
  int frame_a = 0;
  int frame_b = 0;

  int dim() const { return dimension(type); }
  bool operator==(const ResolvedClosure&) const = default;
};

struct ActuatedJoint {
  std::string name;
  int joint = 0;
  int v_offset = 0;
  int nv = 0;

  bool operator==(const ActuatedJoint&) const = default;
};

/// Trace of one revolute-triple to spherical replacement.
struct SphericalSubstitution {
  std::string spherical;
  std::vector<std::string> replaced;
  std::vector<std::optional<PositionLimits>> limits;
  std::vector<std::string> dropped_frames;
  bool forced = false;

  bool operator==(const SphericalSubstitution&) const = default;
};

/**
 * Spanning-tree robot model plus explicit closures.
 *
 * Joint 0 is the synthetic "universe" root; joints are in topological
 * order (parent < index), and their q/v blocks are laid out in that order.
 */
struct RobotModel {
  std::string name;
  std::vector<JointModel> joints;
  std::vector<FrameModel> frames;
  std::vector<ResolvedClosure> closures;
  std::vector<ActuatedJoint> actuated;
  std::vector<SphericalSubstitution> substitutions;
  int nq = 0;
  int nv = 0;
  bool floating_base = false;

  int joint_index(std::string_view joint) const;
  int frame_index(std::string_view frame) const;
  int constraint_dim() const;
  int actuated_dofs() const;

  bool operator==(const RobotModel&) const = default;
};

struct SubstitutionTolerances {
  double concurrency = 1e-6;  ///< m, pairwise axis-line distance
  double axis_rank = 1e-6;    ///< smallest singular value of the stacked axes
  double mass = 1e-9;         ///< kg, intermediate bodies
};

struct BuildOptions {
  bool floating_base = false;
  bool auto_spherical = true;
  SubstitutionTolerances tolerances;
};

struct Finding {
  std::string code;
  std::string subject;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
  bool has(std::string_view code) const;
  bool has(std::string_view code, std::string_view subject) const;
};

struct BuildResult {
  RobotModel model;
  ValidationReport report;
};

/**
 * Fuses a URDF and its extension into a validated model.
 *
 * Fixed joints are merged: a leaf link without <inertial> becomes a Fixed
 * frame, any other link adds its inertia to the supporting joint. YAML
 * replacements are applied before automatic spherical detection.
 *
 * Throws UnknownClosureFrame, UnknownActuatedJoint, ReplacementTargetMissing,
 * ReplacementNotApplicable.
 */
BuildResult build_model(const UrdfDocument& urdf, const ExtensionDoc& ext,
                        const BuildOptions& options = {});

/// Replaces every eligible chain of three concurrent revolutes by a spherical joint.
RobotModel substitute_spherical(const RobotModel& model,
                                const SubstitutionTolerances& tolerances = {});

/// Recomputes q/v offsets, n_q, n_v and actuated velocity ranges.
void assign_layout(RobotModel& model);

ValidationReport validate_model(const RobotModel& model);

}  // namespace xurdf
