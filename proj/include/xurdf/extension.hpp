#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "xurdf/urdf.hpp"

namespace xurdf {

enum class ConstraintType { Constraint3D, Constraint6D };

/// "3D" / "6D", the spelling used in the extension file.
std::string_view to_string(ConstraintType type);
std::optional<ConstraintType> constraint_type_from_string(std::string_view text);
inline int dimension(ConstraintType type) { return type == ConstraintType::Constraint3D ? 3 : 6; }

/// One kinematic closure: two contact frames (URDF link names) to be glued together.
struct ClosureSpec {
  std::string name;
  ConstraintType type = ConstraintType::Constraint6D;
  std::string frame_a;
  std::string frame_b;

  bool operator==(const ClosureSpec&) const = default;
};

/// Ordered actuated joint names; the order is the torque-vector layout.
struct ActuationSpec {
  std::vector<std::string> joints;

  bool operator==(const ActuationSpec&) const = default;
};

/// Only spherical is defined today.
enum class ReplacementTarget { Spherical };

std::string_view to_string(ReplacementTarget target);

/// Either a single joint or an ordered chain of three revolute joints.
struct Replacement {
  std::vector<std::string> joints;
  ReplacementTarget target = ReplacementTarget::Spherical;

  bool operator==(const Replacement&) const = default;
};

struct ReplacementSpec {
  std::vector<Replacement> entries;

  bool operator==(const ReplacementSpec&) const = default;
};

/**
 * Contents of the YAML extension file.
 *
 *   closed_loop:
 *     - {name: knee, type: 6D, link_1: closure_6d_knee_A, link_2: closure_6d_knee_B}
 *   actuated: [motor_hip, motor_knee]
 *   joint_replacements: {ankle_ball: spherical, [rx, ry, rz]: spherical}
 *
 * Any other top-level key is carried in `extras` as canonical YAML text.
 */
struct ExtensionDoc {
  std::vector<ClosureSpec> closures;
  ActuationSpec actuation;
  ReplacementSpec replacements;
  std::vector<std::pair<std::string, std::string>> extras;

  bool operator==(const ExtensionDoc&) const = default;
};

ExtensionDoc parse_extension(std::string_view yaml_text);
std::string serialize_extension(const ExtensionDoc& doc);

/**
 * Naming convention used to derive an extension file from link and joint
 * names. The closure pattern must carry three capture groups, in order:
 * constraint type (3d/6d, any case), closure id, endpoint tag. The two
 * endpoint tags of a pair are sorted; the smaller one becomes link_1.
 */
struct NamingConvention {
  std::string closure_pattern = "^closure_(3[dD]|6[dD])_(.+)_(A|B)$";
  std::string actuated_pattern = "^motor_.*";
};

struct GeneratedExtension {
  ExtensionDoc doc;
  std::vector<std::string> warnings;
};

/// Throws BadPattern, UnpairedClosureFrame or AmbiguousPair.
GeneratedExtension generate_extension(const UrdfDocument& urdf,
                                      const NamingConvention& convention = {});

}  // namespace xurdf
