#pragma once

#include <string>

#include "xurdf/model.hpp"

namespace xurdf::detail {

struct TripleCheck {
  bool ok = false;
  std::string reason;
  Vector3 center = Vector3::Zero();  ///< common point, in the first joint's parent frame
};

/// Structural, inertial and geometric test for joints j1 -> j2 -> j3.
TripleCheck check_triple(const RobotModel& model, int j1, int j2, int j3,
                         const SubstitutionTolerances& tol);

/// Replaces j1, j2, j3 by one spherical joint at `center`; does not reassign the layout.
void replace_triple(RobotModel& model, int j1, int j2, int j3, const Vector3& center,
                    bool forced);

}  // namespace xurdf::detail
