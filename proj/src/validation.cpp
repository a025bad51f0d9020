#include <Eigen/Eigenvalues>

#include "xurdf/kinematics.hpp"
#include "xurdf/model.hpp"
#include "xurdf/number_format.hpp"

namespace xurdf {

namespace {

constexpr double kMassFloor = 1e-9;
constexpr double kPositivityFloor = 1e-10;

void check_link_inertia(const FrameModel& frame, ValidationReport& report) {
  if (!frame.link_inertia) return;
  const Eigen::SelfAdjointEigenSolver<Matrix3> eig(frame.link_inertia->rotational);
  const Vector3 moments = eig.eigenvalues();
  if (moments.minCoeff() < -1e-12) {
    report.warnings.push_back({"InertiaNegative", frame.name,
                               "principal moment " + format_double(moments.minCoeff()) + " < 0"});
    return;
  }
  if (frame.link_inertia->mass <= 0.0) return;
  for (int i = 0; i < 3; ++i) {
    if (moments[i] > moments[(i + 1) % 3] + moments[(i + 2) % 3] + 1e-9) {
      report.warnings.push_back(
          {"InertiaTriangle", frame.name, "principal moments violate the triangle inequality"});
      return;
    }
  }
}

}  // namespace

ValidationReport validate_model(const RobotModel& model) {
  ValidationReport report;
  for (const auto& frame : model.frames) {
    check_link_inertia(frame, report);
    if (frame.kind != FrameKind::Body || frame.parent_joint == 0) continue;
    const double mass = frame.link_inertia ? frame.link_inertia->mass : 0.0;
    if (mass < kMassFloor) {
      report.warnings.push_back({"ZeroInertiaBody", frame.name,
                                 "link on '" +
                                     model.joints[static_cast<size_t>(frame.parent_joint)].name +
                                     "' has mass " + format_double(mass) + " kg"});
    }
  }

  for (const auto& closure : model.closures) {
    const auto& a = model.frames[static_cast<size_t>(closure.frame_a)];
    const auto& b = model.frames[static_cast<size_t>(closure.frame_b)];
    if (a.parent_joint == b.parent_joint) {
      report.warnings.push_back({"ClosureFrameCoincident", closure.name,
                                 "'" + a.name + "' and '" + b.name + "' are on the same body"});
    }
  }
  if (!model.closures.empty() && model.actuated.empty()) {
    report.warnings.push_back({"NoActuation", model.name, "closures present, no actuated joints"});
  }

  if (model.nv > 0) {
    const double lowest = min_symmetric_eigenvalue(crba(model, neutral(model)));
    if (lowest < kPositivityFloor) {
      report.errors.push_back({"InertiaNotPositive", model.name,
                               "joint-space inertia at neutral has minimum eigenvalue " +
                                   format_double(lowest)});
    }
  }
  return report;
}

}  // namespace xurdf
