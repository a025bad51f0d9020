#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "xurdf/errors.hpp"
#include "xurdf/fixtures.hpp"
#include "xurdf/kinematics.hpp"
#include "xurdf/model.hpp"

using namespace xurdf;

namespace {

std::string link(const std::string& name, double mass = 1.0) {
  if (mass < 0) return "<link name=\"" + name + "\"/>";
  const double i = mass > 0 ? 0.01 : 0.0;
  std::ostringstream s;
  s << "<link name=\"" << name << "\"><inertial><mass value=\"" << mass << "\"/><inertia ixx=\""
    << i << "\" ixy=\"0\" ixz=\"0\" iyy=\"" << i << "\" iyz=\"0\" izz=\"" << i << "\"/>"
    << "</inertial></link>";
  return s.str();
}

std::string revolute(const std::string& name, const std::string& parent, const std::string& child,
                     const std::string& xyz, const std::string& axis) {
  return "<joint name=\"" + name + "\" type=\"revolute\"><parent link=\"" + parent +
         "\"/><child link=\"" + child + "\"/><origin xyz=\"" + xyz + "\"/><axis xyz=\"" + axis +
         "\"/><limit lower=\"-1\" upper=\"1\" effort=\"1\" velocity=\"1\"/></joint>";
}

// base -> g_x -> g_y -> g_z -> body, all about the same point unless offsets differ.
std::string gimbal_urdf(double middle_mass, const std::string& ax2 = "0 1 0",
                        const std::string& ax3 = "0 0 1", const std::string& off2 = "0 0 0") {
  return "<robot name=\"g\">" + link("base") + link("l1", -1) + link("l2", middle_mass) +
         link("body") + revolute("g_x", "base", "l1", "0.1 0.2 0.3", "1 0 0") +
         revolute("g_y", "l1", "l2", off2, ax2) + revolute("g_z", "l2", "body", "0 0 0", ax3) +
         "<link name=\"tip\"/><joint name=\"tip_j\" type=\"fixed\"><parent link=\"body\"/>"
         "<child link=\"tip\"/><origin xyz=\"0.5 0 0\"/></joint></robot>";
}

BuildResult build(const std::string& urdf, const std::string& yaml = "",
                  BuildOptions options = {}) {
  return build_model(parse_urdf(urdf), parse_extension(yaml), options);
}

ErrorCode build_error(const std::string& urdf, const std::string& yaml) {
  try {
    build(urdf, yaml);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

void expect_partition(const RobotModel& m) {
  int q = 0, v = 0;
  for (size_t i = 0; i < m.joints.size(); ++i) {
    const auto& j = m.joints[i];
    EXPECT_EQ(j.q_offset, q);
    EXPECT_EQ(j.v_offset, v);
    EXPECT_EQ(j.nq, config_size(j.kind));
    EXPECT_EQ(j.nv, tangent_size(j.kind));
    if (i > 0) {
      EXPECT_LT(j.parent, static_cast<int>(i));
      EXPECT_GE(j.parent, 0);
    }
    q += j.nq;
    v += j.nv;
  }
  EXPECT_EQ(q, m.nq);
  EXPECT_EQ(v, m.nv);
}

}  // namespace

TEST(BuildModel, TwoLinkRevolute) {
  const BuildResult r = build("<robot name=\"t\">" + link("a") + link("b") +
                              revolute("j", "a", "b", "0 0 1", "0 0 1") + "</robot>");
  EXPECT_EQ(r.model.nq, 1);
  EXPECT_EQ(r.model.nv, 1);
  EXPECT_TRUE(r.model.closures.empty());
  EXPECT_TRUE(r.report.ok());
  EXPECT_EQ(r.model.joints[0].name, "universe");
}

TEST(BuildModel, ReferenceErrors) {
  const std::string urdf = "<robot name=\"t\">" + link("a") + link("b") +
                           revolute("j", "a", "b", "0 0 1", "0 0 1") + "</robot>";
  EXPECT_EQ(build_error(urdf, "actuated: [ghost]"), ErrorCode::UnknownActuatedJoint);
  EXPECT_EQ(build_error(urdf, "closed_loop: [{name: c, type: 3D, link_1: a, link_2: nowhere}]"),
            ErrorCode::UnknownClosureFrame);
  EXPECT_EQ(build_error(urdf, "joint_replacements: {phantom: spherical}"),
            ErrorCode::ReplacementTargetMissing);
  try {
    build(urdf, "actuated: [ghost]");
  } catch (const Error& e) {
    EXPECT_EQ(e.subject(), "ghost");
  }
}

TEST(BuildModel, FixedJointsMerge) {
  const std::string urdf =
      "<robot name=\"t\">" + link("a") + link("b") + link("c", 2.0) + link("frame", -1) +
      revolute("j", "a", "b", "0 0 0", "0 0 1") +
      "<joint name=\"weld\" type=\"fixed\"><parent link=\"b\"/><child link=\"c\"/>"
      "<origin xyz=\"1 0 0\"/></joint>"
      "<joint name=\"mark\" type=\"fixed\"><parent link=\"c\"/><child link=\"frame\"/>"
      "<origin xyz=\"0 1 0\"/></joint></robot>";
  const BuildResult r = build(urdf);
  ASSERT_EQ(r.model.joints.size(), 2u);
  const JointModel& j = r.model.joints[1];
  EXPECT_DOUBLE_EQ(j.body.mass, 3.0);
  EXPECT_NEAR(j.body.com.x(), 2.0 / 3.0, 1e-15);
  const int f = r.model.frame_index("frame");
  ASSERT_GE(f, 0);
  EXPECT_EQ(r.model.frames[static_cast<size_t>(f)].kind, FrameKind::Fixed);
  EXPECT_EQ(r.model.frames[static_cast<size_t>(f)].parent_joint, 1);
  EXPECT_EQ(r.model.frames[static_cast<size_t>(f)].placement.translation(), Vector3(1, 1, 0));
  EXPECT_EQ(r.model.frames[static_cast<size_t>(r.model.frame_index("c"))].kind, FrameKind::Body);
}

TEST(BuildModel, FloatingBase) {
  BuildOptions options;
  options.floating_base = true;
  const BuildResult r = build("<robot name=\"t\">" + link("a") + link("b") +
                                  revolute("j", "a", "b", "0 0 1", "0 0 1") + "</robot>",
                              "", options);
  EXPECT_EQ(r.model.nq, 8);
  EXPECT_EQ(r.model.nv, 7);
  EXPECT_EQ(r.model.joints[1].name, "root_joint");
  EXPECT_EQ(r.model.joints[1].kind, JointKind::Floating);
  EXPECT_TRUE(r.report.ok());
  const Eigen::VectorXd q = neutral(r.model);
  EXPECT_EQ(q.head<7>(), (Eigen::VectorXd(7) << 0, 0, 0, 1, 0, 0, 0).finished());
}

TEST(BuildModel, LayoutPartitionsOnCorpus) {
  for (const auto& name : list_fixtures()) {
    SCOPED_TRACE(name);
    const Fixture f = load_fixture(name);
    expect_partition(f.built.model);
    EXPECT_EQ(f.built.model.nq, f.expect.n_q);
    EXPECT_EQ(f.built.model.nv, f.expect.n_v);
    for (const auto& a : f.built.model.actuated) {
      EXPECT_GE(a.nv, 1);
      EXPECT_NE(f.built.model.joints[static_cast<size_t>(a.joint)].kind, JointKind::Fixed);
    }
    for (const auto& c : f.built.model.closures) {
      EXPECT_GE(c.frame_a, 0);
      EXPECT_GE(c.frame_b, 0);
    }
  }
}

TEST(BuildModel, LayoutIsDepthFirstInDeclarationOrder) {
  const std::string urdf = "<robot name=\"t\">" + link("a") + link("b") + link("c") + link("d") +
                           revolute("j1", "a", "b", "0 0 0", "0 0 1") +
                           revolute("j3", "a", "d", "0 0 0", "0 0 1") +
                           revolute("j2", "b", "c", "0 0 0", "0 0 1") + "</robot>";
  const RobotModel m = build(urdf).model;
  EXPECT_EQ(m.joints[1].name, "j1");
  EXPECT_EQ(m.joints[2].name, "j2");
  EXPECT_EQ(m.joints[3].name, "j3");
}

TEST(Substitution, TextbookGimbal) {
  BuildOptions off;
  off.auto_spherical = false;
  const BuildResult raw = build(gimbal_urdf(-1), "", off);
  EXPECT_EQ(raw.model.nq, 3);
  const BuildResult r = build(gimbal_urdf(-1));
  EXPECT_EQ(r.model.nq, 4);
  EXPECT_EQ(r.model.nv, 3);
  ASSERT_EQ(r.model.substitutions.size(), 1u);
  const auto& s = r.model.substitutions[0];
  EXPECT_EQ(s.spherical, "g");
  EXPECT_EQ(s.replaced, (std::vector<std::string>{"g_x", "g_y", "g_z"}));
  ASSERT_EQ(s.limits.size(), 3u);
  EXPECT_EQ(s.limits[0]->lower, -1.0);
  EXPECT_FALSE(s.forced);
  EXPECT_EQ(r.model.joints[1].kind, JointKind::Spherical);
  EXPECT_TRUE(r.report.ok());
  EXPECT_TRUE(r.report.warnings.empty());
}

TEST(Substitution, RejectedCases) {
  EXPECT_EQ(build(gimbal_urdf(0.1)).model.substitutions.size(), 0u);
  EXPECT_EQ(build(gimbal_urdf(-1, "1 0 0", "1 0 0")).model.substitutions.size(), 0u);
  EXPECT_EQ(build(gimbal_urdf(-1, "0 1 0", "0 0 1", "0 0 0.01")).model.substitutions.size(), 0u);
  // micrometre-level CAD noise is tolerated
  EXPECT_EQ(build(gimbal_urdf(-1, "0 1 0", "0 0 1", "0 0 1e-7")).model.substitutions.size(), 1u);
}

TEST(Substitution, ForcedTriple) {
  BuildOptions off;
  off.auto_spherical = false;
  const BuildResult r = build(gimbal_urdf(-1), "joint_replacements:\n  [g_x, g_y, g_z]: spherical\n", off);
  ASSERT_EQ(r.model.substitutions.size(), 1u);
  EXPECT_TRUE(r.model.substitutions[0].forced);
  try {
    build(gimbal_urdf(0.1), "joint_replacements:\n  [g_x, g_y, g_z]: spherical\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ReplacementNotApplicable);
    EXPECT_EQ(e.subject(), "g_x");
  }
}

TEST(Substitution, SingleJointReplacement) {
  const std::string urdf = "<robot name=\"t\">" + link("a") + link("b") +
                           revolute("ball", "a", "b", "0 0 1", "0 0 1") + "</robot>";
  const RobotModel m = build(urdf, "joint_replacements: {ball: spherical}").model;
  EXPECT_EQ(m.joints[1].kind, JointKind::Spherical);
  EXPECT_EQ(m.nq, 4);
  const std::string prismatic =
      "<robot name=\"t\">" + link("a") + link("b") +
      "<joint name=\"p\" type=\"prismatic\"><parent link=\"a\"/><child link=\"b\"/>"
      "<limit lower=\"0\" upper=\"1\" effort=\"1\" velocity=\"1\"/></joint></robot>";
  EXPECT_EQ(build_error(prismatic, "joint_replacements: {p: spherical}"),
            ErrorCode::ReplacementNotApplicable);
}

TEST(Substitution, Idempotent) {
  for (const auto& name : list_fixtures()) {
    const Fixture f = load_fixture(name);
    EXPECT_EQ(substitute_spherical(f.built.model), f.built.model) << name;
  }
  const RobotModel once = build(gimbal_urdf(-1)).model;
  EXPECT_EQ(substitute_spherical(substitute_spherical(once)), substitute_spherical(once));
}

TEST(Substitution, PreservesMassAndCentreOfMass) {
  BuildOptions off;
  off.auto_spherical = false;
  const std::string urdf = gimbal_urdf(-1);
  const RobotModel raw = build(urdf, "", off).model;
  const RobotModel sub = build(urdf).model;
  auto totals = [](const RobotModel& m) {
    const KinematicsCache c = forward_kinematics(m, neutral(m));
    double mass = 0;
    Vector3 moment = Vector3::Zero();
    for (size_t j = 0; j < m.joints.size(); ++j) {
      const SpatialInertia world = m.joints[j].body.transformed(c.joints[j]);
      mass += world.mass;
      moment += world.mass * world.com;
    }
    return std::pair{mass, Vector3(moment / mass)};
  };
  const auto [m1, c1] = totals(raw);
  const auto [m2, c2] = totals(sub);
  EXPECT_NEAR(m1, m2, 1e-12);
  EXPECT_LT((c1 - c2).norm(), 1e-12);
}

TEST(Validate, ZeroInertiaMidChain) {
  const std::string urdf = "<robot name=\"t\">" + link("a") + link("hollow", 0.0) + link("c") +
                           revolute("j1", "a", "hollow", "0 0 0", "0 0 1") +
                           revolute("j2", "hollow", "c", "1 0 0", "0 0 1") + "</robot>";
  const BuildResult r = build(urdf);
  EXPECT_TRUE(r.report.has("ZeroInertiaBody", "hollow"));
  EXPECT_TRUE(r.report.ok());
}

TEST(Validate, OnlyBodyMassless) {
  const std::string urdf = "<robot name=\"t\">" + link("a") + link("b", 0.0) +
                           revolute("j", "a", "b", "0 0 0", "0 0 1") + "</robot>";
  const BuildResult r = build(urdf);
  EXPECT_FALSE(r.report.ok());
  ASSERT_EQ(r.report.errors.size(), 1u);
  EXPECT_EQ(r.report.errors[0].code, "InertiaNotPositive");
}

TEST(Validate, ClosureWarnings) {
  const std::string urdf = "<robot name=\"t\">" + link("a") + link("b") + link("fa", -1) +
                           link("fb", -1) + revolute("j", "a", "b", "0 0 0", "0 0 1") +
                           "<joint name=\"ja\" type=\"fixed\"><parent link=\"a\"/><child link=\"fa\"/></joint>"
                           "<joint name=\"jb\" type=\"fixed\"><parent link=\"a\"/><child link=\"fb\"/></joint>"
                           "</robot>";
  const BuildResult r = build(urdf, "closed_loop: [{name: weld, type: 6D, link_1: fa, link_2: fb}]");
  EXPECT_TRUE(r.report.has("ClosureFrameCoincident", "weld"));
  EXPECT_TRUE(r.report.has("NoActuation"));
  const BuildResult acted = build(
      urdf, "closed_loop: [{name: weld, type: 6D, link_1: fa, link_2: fb}]\nactuated: [j]");
  EXPECT_FALSE(acted.report.has("NoActuation"));
}

TEST(Validate, InertiaPlausibilityWarnings) {
  const std::string urdf =
      "<robot name=\"t\">" + link("a") +
      "<link name=\"b\"><inertial><mass value=\"1\"/>"
      "<inertia ixx=\"3\" ixy=\"0\" ixz=\"0\" iyy=\"1\" iyz=\"0\" izz=\"1\"/></inertial></link>" +
      revolute("j", "a", "b", "0 0 0", "0 0 1") + "</robot>";
  EXPECT_TRUE(build(urdf).report.has("InertiaTriangle", "b"));
}

TEST(Validate, CorpusMatchesExpectations) {
  for (const auto& name : list_fixtures()) {
    SCOPED_TRACE(name);
    const Fixture f = load_fixture(name);
    std::vector<std::string> errors, warnings;
    for (const auto& e : f.built.report.errors) errors.push_back(e.code);
    for (const auto& w : f.built.report.warnings) warnings.push_back(w.code);
    EXPECT_EQ(errors, f.expect.errors);
    EXPECT_EQ(warnings, f.expect.warnings);
  }
}

TEST(BackwardCompatibility, EmptyExtensionMatchesPlainBuild) {
  for (const auto& name : {"serial_2r", "sdf_leaf"}) {
    const Fixture f = load_fixture(name);
    const BuildResult plain = build_model(f.urdf, ExtensionDoc{});
    const BuildResult empty = build_model(f.urdf, parse_extension("closed_loop: []\n"));
    EXPECT_EQ(plain.model, empty.model) << name;
  }
}
