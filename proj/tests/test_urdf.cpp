#include <filesystem>

#include <gtest/gtest.h>

#include "xurdf/errors.hpp"
#include "xurdf/fixtures.hpp"
#include "xurdf/urdf.hpp"

using namespace xurdf;
namespace fs = std::filesystem;

namespace {

const char* kTwoLink = R"(<?xml version="1.0"?>
<robot name="two">
  <link name="base">
    <inertial>
      <origin xyz="0 0 0.1" rpy="0 0 0"/>
      <mass value="1"/>
      <inertia ixx="0.01" ixy="0" ixz="0" iyy="0.01" iyz="0" izz="0.01"/>
    </inertial>
    <visual><geometry><box size="1 1 1"/></geometry></visual>
  </link>
  <link name="arm"/>
  <joint name="shoulder" type="revolute">
    <parent link="base"/>
    <child link="arm"/>
    <origin xyz="0 0 0.5" rpy="0.1 0.2 0.3"/>
    <axis xyz="0 0 2"/>
    <limit lower="-1.5" upper="1.5" effort="10" velocity="2"/>
    <dynamics damping="0.1"/>
  </joint>
  <transmission name="t"><type>simple</type></transmission>
</robot>
)";

ErrorCode code_of(std::string_view text) {
  try {
    parse_urdf(text);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

}  // namespace

TEST(ParseUrdf, TwoLinkDocument) {
  const UrdfDocument doc = parse_urdf(kTwoLink);
  EXPECT_EQ(doc.name, "two");
  ASSERT_EQ(doc.links.size(), 2u);
  ASSERT_EQ(doc.joints.size(), 1u);
  EXPECT_EQ(doc.root_link(), "base");
  const JointDesc& j = doc.joints[0];
  EXPECT_EQ(j.type, JointType::Revolute);
  EXPECT_EQ(j.axis, Vector3(0, 0, 1));
  ASSERT_TRUE(j.limits.has_value());
  EXPECT_EQ(*j.limits->lower, -1.5);
  EXPECT_EQ(*j.limits->velocity, 2.0);
  EXPECT_EQ(j.opaque.size(), 1u);
  EXPECT_EQ(doc.links[0].opaque.size(), 1u);
  EXPECT_EQ(doc.opaque.size(), 1u);
  EXPECT_FALSE(doc.links[1].inertial.has_value());
  EXPECT_EQ(doc.links[0].inertial->origin.xyz, Vector3(0, 0, 0.1));
}

TEST(ParseUrdf, OriginDefaults) {
  const UrdfDocument doc = parse_urdf(R"(<robot name="r"><link name="a"/><link name="b"/>
    <joint name="j" type="fixed"><parent link="a"/><child link="b"/><origin xyz="1 2 3"/></joint>
    </robot>)");
  EXPECT_EQ(doc.joints[0].origin.rpy, Vector3::Zero());
  EXPECT_EQ(doc.joints[0].origin.xyz, Vector3(1, 2, 3));
}

TEST(ParseUrdf, ErrorCorpus) {
  const fs::path dir = fs::path(XURDF_TEST_DATA) / "urdf_errors";
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string expected = entry.path().stem().string();
    try {
      parse_urdf(read_text_file(entry.path()));
      ADD_FAILURE() << entry.path() << " parsed";
    } catch (const Error& e) {
      EXPECT_EQ(to_string(e.code()), expected) << entry.path() << ": " << e.what();
    }
    ++seen;
  }
  EXPECT_EQ(seen, 10);
}

TEST(ParseUrdf, ErrorSubjects) {
  try {
    parse_urdf(read_text_file(fs::path(XURDF_TEST_DATA) / "urdf_errors/MultipleParents.urdf"));
  } catch (const Error& e) {
    EXPECT_EQ(e.subject(), "foo");
  }
  try {
    parse_urdf(read_text_file(fs::path(XURDF_TEST_DATA) / "urdf_errors/XmlSyntax.urdf"));
  } catch (const Error& e) {
    ASSERT_TRUE(e.location().has_value());
    EXPECT_EQ(e.location()->line, 3);
  }
  try {
    parse_urdf(read_text_file(fs::path(XURDF_TEST_DATA) / "urdf_errors/MultipleRoots.urdf"));
  } catch (const Error& e) {
    EXPECT_EQ(e.subject(), "a,c");
  }
}

TEST(ParseUrdf, RejectsBadNumbersAndAxes) {
  EXPECT_EQ(code_of(R"(<robot name="r"><link name="a"/><link name="b"/>
    <joint name="j" type="fixed"><parent link="a"/><child link="b"/><origin xyz="1 x 3"/></joint>
    </robot>)"),
            ErrorCode::InvalidValue);
  EXPECT_EQ(code_of(R"(<robot name="r"><link name="a"/><link name="b"/>
    <joint name="j" type="continuous"><parent link="a"/><child link="b"/><axis xyz="0 0 0"/></joint>
    </robot>)"),
            ErrorCode::InvalidValue);
  EXPECT_EQ(code_of(R"(<robot name="r"><link name="a"/><link name="b"/>
    <joint name="j" type="revolute"><parent link="a"/><child link="b"/></joint></robot>)"),
            ErrorCode::MissingAttribute);
}

TEST(SerializeUrdf, TwoLinkRoundTrip) {
  const UrdfDocument doc = parse_urdf(kTwoLink);
  const std::string text = serialize_urdf(doc);
  EXPECT_EQ(parse_urdf(text), doc);
  EXPECT_EQ(serialize_urdf(parse_urdf(text)), text);
}

TEST(SerializeUrdf, EmptyRobot) {
  const UrdfDocument doc = parse_urdf(R"(<robot name="lonely"><link name="only"/></robot>)");
  EXPECT_EQ(doc.joints.size(), 0u);
  const std::string text = serialize_urdf(doc);
  EXPECT_EQ(parse_urdf(text), doc);
}

TEST(SerializeUrdf, ExactFloats) {
  const UrdfDocument doc = parse_urdf(R"(<robot name="r"><link name="a"/><link name="b"/>
    <joint name="j" type="fixed"><parent link="a"/><child link="b"/>
    <origin xyz="0.1 0.30000000000000004 1e-300" rpy="3.141592653589793 0 -0"/></joint></robot>)");
  const UrdfDocument again = parse_urdf(serialize_urdf(doc));
  EXPECT_EQ(again.joints[0].origin.xyz.y(), 0.30000000000000004);
  EXPECT_EQ(again.joints[0].origin.xyz.z(), 1e-300);
  EXPECT_EQ(again, doc);
}

TEST(Corpus, RoundTripAndTreeProperty) {
  for (const auto& name : list_fixtures()) {
    const fs::path path = fixture_root() / name / "robot.urdf";
    const UrdfDocument doc = parse_urdf(read_text_file(path));
    EXPECT_EQ(doc.joints.size() + 1, doc.links.size()) << name;
    const std::string once = serialize_urdf(doc);
    EXPECT_EQ(parse_urdf(once), doc) << name;
    EXPECT_EQ(serialize_urdf(parse_urdf(once)), once) << name;
  }
}

TEST(Corpus, DigitLegCounts) {
  const UrdfDocument doc =
      parse_urdf(read_text_file(fixture_root() / "digit_leg" / "robot.urdf"));
  EXPECT_EQ(doc.links.size(), 34u);
  EXPECT_EQ(doc.joints.size(), 33u);
}

TEST(InertiaChecks, NegativeAndTriangle) {
  const UrdfDocument doc = parse_urdf(R"(<robot name="r">
    <link name="neg"><inertial><mass value="1"/>
      <inertia ixx="-1" ixy="0" ixz="0" iyy="1" iyz="0" izz="1"/></inertial></link>
    <link name="flat"><inertial><mass value="1"/>
      <inertia ixx="3" ixy="0" ixz="0" iyy="1" iyz="0" izz="1"/></inertial></link>
    <link name="fine"><inertial><mass value="1"/>
      <inertia ixx="1" ixy="0" ixz="0" iyy="1" iyz="0" izz="1"/></inertial></link>
    <joint name="j1" type="fixed"><parent link="neg"/><child link="flat"/></joint>
    <joint name="j2" type="fixed"><parent link="neg"/><child link="fine"/></joint>
    </robot>)");
  const auto issues = check_link_inertias(doc);
  ASSERT_EQ(issues.size(), 2u);
  EXPECT_EQ(issues[0].link, "neg");
  EXPECT_EQ(issues[0].code, "InertiaNegative");
  EXPECT_EQ(issues[1].link, "flat");
  EXPECT_EQ(issues[1].code, "InertiaTriangle");
}
