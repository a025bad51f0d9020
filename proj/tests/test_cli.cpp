#include <filesystem>
#include <fstream>
#include <unistd.h>

#include <gtest/gtest.h>

#include "cli_support.hpp"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json report(const cli::Run& r) {
  EXPECT_FALSE(r.out.empty());
  return json::parse(r.out);
}

bool has_finding(const json& j, const std::string& code, const std::string& severity) {
  for (const auto& f : j["findings"]) {
    if (f["code"] == code && f["severity"] == severity) return true;
  }
  return false;
}

std::string data_file(const std::string& rel) {
  return cli::quote((fs::path(XURDF_TEST_DATA) / rel).string());
}

fs::path temp_path(const std::string& stem) {
  return fs::temp_directory_path() / (stem + "_" + std::to_string(getpid()));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Cli, InfoOnDigitLeg) {
  const cli::Run r = cli::run("info --json " + cli::fixture_file("digit_leg", "robot.urdf") + " " +
                              cli::fixture_file("digit_leg", "robot.yaml"));
  ASSERT_EQ(r.exit_code, 0);
  const json j = report(r);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["command"], "info");
  EXPECT_EQ(j["status"], "ok");
  const json& p = j["payload"];
  EXPECT_EQ(p["n_q"], 33);
  EXPECT_EQ(p["n_v"], 27);
  EXPECT_EQ(p["m"], 18);
  EXPECT_EQ(p["rank_k"], 18);
  EXPECT_EQ(p["closures"].size(), 3u);
  EXPECT_EQ(p["configuration"].size(), 33u);
  EXPECT_TRUE(has_finding(j, "SphericalSubstitution", "note"));
}

TEST(Cli, LayoutListing) {
  const cli::Run r = cli::run("info --json --layout " + cli::fixture_file("four_bar", "robot.urdf") +
                              " " + cli::fixture_file("four_bar", "robot.yaml"));
  ASSERT_EQ(r.exit_code, 0);
  const json layout = report(r)["payload"]["layout"];
  ASSERT_EQ(layout.size(), 3u);
  EXPECT_EQ(layout[0]["joint"], "motor_crank");
  EXPECT_EQ(layout[2]["v_offset"], 2);
}

TEST(Cli, ExitCodes) {
  const cli::Run syntax = cli::run("validate --json " + data_file("urdf_errors/XmlSyntax.urdf"));
  EXPECT_EQ(syntax.exit_code, 1);
  const json j = report(syntax);
  EXPECT_EQ(j["status"], "error");
  EXPECT_EQ(j["findings"][0]["code"], "XmlSyntax");
  EXPECT_EQ(j["findings"][0]["line"], 3);

  const cli::Run tree = cli::run("validate --json " + data_file("urdf_errors/KinematicCycle.urdf"));
  EXPECT_EQ(tree.exit_code, 1);
  EXPECT_EQ(report(tree)["findings"][0]["detail"], "KinematicCycle");

  EXPECT_EQ(cli::run("validate /definitely/not/here.urdf").exit_code, 1);

  const cli::Run semantic = cli::run("validate --json " + cli::fixture_file("sdf_midchain", "robot.urdf"));
  EXPECT_EQ(semantic.exit_code, 2);
  EXPECT_TRUE(has_finding(report(semantic), "InertiaNotPositive", "error"));

  const cli::Run missing = cli::run(
      "validate --json " + cli::fixture_file("four_bar", "robot.urdf") + " " +
      data_file("yaml_errors/BadConstraintType.yaml"));
  EXPECT_EQ(missing.exit_code, 1);

  const cli::Run numeric = cli::run("project --json " + cli::fixture_file("infeasible", "robot.urdf") +
                                    " " + cli::fixture_file("infeasible", "robot.yaml"));
  EXPECT_EQ(numeric.exit_code, 3);
  EXPECT_TRUE(has_finding(report(numeric), "MaxIterations", "error"));
}

TEST(Cli, WarningsKeepExitZero) {
  const cli::Run r = cli::run("validate --json " + cli::fixture_file("sdf_leaf", "robot.urdf"));
  EXPECT_EQ(r.exit_code, 0);
  const json j = report(r);
  EXPECT_EQ(j["status"], "warnings");
  EXPECT_TRUE(has_finding(j, "ZeroInertiaBody", "warning"));
}

TEST(Cli, SerialModelNote) {
  const cli::Run r = cli::run("check --json " + cli::fixture_file("serial_2r", "robot.urdf"));
  EXPECT_EQ(r.exit_code, 0);
  const json j = report(r);
  EXPECT_TRUE(has_finding(j, "SerialModel", "note"));
  EXPECT_EQ(j["payload"]["closures"].size(), 0u);
}

TEST(Cli, GenYamlMatchesCorpus) {
  const cli::Run r = cli::run("gen-yaml " + cli::fixture_file("digit_leg", "robot.urdf"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, slurp(fs::path(XURDF_FIXTURE_DIR) / "digit_leg" / "robot.yaml"));
  const cli::Run bad =
      cli::run("gen-yaml --closure-pattern '(' " + cli::fixture_file("digit_leg", "robot.urdf"));
  EXPECT_EQ(bad.exit_code, 1);
}

TEST(Cli, ProjectWritesAConfiguration) {
  const fs::path start = temp_path("xurdf_start.json");
  const fs::path out = temp_path("xurdf_out.json");
  {
    std::ofstream f(start);
    f << "[0.2, -0.1, 0.15]";
  }
  const std::string files = cli::fixture_file("four_bar", "robot.urdf") + " " +
                            cli::fixture_file("four_bar", "robot.yaml");
  const cli::Run r = cli::run("project --json " + files + " --config-in " +
                              cli::quote(start.string()) + " --config-out " +
                              cli::quote(out.string()));
  ASSERT_EQ(r.exit_code, 0);
  const json j = report(r);
  EXPECT_GT(j["payload"]["iterations"].get<int>(), 0);
  EXPECT_LT(j["payload"]["final_norm"].get<double>(), 1e-8);
  const cli::Run check = cli::run("check --json " + files + " --config " + cli::quote(out.string()));
  ASSERT_EQ(check.exit_code, 0);
  const json c = report(check);
  EXPECT_EQ(c["payload"]["configuration_source"], "file");
  EXPECT_LT(c["payload"]["residual_norm"].get<double>(), 1e-8);

  {
    std::ofstream f(start);
    f << "[0.2]";
  }
  EXPECT_EQ(cli::run("project " + files + " --config-in " + cli::quote(start.string())).exit_code, 1);
  fs::remove(start);
  fs::remove(out);
}

TEST(Cli, NoAutoSpherical) {
  const std::string files = cli::fixture_file("gimbal", "robot.urdf") + " " +
                            cli::fixture_file("gimbal", "robot.yaml");
  EXPECT_EQ(report(cli::run("info --json " + files))["payload"]["n_q"], 7);
  EXPECT_EQ(report(cli::run("info --json --no-auto-spherical " + files))["payload"]["n_q"], 6);
}
