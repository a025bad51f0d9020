#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "xurdf/extension.hpp"
#include "xurdf/model.hpp"
#include "xurdf/urdf.hpp"

namespace xurdf {

/// Contents of a fixture's expect.json.
struct FixtureExpectation {
  std::string name;
  bool floating_base = false;
  int n_q = 0;
  int n_v = 0;
  int m = 0;
  int rank_k = 0;
  int n_actuated = 0;
  int internal_mobilities = 0;
  double tolerance = 1e-8;
  /// A configuration satisfying the closures; empty means "project from neutral".
  Eigen::VectorXd configuration;
  std::vector<std::string> errors;    ///< expected validation error codes
  std::vector<std::string> warnings;  ///< expected validation warning codes
  bool projectable = true;            ///< false for deliberately infeasible models
};

struct Fixture {
  std::filesystem::path dir;
  std::string urdf_text;
  std::string yaml_text;
  UrdfDocument urdf;
  ExtensionDoc extension;
  BuildResult built;
  FixtureExpectation expect;
};

/// $XURDF_FIXTURES if set, else the corpus directory of the source tree.
std::filesystem::path fixture_root();

/// Fixture names, sorted.
std::vector<std::string> list_fixtures();

/// Throws UnknownFixture when fixtures/<name>/ is missing.
Fixture load_fixture(const std::string& name);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace xurdf
