#include "xurdf/fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "xurdf/errors.hpp"

namespace xurdf {

namespace fs = std::filesystem;

namespace {

FixtureExpectation parse_expectation(const std::string& text, const std::string& where) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Io, where, e.what());
  }
  FixtureExpectation out;
  out.name = j.value("name", "");
  out.floating_base = j.value("floating_base", false);
  out.n_q = j.at("n_q").get<int>();
  out.n_v = j.at("n_v").get<int>();
  out.m = j.at("m").get<int>();
  out.rank_k = j.at("rank_k").get<int>();
  out.n_actuated = j.at("n_actuated").get<int>();
  out.internal_mobilities = j.at("internal_mobilities").get<int>();
  out.tolerance = j.value("tolerance", 1e-8);
  out.projectable = j.value("projectable", true);
  if (j.contains("configuration")) {
    const auto values = j["configuration"].get<std::vector<double>>();
    out.configuration = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                          static_cast<Eigen::Index>(values.size()));
  }
  if (j.contains("findings")) {
    out.errors = j["findings"].value("errors", std::vector<std::string>{});
    out.warnings = j["findings"].value("warnings", std::vector<std::string>{});
  }
  return out;
}

}  // namespace

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, path.string(), "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path fixture_root() {
  if (const char* env = std::getenv("XURDF_FIXTURES"); env != nullptr && *env != '\0') {
    return fs::path(env);
  }
  return fs::path(XURDF_FIXTURE_DIR);
}

std::vector<std::string> list_fixtures() {
  std::vector<std::string> names;
  const fs::path root = fixture_root();
  if (!fs::is_directory(root)) return names;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "robot.urdf")) {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

Fixture load_fixture(const std::string& name) {
  Fixture f;
  f.dir = fixture_root() / name;
  if (name.empty() || name.find('/') != std::string::npos ||
      !fs::exists(f.dir / "robot.urdf")) {
    throw Error(ErrorCode::UnknownFixture, name, "no such fixture under " + fixture_root().string());
  }
  f.urdf_text = read_text_file(f.dir / "robot.urdf");
  if (fs::exists(f.dir / "robot.yaml")) f.yaml_text = read_text_file(f.dir / "robot.yaml");
  f.expect = parse_expectation(read_text_file(f.dir / "expect.json"), name);
  f.urdf = parse_urdf(f.urdf_text);
  f.extension = parse_extension(f.yaml_text);
  BuildOptions options;
  options.floating_base = f.expect.floating_base;
  f.built = build_model(f.urdf, f.extension, options);
  return f;
}

}  // namespace xurdf
