// xurdf: validate, inspect, generate and project extended URDF models.

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "xurdf/constraints.hpp"
#include "xurdf/errors.hpp"
#include "xurdf/extension.hpp"
#include "xurdf/fixtures.hpp"
#include "xurdf/kinematics.hpp"
#include "xurdf/model.hpp"
#include "xurdf/urdf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xurdf;

namespace {

constexpr int kSchemaVersion = 1;

enum Exit { kOk = 0, kParse = 1, kSemantic = 2, kNumeric = 3 };

// ---- logging ----

enum class Level { Error, Warn, Info, Debug };

Level log_level() {
  static const Level level = [] {
    const char* env = std::getenv("XURDF_LOG");
    const std::string v = env ? env : "";
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
  }();
  return level;
}

void log(Level level, const std::string& message) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level > log_level()) return;
  std::cerr << "xurdf: " << names[static_cast<int>(level)] << ": " << message << "\n";
}

// ---- report ----

struct Report {
  std::string command;
  bool echo = false;  ///< mirror findings on stderr
  json findings = json::array();
  json payload = json::object();
  int exit_code = kOk;

  void add(const std::string& severity, const std::string& code, const std::string& subject,
           const std::string& message, const std::string& detail = "",
           const std::optional<SourceLocation>& where = std::nullopt) {
    json f = {{"severity", severity}, {"code", code}, {"subject", subject}, {"message", message}};
    if (!detail.empty()) f["detail"] = detail;
    if (where) {
      f["line"] = where->line;
      f["column"] = where->column;
    }
    findings.push_back(std::move(f));
    if (echo) log(severity == "error" ? Level::Error : (severity == "warning" ? Level::Warn : Level::Info),
        code + (subject.empty() ? "" : "(" + subject + ")") + ": " + message);
  }

  std::string status() const {
    if (exit_code != kOk) return "error";
    for (const auto& f : findings) {
      if (f["severity"] == "warning") return "warnings";
    }
    return "ok";
  }

  json to_json() const {
    return {{"schema_version", kSchemaVersion},
            {"command", command},
            {"status", status()},
            {"findings", findings},
            {"payload", payload}};
  }
};

int exit_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownClosureFrame:
    case ErrorCode::UnknownActuatedJoint:
    case ErrorCode::ReplacementTargetMissing:
    case ErrorCode::ReplacementNotApplicable:
    case ErrorCode::UnpairedClosureFrame:
    case ErrorCode::AmbiguousPair:
      return kSemantic;
    case ErrorCode::AngleNearPi:
    case ErrorCode::MaxIterations:
      return kNumeric;
    default:
      return kParse;
  }
}

// Tree-structure problems in the XML are reported under one code.
std::string finding_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownJointType:
    case ErrorCode::DanglingLinkRef:
    case ErrorCode::MultipleParents:
    case ErrorCode::MultipleRoots:
    case ErrorCode::NoRoot:
    case ErrorCode::KinematicCycle:
    case ErrorCode::DuplicateName:
    case ErrorCode::MissingAttribute:
    case ErrorCode::InvalidValue:
      return "XmlSemantics";
    default:
      return std::string(to_string(code));
  }
}

void record_error(Report& report, const Error& e) {
  const std::string code = finding_code(e.code());
  std::string message = e.detail();
  if (e.location()) {
    message = "line " + std::to_string(e.location()->line) + ", column " +
              std::to_string(e.location()->column) + ": " + message;
  }
  report.add("error", code, e.subject(), message,
             code == to_string(e.code()) ? "" : std::string(to_string(e.code())), e.location());
  report.exit_code = exit_for(e.code());
}

void write_atomic(const fs::path& path, const std::string& text) {
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, path.string(), "cannot write file");
    out << text;
    if (!out.flush()) throw Error(ErrorCode::Io, path.string(), "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorCode::Io, path.string(), ec.message());
  }
}

Eigen::VectorXd read_configuration(const fs::path& path, const RobotModel& model) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Io, path.string(), std::string("not JSON: ") + e.what());
  }
  if (!j.is_array()) throw Error(ErrorCode::Io, path.string(), "expected a JSON array");
  Eigen::VectorXd q(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw Error(ErrorCode::Io, path.string(), "non-numeric entry");
    q(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  check_configuration(model, q);
  return q;
}

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// ---- shared loading ----

struct ModelOptions {
  std::string urdf;
  std::string yaml;
  bool floating_base = false;
  bool no_auto_spherical = false;
};

void add_model_options(CLI::App* cmd, ModelOptions& opt, bool yaml_required) {
  cmd->add_option("urdf", opt.urdf, "URDF file")->required();
  auto* y = cmd->add_option("yaml", opt.yaml, "YAML extension file");
  if (yaml_required) y->required();
  cmd->add_flag("--floating-base", opt.floating_base, "Add a floating root joint");
  cmd->add_flag("--no-auto-spherical", opt.no_auto_spherical,
                "Keep concurrent revolute triples as they are");
}

// Parses and builds, recording findings. Returns nothing on failure.
std::optional<BuildResult> load_model(const ModelOptions& opt, Report& report) {
  try {
    const UrdfDocument urdf = parse_urdf(read_text_file(opt.urdf));
    log(Level::Info, "parsed " + opt.urdf + ": " + std::to_string(urdf.links.size()) +
                         " links, " + std::to_string(urdf.joints.size()) + " joints");
    ExtensionDoc ext;
    if (!opt.yaml.empty()) ext = parse_extension(read_text_file(opt.yaml));
    BuildOptions options;
    options.floating_base = opt.floating_base;
    options.auto_spherical = !opt.no_auto_spherical;
    BuildResult built = build_model(urdf, ext, options);
    if (opt.yaml.empty() && built.model.closures.empty()) {
      report.add("note", "SerialModel", built.model.name, "serial model, no extension");
    }
    for (const auto& s : built.model.substitutions) {
      std::string joined;
      for (const auto& r : s.replaced) joined += (joined.empty() ? "" : ", ") + r;
      report.add("note", "SphericalSubstitution", s.spherical, "replaces " + joined);
    }
    for (const auto& w : built.report.warnings) report.add("warning", w.code, w.subject, w.message);
    for (const auto& e : built.report.errors) report.add("error", e.code, e.subject, e.message);
    if (!built.report.ok()) {
      report.exit_code = kSemantic;
      return std::nullopt;
    }
    return built;
  } catch (const Error& e) {
    record_error(report, e);
    return std::nullopt;
  }
}

json layout_json(const RobotModel& model) {
  json out = json::array();
  for (const auto& j : model.joints) {
    if (j.nq == 0 && j.nv == 0) continue;
    out.push_back({{"joint", j.name},
                   {"kind", std::string(to_string(j.kind))},
                   {"q_offset", j.q_offset},
                   {"nq", j.nq},
                   {"v_offset", j.v_offset},
                   {"nv", j.nv}});
  }
  return out;
}

json closures_json(const RobotModel& model, const Eigen::VectorXd& q, Report& report) {
  json out = json::array();
  try {
    const ConstraintResidual r = residual(model, forward_kinematics(model, q));
    for (const auto& s : r.slices) {
      const auto& c = model.closures[static_cast<size_t>(s.closure)];
      out.push_back({{"name", c.name},
                     {"type", std::string(to_string(c.type))},
                     {"link_1", model.frames[static_cast<size_t>(c.frame_a)].name},
                     {"link_2", model.frames[static_cast<size_t>(c.frame_b)].name},
                     {"residual_norm", r.values.segment(s.offset, s.dim).lpNorm<Eigen::Infinity>()}});
    }
  } catch (const Error& e) {
    record_error(report, e);
  }
  return out;
}

// Given configuration, or the neutral one projected onto the closures.
std::optional<Eigen::VectorXd> evaluation_configuration(const RobotModel& model,
                                                        const std::string& config_path,
                                                        Report& report) {
  if (!config_path.empty()) {
    report.payload["configuration_source"] = "file";
    return read_configuration(config_path, model);
  }
  report.payload["configuration_source"] = "projected_neutral";
  try {
    return project(model, neutral(model)).q;
  } catch (const ProjectionError& e) {
    report.add("warning", "ProjectionFailed", model.name, e.detail());
    return e.last();
  }
}

// ---- commands ----

int run_validate(const ModelOptions& opt, Report& report) {
  const auto built = load_model(opt, report);
  if (built) {
    const RobotModel& m = built->model;
    report.payload = {{"robot", m.name},
                      {"n_q", m.nq},
                      {"n_v", m.nv},
                      {"joints", static_cast<int>(m.joints.size())},
                      {"frames", static_cast<int>(m.frames.size())},
                      {"closures", static_cast<int>(m.closures.size())},
                      {"actuated", static_cast<int>(m.actuated.size())}};
  }
  return report.exit_code;
}

int run_info(const ModelOptions& opt, const std::string& config, bool layout, bool residuals_only,
             Report& report) {
  const auto built = load_model(opt, report);
  if (!built) return report.exit_code;
  const RobotModel& m = built->model;
  try {
    const auto q = evaluation_configuration(m, config, report);
    report.payload["robot"] = m.name;
    report.payload["closures"] = closures_json(m, *q, report);
    if (report.exit_code != kOk) return report.exit_code;
    if (!residuals_only) {
      const MobilityReport r = mobility_report(m, *q);
      report.payload["n_q"] = r.n_q;
      report.payload["n_v"] = r.n_v;
      report.payload["m"] = r.m;
      report.payload["rank_k"] = r.rank_k;
      report.payload["n_actuated"] = r.n_actuated;
      report.payload["internal_mobilities"] = r.internal_mobilities;
      report.payload["net_dof"] = r.net_dof;
      report.payload["smallest_retained_singular_value"] = r.smallest_retained;
      for (const auto& w : r.warnings) report.add("warning", w.code, w.subject, w.message);
    }
    report.payload["residual_norm"] =
        report.payload["closures"].empty() ? 0.0 : [&] {
          double worst = 0.0;
          for (const auto& c : report.payload["closures"]) {
            worst = std::max(worst, c["residual_norm"].get<double>());
          }
          return worst;
        }();
    report.payload["configuration"] = to_json(*q);
    if (layout) report.payload["layout"] = layout_json(m);
  } catch (const Error& e) {
    record_error(report, e);
  }
  return report.exit_code;
}

int run_gen_yaml(const std::string& urdf_path, const NamingConvention& convention,
                 const std::string& out_path, bool json_output, Report& report) {
  try {
    const UrdfDocument urdf = parse_urdf(read_text_file(urdf_path));
    const GeneratedExtension gen = generate_extension(urdf, convention);
    for (const auto& w : gen.warnings) report.add("warning", "NoMatch", urdf.name, w);
    const std::string text = serialize_extension(gen.doc);
    report.payload = {{"closures", static_cast<int>(gen.doc.closures.size())},
                      {"actuated", static_cast<int>(gen.doc.actuation.joints.size())}};
    if (!out_path.empty()) {
      write_atomic(out_path, text);
      report.payload["out"] = out_path;
    } else if (json_output) {
      report.payload["yaml"] = text;
    } else {
      std::cout << text;
    }
  } catch (const Error& e) {
    record_error(report, e);
  }
  return report.exit_code;
}

int run_project(const ModelOptions& opt, const std::string& config_in,
                const std::string& config_out, double tol, int max_iterations, Report& report) {
  const auto built = load_model(opt, report);
  if (!built) return report.exit_code;
  const RobotModel& m = built->model;
  try {
    const Eigen::VectorXd q0 = config_in.empty() ? neutral(m) : read_configuration(config_in, m);
    ProjectionOptions options;
    options.tol = tol;
    options.max_iterations = max_iterations;
    try {
      const Projection p = project(m, q0, options);
      report.payload = {{"iterations", p.stats.iterations},
                        {"initial_norm", p.stats.initial_norm},
                        {"final_norm", p.stats.final_norm},
                        {"configuration", to_json(p.q)}};
      if (!config_out.empty()) {
        write_atomic(config_out, to_json(p.q).dump(2) + "\n");
        report.payload["out"] = config_out;
      }
    } catch (const ProjectionError& e) {
      report.payload = {{"iterations", e.stats().iterations},
                        {"initial_norm", e.stats().initial_norm},
                        {"final_norm", e.stats().final_norm}};
      record_error(report, e);
    }
  } catch (const Error& e) {
    record_error(report, e);
  }
  return report.exit_code;
}

void print_human(const Report& report) {
  for (const auto& f : report.findings) {
    std::cout << f["severity"].get<std::string>() << " " << f["code"].get<std::string>();
    const std::string subject = f["subject"];
    if (!subject.empty()) std::cout << " (" << subject << ")";
    std::cout << ": " << f["message"].get<std::string>() << "\n";
  }
  const json& p = report.payload;
  if (report.command == "validate" && p.contains("n_q")) {
    std::cout << p["robot"].get<std::string>() << ": n_q " << p["n_q"] << ", n_v " << p["n_v"]
              << ", " << p["closures"] << " closures, " << p["actuated"] << " actuated\n";
  }
  if ((report.command == "info" || report.command == "check") && p.contains("closures")) {
    if (p.contains("n_v")) {
      std::cout << "n_q " << p["n_q"] << "\nn_v " << p["n_v"] << "\nm " << p["m"] << "\nrank_k "
                << p["rank_k"] << "\nn_actuated " << p["n_actuated"]
                << "\ninternal_mobilities " << p["internal_mobilities"] << "\nnet_dof "
                << p["net_dof"] << "\n";
    }
    for (const auto& c : p["closures"]) {
      std::cout << "closure " << c["name"].get<std::string>() << " "
                << c["type"].get<std::string>() << " residual " << c["residual_norm"] << "\n";
    }
    if (p.contains("layout")) {
      for (const auto& l : p["layout"]) {
        std::cout << l["joint"].get<std::string>() << " " << l["kind"].get<std::string>()
                  << " q[" << l["q_offset"] << ":" << l["q_offset"].get<int>() + l["nq"].get<int>()
                  << "] v[" << l["v_offset"] << ":"
                  << l["v_offset"].get<int>() + l["nv"].get<int>() << "]\n";
      }
    }
  }
  if (report.command == "project" && p.contains("final_norm")) {
    std::cout << "iterations " << p["iterations"] << "\nfinal_norm " << p["final_norm"] << "\n";
  }
  std::cout << "status " << report.status() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended URDF toolkit: closed-loop models from URDF plus a YAML extension"};
  app.require_subcommand(1);
  bool json_output = false;
  app.add_flag("--json", json_output, "Print a JSON report");

  ModelOptions validate_opt;
  auto* validate = app.add_subcommand("validate", "Parse, build and validate a model");
  add_model_options(validate, validate_opt, false);

  ModelOptions info_opt;
  std::string info_config;
  bool info_layout = false;
  auto* info = app.add_subcommand("info", "Mobility report and closure residuals");
  add_model_options(info, info_opt, false);
  info->add_option("--config", info_config, "JSON array configuration (default: projected neutral)");
  info->add_flag("--layout", info_layout, "Include the configuration layout");

  ModelOptions check_opt;
  std::string check_config;
  auto* check = app.add_subcommand("check", "Closure residuals only");
  add_model_options(check, check_opt, false);
  check->add_option("--config", check_config, "JSON array configuration (default: projected neutral)");

  std::string gen_urdf, gen_out;
  NamingConvention convention;
  auto* gen = app.add_subcommand("gen-yaml", "Derive an extension file from naming conventions");
  gen->add_option("urdf", gen_urdf, "URDF file")->required();
  gen->add_option("--closure-pattern", convention.closure_pattern,
                  "Regex with groups (type, id, endpoint)");
  gen->add_option("--actuated-pattern", convention.actuated_pattern, "Regex for actuated joints");
  gen->add_option("--out", gen_out, "Output file (default: stdout)");

  ModelOptions project_opt;
  std::string config_in, config_out;
  double tol = 1e-8;
  int max_iterations = 100;
  auto* proj = app.add_subcommand("project", "Project a configuration onto the closures");
  add_model_options(proj, project_opt, true);
  proj->add_option("--config-in", config_in, "JSON array start configuration (default: neutral)");
  proj->add_option("--config-out", config_out, "Where to write the projected configuration");
  proj->add_option("--tol", tol, "Infinity-norm tolerance on the residual");
  proj->add_option("--max-iterations", max_iterations, "Iteration limit");

  for (auto* sub : {validate, info, check, gen, proj}) {
    sub->add_flag("--json", json_output, "Print a JSON report");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParse;
  }

  Report report;
  report.echo = json_output || (*gen && gen_out.empty());
  int code = kOk;
  if (*validate) {
    report.command = "validate";
    code = run_validate(validate_opt, report);
  } else if (*info) {
    report.command = "info";
    code = run_info(info_opt, info_config, info_layout, false, report);
  } else if (*check) {
    report.command = "check";
    code = run_info(check_opt, check_config, false, true, report);
  } else if (*gen) {
    report.command = "gen-yaml";
    code = run_gen_yaml(gen_urdf, convention, gen_out, json_output, report);
  } else if (*proj) {
    report.command = "project";
    code = run_project(project_opt, config_in, config_out, tol, max_iterations, report);
  }

  if (json_output) {
    std::cout << report.to_json().dump(2) << "\n";
  } else if (!(report.command == "gen-yaml" && code == kOk && gen_out.empty())) {
    print_human(report);
  }
  return code;
}
