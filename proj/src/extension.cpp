#include "xurdf/extension.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

#include "xurdf/errors.hpp"

namespace xurdf {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

const char* kClosedLoop = "closed_loop";
const char* kActuated = "actuated";
const char* kReplacements = "joint_replacements";

std::string scalar(const YAML::Node& node, const std::string& where) {
  if (!node.IsScalar()) {
    throw Error(ErrorCode::InvalidValue, where, "expected a scalar",
                SourceLocation{node.Mark().line + 1, node.Mark().column + 1});
  }
  return node.Scalar();
}

std::vector<ClosureSpec> read_closures(const YAML::Node& node) {
  std::vector<ClosureSpec> closures;
  if (node.IsNull()) return closures;
  if (!node.IsSequence()) throw Error(ErrorCode::InvalidValue, kClosedLoop, "expected a list");
  std::set<std::string> names;
  for (const auto& entry : node) {
    if (!entry.IsMap()) throw Error(ErrorCode::InvalidClosure, kClosedLoop, "entry is not a map");
    ClosureSpec closure;
    auto field = [&entry, &closure](const char* key) {
      const YAML::Node value = entry[key];
      if (!value) {
        throw Error(ErrorCode::InvalidClosure, closure.name.empty() ? kClosedLoop : closure.name,
                    std::string("missing field '") + key + "'");
      }
      return scalar(value, std::string(kClosedLoop) + "." + key);
    };
    closure.name = field("name");
    const std::string type = field("type");
    auto parsed = constraint_type_from_string(type);
    if (!parsed) throw Error(ErrorCode::BadConstraintType, type, "closure '" + closure.name + "'");
    closure.type = *parsed;
    closure.frame_a = field("link_1");
    closure.frame_b = field("link_2");
    if (closure.frame_a == closure.frame_b) {
      throw Error(ErrorCode::InvalidClosure, closure.name, "link_1 and link_2 are the same frame");
    }
    if (!names.insert(closure.name).second) {
      throw Error(ErrorCode::DuplicateClosureName, closure.name, "closure name used twice");
    }
    closures.push_back(std::move(closure));
  }
  return closures;
}

ActuationSpec read_actuation(const YAML::Node& node) {
  ActuationSpec spec;
  if (node.IsNull()) return spec;
  if (!node.IsSequence()) throw Error(ErrorCode::InvalidValue, kActuated, "expected a list");
  std::set<std::string> seen;
  for (const auto& entry : node) {
    std::string name = scalar(entry, kActuated);
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::DuplicateName, name, "actuated joint listed twice");
    }
    spec.joints.push_back(std::move(name));
  }
  return spec;
}

ReplacementSpec read_replacements(const YAML::Node& node) {
  ReplacementSpec spec;
  if (node.IsNull()) return spec;
  if (!node.IsMap()) throw Error(ErrorCode::InvalidValue, kReplacements, "expected a mapping");
  for (const auto& item : node) {
    Replacement replacement;
    if (item.first.IsSequence()) {
      for (const auto& j : item.first) replacement.joints.push_back(scalar(j, kReplacements));
    } else {
      replacement.joints.push_back(scalar(item.first, kReplacements));
    }
    if (replacement.joints.size() != 1 && replacement.joints.size() != 3) {
      throw Error(ErrorCode::InvalidReplacement, kReplacements,
                  "a replacement names one joint or a chain of three");
    }
    const std::string target = scalar(item.second, kReplacements);
    if (lower(target) != "spherical") {
      throw Error(ErrorCode::InvalidReplacement, replacement.joints.front(),
                  "unsupported target '" + target + "'");
    }
    spec.entries.push_back(std::move(replacement));
  }
  return spec;
}

}  // namespace

std::string_view to_string(ConstraintType type) {
  return type == ConstraintType::Constraint3D ? "3D" : "6D";
}

std::optional<ConstraintType> constraint_type_from_string(std::string_view text) {
  const std::string t = lower(text);
  if (t == "3d") return ConstraintType::Constraint3D;
  if (t == "6d") return ConstraintType::Constraint6D;
  return std::nullopt;
}

std::string_view to_string(ReplacementTarget) { return "spherical"; }

ExtensionDoc parse_extension(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::YamlSyntax, "", e.msg,
                SourceLocation{e.mark.line + 1, e.mark.column + 1});
  }
  ExtensionDoc doc;
  if (!root || root.IsNull()) return doc;
  if (!root.IsMap()) throw Error(ErrorCode::YamlSyntax, "", "top level must be a mapping");

  try {
    for (const auto& item : root) {
      const std::string key = scalar(item.first, "top level key");
      if (key == kClosedLoop) {
        doc.closures = read_closures(item.second);
      } else if (key == kActuated) {
        doc.actuation = read_actuation(item.second);
      } else if (key == kReplacements) {
        doc.replacements = read_replacements(item.second);
      } else {
        doc.extras.emplace_back(key, YAML::Dump(item.second));
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidValue, "", e.msg,
                SourceLocation{e.mark.line + 1, e.mark.column + 1});
  }
  return doc;
}

std::string serialize_extension(const ExtensionDoc& doc) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << kClosedLoop << YAML::Value;
  if (doc.closures.empty()) {
    out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
  } else {
    out << YAML::BeginSeq;
    for (const auto& c : doc.closures) {
      out << YAML::BeginMap
          << YAML::Key << "name" << YAML::Value << c.name
          << YAML::Key << "type" << YAML::Value << std::string(to_string(c.type))
          << YAML::Key << "link_1" << YAML::Value << c.frame_a
          << YAML::Key << "link_2" << YAML::Value << c.frame_b
          << YAML::EndMap;
    }
    out << YAML::EndSeq;
  }

  out << YAML::Key << kActuated << YAML::Value;
  if (doc.actuation.joints.empty()) {
    out << YAML::Flow << YAML::BeginSeq << YAML::EndSeq;
  } else {
    out << YAML::BeginSeq;
    for (const auto& j : doc.actuation.joints) out << j;
    out << YAML::EndSeq;
  }

  out << YAML::Key << kReplacements << YAML::Value;
  if (doc.replacements.entries.empty()) {
    out << YAML::Flow << YAML::BeginMap << YAML::EndMap;
  } else {
    out << YAML::BeginMap;
    for (const auto& r : doc.replacements.entries) {
      out << YAML::Key;
      if (r.joints.size() == 1) {
        out << r.joints.front();
      } else {
        out << YAML::Flow << YAML::BeginSeq;
        for (const auto& j : r.joints) out << j;
        out << YAML::EndSeq;
      }
      out << YAML::Value << std::string(to_string(r.target));
    }
    out << YAML::EndMap;
  }

  for (const auto& [key, text] : doc.extras) {
    out << YAML::Key << key << YAML::Value << YAML::Load(text);
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

GeneratedExtension generate_extension(const UrdfDocument& urdf,
                                      const NamingConvention& convention) {
  std::regex closure_re, actuated_re;
  try {
    closure_re = std::regex(convention.closure_pattern);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::BadPattern, convention.closure_pattern, e.what());
  }
  try {
    actuated_re = std::regex(convention.actuated_pattern);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::BadPattern, convention.actuated_pattern, e.what());
  }
  if (closure_re.mark_count() < 3) {
    throw Error(ErrorCode::BadPattern, convention.closure_pattern,
                "closure pattern needs capture groups (type)(id)(endpoint)");
  }

  struct Endpoint {
    std::string tag;
    std::string link;
    std::string type;
  };
  std::map<std::string, std::vector<Endpoint>> by_id;  // sorted by closure id
  for (const auto& link : urdf.links) {
    std::smatch m;
    if (!std::regex_search(link.name, m, closure_re)) continue;
    by_id[m[2].str()].push_back({m[3].str(), link.name, m[1].str()});
  }

  GeneratedExtension out;
  for (auto& [id, ends] : by_id) {
    if (ends.size() == 1) {
      throw Error(ErrorCode::UnpairedClosureFrame, ends.front().link,
                  "no partner frame for closure '" + id + "'");
    }
    std::sort(ends.begin(), ends.end(),
              [](const Endpoint& a, const Endpoint& b) { return a.tag < b.tag; });
    if (ends.size() > 2 || ends[0].tag == ends[1].tag) {
      throw Error(ErrorCode::AmbiguousPair, id, std::to_string(ends.size()) + " frames match");
    }
    auto type = constraint_type_from_string(ends[0].type);
    if (!type) throw Error(ErrorCode::BadConstraintType, ends[0].type, "closure '" + id + "'");
    if (lower(ends[0].type) != lower(ends[1].type)) {
      throw Error(ErrorCode::AmbiguousPair, id, "endpoints disagree on the constraint type");
    }
    out.doc.closures.push_back({id, *type, ends[0].link, ends[1].link});
  }
  if (out.doc.closures.empty()) out.warnings.push_back("no link matches the closure pattern");

  for (const auto& joint : urdf.joints) {
    if (!std::regex_search(joint.name, actuated_re)) continue;
    if (joint.type == JointType::Fixed) {
      out.warnings.push_back("fixed joint '" + joint.name + "' matches the actuated pattern");
      continue;
    }
    out.doc.actuation.joints.push_back(joint.name);
  }
  if (out.doc.actuation.joints.empty()) {
    out.warnings.push_back("no joint matches the actuated pattern");
  }
  return out;
}

}  // namespace xurdf
