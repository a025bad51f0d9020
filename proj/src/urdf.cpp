#include "xurdf/urdf.hpp"

#include <expat.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "xurdf/errors.hpp"
#include "xurdf/number_format.hpp"

namespace xurdf {

Placement Origin::placement() const {
  return {Rotation::from_rpy(rpy.x(), rpy.y(), rpy.z()), xyz};
}

SpatialInertia SpatialInertia::transformed(const Placement& m) const {
  const Matrix3 r = m.rotation_matrix();
  return {mass, m.act(com), r * rotational * r.transpose()};
}

SpatialInertia SpatialInertia::operator+(const SpatialInertia& other) const {
  const double total = mass + other.mass;
  if (!(total > 0.0)) {
    return {0.0, Vector3::Zero(), rotational + other.rotational};
  }
  const Vector3 c = (mass * com + other.mass * other.com) / total;
  auto shifted = [&c](const SpatialInertia& body) {
    const Vector3 d = body.com - c;
    return Matrix3(body.rotational +
                   body.mass * (d.squaredNorm() * Matrix3::Identity() - d * d.transpose()));
  };
  return {total, c, shifted(*this) + shifted(other)};
}

Matrix6 SpatialInertia::matrix() const {
  const Matrix3 c = skew(com);
  Matrix6 out;
  out.topLeftCorner<3, 3>() = rotational - mass * c * c;
  out.topRightCorner<3, 3>() = mass * c;
  out.bottomLeftCorner<3, 3>() = -mass * c;
  out.bottomRightCorner<3, 3>() = mass * Matrix3::Identity();
  return out;
}

SpatialInertia Inertial::spatial() const {
  Matrix3 local;
  local << ixx, ixy, ixz,
           ixy, iyy, iyz,
           ixz, iyz, izz;
  const Matrix3 r = origin.placement().rotation_matrix();
  return {mass, origin.xyz, r * local * r.transpose()};
}

std::string_view to_string(JointType type) {
  switch (type) {
    case JointType::Revolute: return "revolute";
    case JointType::Continuous: return "continuous";
    case JointType::Prismatic: return "prismatic";
    case JointType::Fixed: return "fixed";
    case JointType::Floating: return "floating";
    case JointType::Planar: return "planar";
  }
  return "fixed";
}

std::optional<JointType> joint_type_from_string(std::string_view text) {
  for (JointType t : {JointType::Revolute, JointType::Continuous, JointType::Prismatic,
                      JointType::Fixed, JointType::Floating, JointType::Planar}) {
    if (to_string(t) == text) return t;
  }
  return std::nullopt;
}

const LinkDesc* UrdfDocument::find_link(std::string_view link) const {
  for (const auto& l : links) {
    if (l.name == link) return &l;
  }
  return nullptr;
}

const JointDesc* UrdfDocument::find_joint(std::string_view joint) const {
  for (const auto& j : joints) {
    if (j.name == joint) return &j;
  }
  return nullptr;
}

const JointDesc* UrdfDocument::parent_joint(std::string_view link) const {
  for (const auto& j : joints) {
    if (j.child == link) return &j;
  }
  return nullptr;
}

const std::string& UrdfDocument::root_link() const {
  for (const auto& l : links) {
    if (parent_joint(l.name) == nullptr) return l.name;
  }
  throw Error(ErrorCode::NoRoot, name, "every link is the child of a joint");
}

namespace {

// --- minimal DOM built with expat -------------------------------------------

struct XmlNode {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<XmlNode>> children;
  SourceLocation where;
  long begin = 0;  // byte offsets of the element text in the input
  long end = 0;
  long start_tag_length = 0;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

struct DomBuilder {
  XML_Parser parser = nullptr;
  std::unique_ptr<XmlNode> root;
  std::vector<XmlNode*> stack;

  static void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
    auto* self = static_cast<DomBuilder*>(user);
    auto node = std::make_unique<XmlNode>();
    node->name = name;
    for (int i = 0; attrs[i] != nullptr; i += 2) {
      node->attributes.emplace_back(attrs[i], attrs[i + 1]);
    }
    node->where = {static_cast<int>(XML_GetCurrentLineNumber(self->parser)),
                   static_cast<int>(XML_GetCurrentColumnNumber(self->parser)) + 1};
    node->begin = static_cast<long>(XML_GetCurrentByteIndex(self->parser));
    node->start_tag_length = XML_GetCurrentByteCount(self->parser);
    XmlNode* raw = node.get();
    if (self->stack.empty()) {
      self->root = std::move(node);
    } else {
      self->stack.back()->children.push_back(std::move(node));
    }
    self->stack.push_back(raw);
  }

  static void on_end(void* user, const XML_Char*) {
    auto* self = static_cast<DomBuilder*>(user);
    XmlNode* node = self->stack.back();
    const int count = XML_GetCurrentByteCount(self->parser);
    if (count == 0) {
      node->end = node->begin + node->start_tag_length;  // <empty/> element
    } else {
      node->end = static_cast<long>(XML_GetCurrentByteIndex(self->parser)) + count;
    }
    self->stack.pop_back();
  }
};

std::unique_ptr<XmlNode> parse_dom(std::string_view text) {
  DomBuilder builder;
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  builder.parser = parser.get();
  XML_SetUserData(parser.get(), &builder);
  XML_SetElementHandler(parser.get(), &DomBuilder::on_start, &DomBuilder::on_end);
  if (XML_Parse(parser.get(), text.data(), static_cast<int>(text.size()), 1) ==
      XML_STATUS_ERROR) {
    const SourceLocation where{
        static_cast<int>(XML_GetCurrentLineNumber(parser.get())),
        static_cast<int>(XML_GetCurrentColumnNumber(parser.get())) + 1};
    throw Error(ErrorCode::XmlSyntax, "", XML_ErrorString(XML_GetErrorCode(parser.get())),
                where);
  }
  if (!builder.root) throw Error(ErrorCode::XmlSyntax, "", "empty document");
  return std::move(builder.root);
}

// --- element readers ----------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::string slice(const XmlNode& node) const {
    return std::string(text_.substr(static_cast<size_t>(node.begin),
                                    static_cast<size_t>(node.end - node.begin)));
  }

  const std::string& required(const XmlNode& node, std::string_view key,
                              const std::string& path) const {
    const std::string* value = node.attribute(key);
    if (value == nullptr) {
      throw Error(ErrorCode::MissingAttribute, path + "@" + std::string(key), "required attribute is missing", node.where);
    }
    return *value;
  }

  double number(const XmlNode& node, std::string_view key, const std::string& path) const {
    const std::string& raw = required(node, key, path);
    auto value = parse_double(raw);
    if (!value) {
      throw Error(ErrorCode::InvalidValue, path + "@" + std::string(key),
                  "not a number: '" + raw + "'", node.where);
    }
    return *value;
  }

  std::optional<double> optional_number(const XmlNode& node, std::string_view key,
                                        const std::string& path) const {
    if (node.attribute(key) == nullptr) return std::nullopt;
    return number(node, key, path);
  }

  Vector3 vector3(const XmlNode& node, std::string_view key, const std::string& path,
                  const Vector3& fallback) const {
    const std::string* raw = node.attribute(key);
    if (raw == nullptr) return fallback;
    std::istringstream in(*raw);
    std::vector<std::string> tokens;
    for (std::string token; in >> token;) tokens.push_back(token);
    Vector3 out;
    bool ok = tokens.size() == 3;
    for (size_t i = 0; ok && i < 3; ++i) {
      auto value = parse_double(tokens[i]);
      ok = value.has_value();
      if (ok) out[static_cast<Eigen::Index>(i)] = *value;
    }
    if (!ok) {
      throw Error(ErrorCode::InvalidValue, path + "@" + std::string(key),
                  "expected three numbers, got '" + *raw + "'", node.where);
    }
    return out;
  }

  Origin origin(const XmlNode& node, const std::string& path) const {
    return {vector3(node, "xyz", path, Vector3::Zero()),
            vector3(node, "rpy", path, Vector3::Zero())};
  }

 private:
  std::string_view text_;
};

const XmlNode* single_child(const XmlNode& node, std::string_view name,
                            const std::string& path) {
  const XmlNode* found = nullptr;
  for (const auto& child : node.children) {
    if (child->name != name) continue;
    if (found != nullptr) {
      throw Error(ErrorCode::InvalidValue, path + "/" + std::string(name),
                  "element repeated", child->where);
    }
    found = child.get();
  }
  return found;
}

Inertial read_inertial(const Reader& reader, const XmlNode& node, const std::string& path) {
  Inertial inertial;
  if (const XmlNode* origin = single_child(node, "origin", path)) {
    inertial.origin = reader.origin(*origin, path + "/origin");
  }
  const XmlNode* mass = single_child(node, "mass", path);
  if (mass == nullptr) throw Error(ErrorCode::MissingAttribute, path + "/mass", "required element is missing", node.where);
  inertial.mass = reader.number(*mass, "value", path + "/mass");
  if (inertial.mass < 0.0) {
    throw Error(ErrorCode::InvalidValue, path + "/mass@value", "negative mass", mass->where);
  }
  const XmlNode* inertia = single_child(node, "inertia", path);
  if (inertia == nullptr) {
    throw Error(ErrorCode::MissingAttribute, path + "/inertia", "required element is missing", node.where);
  }
  const std::string ipath = path + "/inertia";
  inertial.ixx = reader.number(*inertia, "ixx", ipath);
  inertial.ixy = reader.number(*inertia, "ixy", ipath);
  inertial.ixz = reader.number(*inertia, "ixz", ipath);
  inertial.iyy = reader.number(*inertia, "iyy", ipath);
  inertial.iyz = reader.number(*inertia, "iyz", ipath);
  inertial.izz = reader.number(*inertia, "izz", ipath);
  return inertial;
}

LinkDesc read_link(const Reader& reader, const XmlNode& node) {
  LinkDesc link;
  link.name = reader.required(node, "name", "robot/link");
  const std::string path = "robot/link[" + link.name + "]";
  for (const auto& child : node.children) {
    if (child->name == "inertial") {
      if (link.inertial) {
        throw Error(ErrorCode::InvalidValue, path + "/inertial", "element repeated",
                    child->where);
      }
      link.inertial = read_inertial(reader, *child, path + "/inertial");
    } else {
      link.opaque.push_back(reader.slice(*child));
    }
  }
  return link;
}

bool has_axis(JointType type) {
  return type == JointType::Revolute || type == JointType::Continuous ||
         type == JointType::Prismatic || type == JointType::Planar;
}

JointDesc read_joint(const Reader& reader, const XmlNode& node) {
  JointDesc joint;
  joint.name = reader.required(node, "name", "robot/joint");
  const std::string path = "robot/joint[" + joint.name + "]";
  const std::string& type = reader.required(node, "type", path);
  auto parsed_type = joint_type_from_string(type);
  if (!parsed_type) {
    throw Error(ErrorCode::UnknownJointType, joint.name, "type '" + type + "'", node.where);
  }
  joint.type = *parsed_type;

  bool have_parent = false, have_child = false;
  for (const auto& child : node.children) {
    const std::string& tag = child->name;
    if (tag == "origin") {
      joint.origin = reader.origin(*child, path + "/origin");
    } else if (tag == "parent") {
      joint.parent = reader.required(*child, "link", path + "/parent");
      have_parent = true;
    } else if (tag == "child") {
      joint.child = reader.required(*child, "link", path + "/child");
      have_child = true;
    } else if (tag == "axis") {
      joint.axis = reader.vector3(*child, "xyz", path + "/axis", Vector3::UnitX());
    } else if (tag == "limit") {
      const std::string lpath = path + "/limit";
      joint.limits = JointLimits{reader.optional_number(*child, "lower", lpath),
                                 reader.optional_number(*child, "upper", lpath),
                                 reader.optional_number(*child, "effort", lpath),
                                 reader.optional_number(*child, "velocity", lpath)};
    } else {
      joint.opaque.push_back(reader.slice(*child));
    }
  }
  if (!have_parent) throw Error(ErrorCode::MissingAttribute, path + "/parent", "required by this joint type", node.where);
  if (!have_child) throw Error(ErrorCode::MissingAttribute, path + "/child", "required by this joint type", node.where);

  if (has_axis(joint.type)) {
    const double n = joint.axis.norm();
    if (!(n > 1e-12)) {
      throw Error(ErrorCode::InvalidValue, path + "/axis@xyz", "zero axis", node.where);
    }
    if (std::abs(n - 1.0) > 1e-12) joint.axis /= n;
  }
  if (joint.type == JointType::Revolute || joint.type == JointType::Prismatic) {
    if (!joint.limits) {
      throw Error(ErrorCode::MissingAttribute, path + "/limit", "required by this joint type", node.where);
    }
    if (!joint.limits->lower) {
      throw Error(ErrorCode::MissingAttribute, path + "/limit@lower", "required by this joint type", node.where);
    }
    if (!joint.limits->upper) {
      throw Error(ErrorCode::MissingAttribute, path + "/limit@upper", "required by this joint type", node.where);
    }
    if (*joint.limits->lower > *joint.limits->upper) {
      throw Error(ErrorCode::InvalidValue, path + "/limit", "lower > upper", node.where);
    }
  }
  if (joint.type == JointType::Continuous && joint.limits && joint.limits->has_position()) {
    throw Error(ErrorCode::InvalidValue, path + "/limit",
                "continuous joints take no position limits", node.where);
  }
  return joint;
}

void check_tree(const UrdfDocument& doc) {
  std::set<std::string> link_names;
  for (const auto& link : doc.links) {
    if (!link_names.insert(link.name).second) {
      throw Error(ErrorCode::DuplicateName, link.name, "link declared twice");
    }
  }
  std::set<std::string> joint_names;
  std::map<std::string, std::string> parent_of;  // child link -> joint
  for (const auto& joint : doc.joints) {
    if (!joint_names.insert(joint.name).second) {
      throw Error(ErrorCode::DuplicateName, joint.name, "joint declared twice");
    }
    for (const std::string* link : {&joint.parent, &joint.child}) {
      if (!link_names.count(*link)) {
        throw Error(ErrorCode::DanglingLinkRef, joint.name,
                    "link '" + *link + "' is not declared");
      }
    }
    if (!parent_of.emplace(joint.child, joint.name).second) {
      throw Error(ErrorCode::MultipleParents, joint.child,
                  "child of joints '" + parent_of[joint.child] + "' and '" + joint.name + "'");
    }
  }
  std::vector<std::string> roots;
  for (const auto& link : doc.links) {
    if (!parent_of.count(link.name)) roots.push_back(link.name);
  }
  if (roots.empty()) {
    throw Error(ErrorCode::NoRoot, doc.name, "every link is the child of a joint");
  }
  if (roots.size() > 1) {
    std::string list;
    for (const auto& r : roots) list += (list.empty() ? "" : ",") + r;
    throw Error(ErrorCode::MultipleRoots, list, "links without a parent joint");
  }
  // With one parent per link and a single root, any unreachable link sits on a cycle.
  std::map<std::string, std::vector<std::string>> children;
  for (const auto& joint : doc.joints) children[joint.parent].push_back(joint.child);
  std::set<std::string> reached{roots.front()};
  std::vector<std::string> todo{roots.front()};
  while (!todo.empty()) {
    const std::string link = todo.back();
    todo.pop_back();
    for (const auto& c : children[link]) {
      if (reached.insert(c).second) todo.push_back(c);
    }
  }
  for (const auto& link : doc.links) {
    if (!reached.count(link.name)) {
      throw Error(ErrorCode::KinematicCycle, link.name, "link lies on a joint cycle");
    }
  }
}

// --- writer -------------------------------------------------------------------

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string triple(const Vector3& v) {
  return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
}

std::string origin_element(const Origin& origin) {
  return "<origin xyz=\"" + triple(origin.xyz) + "\" rpy=\"" + triple(origin.rpy) + "\"/>";
}

}  // namespace

UrdfDocument parse_urdf(std::string_view xml_text) {
  const std::unique_ptr<XmlNode> root = parse_dom(xml_text);
  if (root->name != "robot") {
    throw Error(ErrorCode::MissingAttribute, "robot", "root element is <" + root->name + ">",
                root->where);
  }
  const Reader reader(xml_text);
  UrdfDocument doc;
  doc.name = reader.required(*root, "name", "robot");
  for (const auto& child : root->children) {
    if (child->name == "link") {
      doc.links.push_back(read_link(reader, *child));
    } else if (child->name == "joint") {
      doc.joints.push_back(read_joint(reader, *child));
    } else {
      doc.opaque.push_back(reader.slice(*child));
    }
  }
  check_tree(doc);
  return doc;
}

std::string serialize_urdf(const UrdfDocument& doc) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out << "<robot name=\"" << escape(doc.name) << "\">\n";
  for (const auto& link : doc.links) {
    out << "  <link name=\"" << escape(link.name) << "\"";
    if (!link.inertial && link.opaque.empty()) {
      out << "/>\n";
      continue;
    }
    out << ">\n";
    if (link.inertial) {
      const Inertial& in = *link.inertial;
      out << "    <inertial>\n"
          << "      " << origin_element(in.origin) << "\n"
          << "      <mass value=\"" << format_double(in.mass) << "\"/>\n"
          << "      <inertia ixx=\"" << format_double(in.ixx) << "\" ixy=\""
          << format_double(in.ixy) << "\" ixz=\"" << format_double(in.ixz) << "\" iyy=\""
          << format_double(in.iyy) << "\" iyz=\"" << format_double(in.iyz) << "\" izz=\""
          << format_double(in.izz) << "\"/>\n"
          << "    </inertial>\n";
    }
    for (const auto& blob : link.opaque) out << "    " << blob << "\n";
    out << "  </link>\n";
  }
  for (const auto& joint : doc.joints) {
    out << "  <joint name=\"" << escape(joint.name) << "\" type=\"" << to_string(joint.type)
        << "\">\n";
    out << "    " << origin_element(joint.origin) << "\n";
    out << "    <parent link=\"" << escape(joint.parent) << "\"/>\n";
    out << "    <child link=\"" << escape(joint.child) << "\"/>\n";
    out << "    <axis xyz=\"" << triple(joint.axis) << "\"/>\n";
    if (joint.limits) {
      out << "    <limit";
      auto attr = [&out](const char* key, const std::optional<double>& v) {
        if (v) out << " " << key << "=\"" << format_double(*v) << "\"";
      };
      attr("lower", joint.limits->lower);
      attr("upper", joint.limits->upper);
      attr("effort", joint.limits->effort);
      attr("velocity", joint.limits->velocity);
      out << "/>\n";
    }
    for (const auto& blob : joint.opaque) out << "    " << blob << "\n";
    out << "  </joint>\n";
  }
  for (const auto& blob : doc.opaque) out << "  " << blob << "\n";
  out << "</robot>\n";
  return out.str();
}

std::vector<InertiaIssue> check_link_inertias(const UrdfDocument& doc) {
  std::vector<InertiaIssue> issues;
  for (const auto& link : doc.links) {
    if (!link.inertial) continue;
    const Matrix3 inertia = link.inertial->spatial().rotational;
    const Eigen::SelfAdjointEigenSolver<Matrix3> eig(inertia);
    const Vector3 moments = eig.eigenvalues();
    if (moments.minCoeff() < -1e-12) {
      issues.push_back({link.name, "InertiaNegative",
                        "principal moment " + format_double(moments.minCoeff()) + " < 0"});
      continue;
    }
    if (link.inertial->mass > 0.0) {
      const double slack = 1e-9;
      for (int i = 0; i < 3; ++i) {
        const double others = moments[(i + 1) % 3] + moments[(i + 2) % 3];
        if (moments[i] > others + slack) {
          issues.push_back({link.name, "InertiaTriangle",
                            "principal moments violate the triangle inequality"});
          break;
        }
      }
    }
  }
  return issues;
}

}  // namespace xurdf
