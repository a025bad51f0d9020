#include "xurdf/model.hpp"

#include <map>
#include <set>

#include "substitution_internal.hpp"
#include "xurdf/errors.hpp"

namespace xurdf {

std::string_view to_string(JointKind kind) {
  switch (kind) {
    case JointKind::Fixed: return "fixed";
    case JointKind::Revolute: return "revolute";
    case JointKind::Continuous: return "continuous";
    case JointKind::Prismatic: return "prismatic";
    case JointKind::Floating: return "floating";
    case JointKind::Planar: return "planar";
    case JointKind::Spherical: return "spherical";
  }
  return "fixed";
}

int config_size(JointKind kind) {
  switch (kind) {
    case JointKind::Fixed: return 0;
    case JointKind::Revolute:
    case JointKind::Prismatic: return 1;
    case JointKind::Continuous: return 2;
    case JointKind::Spherical:
    case JointKind::Planar: return 4;
    case JointKind::Floating: return 7;
  }
  return 0;
}

int tangent_size(JointKind kind) {
  switch (kind) {
    case JointKind::Fixed: return 0;
    case JointKind::Revolute:
    case JointKind::Prismatic:
    case JointKind::Continuous: return 1;
    case JointKind::Spherical:
    case JointKind::Planar: return 3;
    case JointKind::Floating: return 6;
  }
  return 0;
}

int RobotModel::joint_index(std::string_view joint) const {
  for (size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].name == joint) return static_cast<int>(i);
  }
  return -1;
}

int RobotModel::frame_index(std::string_view frame) const {
  for (size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].name == frame) return static_cast<int>(i);
  }
  return -1;
}

int RobotModel::constraint_dim() const {
  int m = 0;
  for (const auto& c : closures) m += c.dim();
  return m;
}

int RobotModel::actuated_dofs() const {
  int n = 0;
  for (const auto& a : actuated) n += a.nv;
  return n;
}

bool ValidationReport::has(std::string_view code) const {
  for (const auto* list : {&errors, &warnings}) {
    for (const auto& f : *list) {
      if (f.code == code) return true;
    }
  }
  return false;
}

bool ValidationReport::has(std::string_view code, std::string_view subject) const {
  for (const auto* list : {&errors, &warnings}) {
    for (const auto& f : *list) {
      if (f.code == code && f.subject == subject) return true;
    }
  }
  return false;
}

void assign_layout(RobotModel& model) {
  int q = 0, v = 0;
  for (auto& joint : model.joints) {
    joint.nq = config_size(joint.kind);
    joint.nv = tangent_size(joint.kind);
    joint.q_offset = q;
    joint.v_offset = v;
    q += joint.nq;
    v += joint.nv;
  }
  model.nq = q;
  model.nv = v;
  for (auto& a : model.actuated) {
    a.v_offset = model.joints[static_cast<size_t>(a.joint)].v_offset;
    a.nv = model.joints[static_cast<size_t>(a.joint)].nv;
  }
}

namespace {

JointKind kind_of(JointType type) {
  switch (type) {
    case JointType::Revolute: return JointKind::Revolute;
    case JointType::Continuous: return JointKind::Continuous;
    case JointType::Prismatic: return JointKind::Prismatic;
    case JointType::Floating: return JointKind::Floating;
    case JointType::Planar: return JointKind::Planar;
    case JointType::Fixed: return JointKind::Fixed;
  }
  return JointKind::Fixed;
}

std::optional<SpatialInertia> own_inertia(const LinkDesc& link) {
  if (!link.inertial) return std::nullopt;
  return link.inertial->spatial();
}

class TreeBuilder {
 public:
  TreeBuilder(const UrdfDocument& urdf, const std::set<std::string>& spherical_joints)
      : urdf_(urdf), spherical_(spherical_joints) {
    for (const auto& joint : urdf.joints) children_[joint.parent].push_back(&joint);
  }

  RobotModel build(bool floating_base) {
    model_.name = urdf_.name;
    model_.floating_base = floating_base;
    JointModel universe;
    universe.name = "universe";
    universe.kind = JointKind::Fixed;
    model_.joints.push_back(universe);

    const std::string& root = urdf_.root_link();
    int support = 0;
    if (floating_base) {
      JointModel free;
      free.name = "root_joint";
      free.kind = JointKind::Floating;
      free.parent = 0;
      free.link = root;
      model_.joints.push_back(free);
      support = 1;
    } else {
      model_.joints[0].link = root;
    }
    add_link(root, support, Placement::identity(), FrameKind::Body);
    return std::move(model_);
  }

 private:
  bool is_moving(const JointDesc& joint) const {
    return joint.type != JointType::Fixed || spherical_.count(joint.name) > 0;
  }

  bool is_frame_leaf(const LinkDesc& link) const {
    return !link.inertial && children_.count(link.name) == 0;
  }

  void add_link(const std::string& link_name, int support, const Placement& in_support,
                FrameKind kind) {
    const LinkDesc& link = *urdf_.find_link(link_name);
    const auto inertia = own_inertia(link);
    model_.frames.push_back({link.name, kind, support, in_support, inertia});
    if (inertia) {
      auto& body = model_.joints[static_cast<size_t>(support)].body;
      body = body + inertia->transformed(in_support);
    }
    auto it = children_.find(link_name);
    if (it == children_.end()) return;
    for (const JointDesc* joint : it->second) {
      const Placement origin = in_support * joint->origin.placement();
      if (!is_moving(*joint)) {
        const LinkDesc& child = *urdf_.find_link(joint->child);
        add_link(child.name, support, origin,
                 is_frame_leaf(child) ? FrameKind::Fixed : FrameKind::Body);
        continue;
      }
      JointModel jm;
      jm.name = joint->name;
      jm.kind = spherical_.count(joint->name) ? JointKind::Spherical : kind_of(joint->type);
      jm.parent = support;
      jm.placement = origin;
      jm.axis = joint->axis;
      if (jm.kind == JointKind::Revolute || jm.kind == JointKind::Prismatic) {
        if (joint->limits && joint->limits->lower && joint->limits->upper) {
          jm.limits = PositionLimits{*joint->limits->lower, *joint->limits->upper};
        }
      }
      jm.link = joint->child;
      model_.joints.push_back(jm);
      add_link(joint->child, static_cast<int>(model_.joints.size()) - 1,
               Placement::identity(), FrameKind::Body);
    }
  }

  const UrdfDocument& urdf_;
  const std::set<std::string>& spherical_;
  std::map<std::string, std::vector<const JointDesc*>> children_;
  RobotModel model_;
};

void check_references(const UrdfDocument& urdf, const ExtensionDoc& ext) {
  for (const auto& r : ext.replacements.entries) {
    for (const auto& name : r.joints) {
      if (urdf.find_joint(name) == nullptr) {
        throw Error(ErrorCode::ReplacementTargetMissing, name, "no such joint in the URDF");
      }
    }
  }
  for (const auto& c : ext.closures) {
    for (const std::string* frame : {&c.frame_a, &c.frame_b}) {
      if (urdf.find_link(*frame) == nullptr) {
        throw Error(ErrorCode::UnknownClosureFrame, *frame,
                    "closure '" + c.name + "' references a link absent from the URDF");
      }
    }
  }
  for (const auto& name : ext.actuation.joints) {
    if (urdf.find_joint(name) == nullptr) {
      throw Error(ErrorCode::UnknownActuatedJoint, name, "no such joint in the URDF");
    }
  }
}

std::set<std::string> single_replacements(const UrdfDocument& urdf, const ExtensionDoc& ext) {
  std::set<std::string> out;
  for (const auto& r : ext.replacements.entries) {
    if (r.joints.size() != 1) continue;
    const JointDesc& joint = *urdf.find_joint(r.joints.front());
    if (joint.type != JointType::Revolute && joint.type != JointType::Continuous &&
        joint.type != JointType::Fixed) {
      throw Error(ErrorCode::ReplacementNotApplicable, joint.name,
                  std::string("a ") + std::string(to_string(joint.type)) +
                      " joint cannot become spherical");
    }
    out.insert(joint.name);
  }
  return out;
}

void apply_forced_triples(RobotModel& model, const ExtensionDoc& ext,
                          const SubstitutionTolerances& tol) {
  for (const auto& r : ext.replacements.entries) {
    if (r.joints.size() != 3) continue;
    int idx[3];
    for (int k = 0; k < 3; ++k) {
      idx[k] = model.joint_index(r.joints[static_cast<size_t>(k)]);
      if (idx[k] < 0) {
        throw Error(ErrorCode::ReplacementNotApplicable, r.joints.front(),
                    "'" + r.joints[static_cast<size_t>(k)] + "' is not a moving joint");
      }
    }
    const detail::TripleCheck check = detail::check_triple(model, idx[0], idx[1], idx[2], tol);
    if (!check.ok) {
      throw Error(ErrorCode::ReplacementNotApplicable, r.joints.front(), check.reason);
    }
    detail::replace_triple(model, idx[0], idx[1], idx[2], check.center, true);
  }
}

void resolve_extension(RobotModel& model, const ExtensionDoc& ext) {
  for (const auto& c : ext.closures) {
    const int a = model.frame_index(c.frame_a);
    const int b = model.frame_index(c.frame_b);
    for (auto [index, name] : {std::pair{a, &c.frame_a}, std::pair{b, &c.frame_b}}) {
      if (index < 0) {
        throw Error(ErrorCode::UnknownClosureFrame, *name,
                    "frame removed by joint substitution");
      }
    }
    model.closures.push_back({c.name, c.type, a, b});
  }
  for (const auto& name : ext.actuation.joints) {
    const int j = model.joint_index(name);
    if (j < 0) {
      throw Error(ErrorCode::UnknownActuatedJoint, name,
                  "joint is fixed or was absorbed into a spherical joint");
    }
    model.actuated.push_back({name, j, 0, 0});
  }
}

}  // namespace

BuildResult build_model(const UrdfDocument& urdf, const ExtensionDoc& ext,
                        const BuildOptions& options) {
  check_references(urdf, ext);
  const std::set<std::string> spherical = single_replacements(urdf, ext);
  RobotModel model = TreeBuilder(urdf, spherical).build(options.floating_base);
  apply_forced_triples(model, ext, options.tolerances);
  if (options.auto_spherical) model = substitute_spherical(model, options.tolerances);
  resolve_extension(model, ext);
  assign_layout(model);
  ValidationReport report = validate_model(model);
  return {std::move(model), std::move(report)};
}

}  // namespace xurdf
