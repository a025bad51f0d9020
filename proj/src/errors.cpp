#include "xurdf/errors.hpp"

namespace xurdf {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::XmlSyntax: return "XmlSyntax";
    case ErrorCode::UnknownJointType: return "UnknownJointType";
    case ErrorCode::DanglingLinkRef: return "DanglingLinkRef";
    case ErrorCode::MultipleParents: return "MultipleParents";
    case ErrorCode::MultipleRoots: return "MultipleRoots";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::KinematicCycle: return "KinematicCycle";
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::MissingAttribute: return "MissingAttribute";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::YamlSyntax: return "YamlSyntax";
    case ErrorCode::BadConstraintType: return "BadConstraintType";
    case ErrorCode::DuplicateClosureName: return "DuplicateClosureName";
    case ErrorCode::InvalidClosure: return "InvalidClosure";
    case ErrorCode::InvalidReplacement: return "InvalidReplacement";
    case ErrorCode::UnpairedClosureFrame: return "UnpairedClosureFrame";
    case ErrorCode::AmbiguousPair: return "AmbiguousPair";
    case ErrorCode::BadPattern: return "BadPattern";
    case ErrorCode::UnknownClosureFrame: return "UnknownClosureFrame";
    case ErrorCode::UnknownActuatedJoint: return "UnknownActuatedJoint";
    case ErrorCode::ReplacementTargetMissing: return "ReplacementTargetMissing";
    case ErrorCode::ReplacementNotApplicable: return "ReplacementNotApplicable";
    case ErrorCode::AngleNearPi: return "AngleNearPi";
    case ErrorCode::FrameIndexOutOfRange: return "FrameIndexOutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::UnknownFixture: return "UnknownFixture";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string format_message(ErrorCode code, const std::string& subject,
                           const std::string& message,
                           const std::optional<SourceLocation>& where) {
  std::string out(to_string(code));
  if (!subject.empty()) out += "(" + subject + ")";
  if (where) {
    out += " at " + std::to_string(where->line) + ":" + std::to_string(where->column);
  }
  if (!message.empty()) out += ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, std::string subject, const std::string& message,
             std::optional<SourceLocation> where)
    : std::runtime_error(format_message(code, subject, message, where)),
      code_(code),
      subject_(std::move(subject)),
      where_(where),
      detail_(message) {}

}  // namespace xurdf
