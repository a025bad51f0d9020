#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace xurdf {

/// Every failure the toolkit can raise. The CLI maps these onto exit codes.
enum class ErrorCode {
  // URDF
  XmlSyntax,
  UnknownJointType,
  DanglingLinkRef,
  MultipleParents,
  MultipleRoots,
  NoRoot,
  KinematicCycle,
  DuplicateName,
  MissingAttribute,
  InvalidValue,
  // extension file
  YamlSyntax,
  BadConstraintType,
  DuplicateClosureName,
  InvalidClosure,
  InvalidReplacement,
  UnpairedClosureFrame,
  AmbiguousPair,
  BadPattern,
  // model building
  UnknownClosureFrame,
  UnknownActuatedJoint,
  ReplacementTargetMissing,
  ReplacementNotApplicable,
  // numerics
  AngleNearPi,
  FrameIndexOutOfRange,
  DimensionMismatch,
  MaxIterations,
  // assets and files
  UnknownFixture,
  Io,
};

std::string_view to_string(ErrorCode code);

/// Source position of a parse error, 1-based.
struct SourceLocation {
  int line = 0;
  int column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& message,
        std::optional<SourceLocation> where = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  /// The entity the error is about: a link, joint, closure or file name.
  const std::string& subject() const noexcept { return subject_; }
  const std::optional<SourceLocation>& location() const noexcept { return where_; }
  /// The message without the code, subject and location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string subject_;
  std::optional<SourceLocation> where_;
  std::string detail_;
};

}  // namespace xurdf
