#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace posekit {

enum class Errc {
  DegenerateInput,
  BehindCamera,
  InvalidDepth,
  MissingCoarse,
  InvalidParam,
  TooFewVertices,
  OutOfRange,
  ShapeMismatch,
  NotNormalized,
  NonFinite,
  InvalidWindow,
  SpecViolation,
  EmptyRender,
  EmptyInput,
  MissingAsset,
  ParseError,
  NonRigid,
  FieldCount,
  MissingCamera,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::DegenerateInput: return "DegenerateInput";
    case Errc::BehindCamera: return "BehindCamera";
    case Errc::InvalidDepth: return "InvalidDepth";
    case Errc::MissingCoarse: return "MissingCoarse";
    case Errc::InvalidParam: return "InvalidParam";
    case Errc::TooFewVertices: return "TooFewVertices";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::NotNormalized: return "NotNormalized";
    case Errc::NonFinite: return "NonFinite";
    case Errc::InvalidWindow: return "InvalidWindow";
    case Errc::SpecViolation: return "SpecViolation";
    case Errc::EmptyRender: return "EmptyRender";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::MissingAsset: return "MissingAsset";
    case Errc::ParseError: return "ParseError";
    case Errc::NonRigid: return "NonRigid";
    case Errc::FieldCount: return "FieldCount";
    case Errc::MissingCamera: return "MissingCamera";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the failure
/// class; `what()` carries "<Code>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_{code} {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace posekit
