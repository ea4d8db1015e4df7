#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pufcan {

enum class Errc {
  // canframe
  IdOutOfRange,
  DlcOutOfRange,
  DataLengthMismatch,
  // lwc
  BadKeyWidth,
  ResponseTooShort,
  InvalidPublicKey,
  // protocol
  DuplicateNodeId,
  EnrollmentClosed,
  NotEnrolled,
  WrongPhase,
  UnknownNode,
  MalformedFrames,
  ModeKeyWidthMismatch,
  NonzeroPadding,
  NoAuthenticatedNodes,
  NotOperational,
  BadPayloadLength,
  // bus
  InvalidFrame,
  NotInLog,
  // cli
  ConfigInvalid,
  EnrollmentFileMissing,
  ParseError,
  UnknownStrategy,
  IoFailure,
};

constexpr std::string_view to_string(Errc e) noexcept {
  switch (e) {
    case Errc::IdOutOfRange: return "IdOutOfRange";
    case Errc::DlcOutOfRange: return "DlcOutOfRange";
    case Errc::DataLengthMismatch: return "DataLengthMismatch";
    case Errc::BadKeyWidth: return "BadKeyWidth";
    case Errc::ResponseTooShort: return "ResponseTooShort";
    case Errc::InvalidPublicKey: return "InvalidPublicKey";
    case Errc::DuplicateNodeId: return "DuplicateNodeId";
    case Errc::EnrollmentClosed: return "EnrollmentClosed";
    case Errc::NotEnrolled: return "NotEnrolled";
    case Errc::WrongPhase: return "WrongPhase";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::MalformedFrames: return "MalformedFrames";
    case Errc::ModeKeyWidthMismatch: return "ModeKeyWidthMismatch";
    case Errc::NonzeroPadding: return "NonzeroPadding";
    case Errc::NoAuthenticatedNodes: return "NoAuthenticatedNodes";
    case Errc::NotOperational: return "NotOperational";
    case Errc::BadPayloadLength: return "BadPayloadLength";
    case Errc::InvalidFrame: return "InvalidFrame";
    case Errc::NotInLog: return "NotInLog";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::EnrollmentFileMissing: return "EnrollmentFileMissing";
    case Errc::ParseError: return "ParseError";
    case Errc::UnknownStrategy: return "UnknownStrategy";
    case Errc::IoFailure: return "IoFailure";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying an Errc.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}
  explicit Error(Errc code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace pufcan
