#pragma once

#include <stdexcept>
#include <string>

namespace oqsync {

// Every failure mode the engine can report. Each code maps to a distinct
// process exit code in the CLI (see Error::exit_code and the README table).
enum class ErrorCode {
  NonSymmetric,
  NotPSD,
  BadDiagonal,
  BadGrid,
  ChannelCount,
  InsufficientData,
  NegativeTime,
  BadXi,
  BadTruncation,
  PositivityBreach,
  TraceDrift,
  DegenerateKernel,
  UnstableDrift,
  LoopThroughEP,
  NotCirculant,
  TooLarge,
  EmptyPartition,
  Unphysical,
  AllTrajectoriesDegenerate,
  UnknownKey,
  MissingRequired,
  ValidationFailed,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const { return code_; }

  static const char* name(ErrorCode code) {
    switch (code) {
      case ErrorCode::NonSymmetric: return "NonSymmetric";
      case ErrorCode::NotPSD: return "NotPSD";
      case ErrorCode::BadDiagonal: return "BadDiagonal";
      case ErrorCode::BadGrid: return "BadGrid";
      case ErrorCode::ChannelCount: return "ChannelCount";
      case ErrorCode::InsufficientData: return "InsufficientData";
      case ErrorCode::NegativeTime: return "NegativeTime";
      case ErrorCode::BadXi: return "BadXi";
      case ErrorCode::BadTruncation: return "BadTruncation";
      case ErrorCode::PositivityBreach: return "PositivityBreach";
      case ErrorCode::TraceDrift: return "TraceDrift";
      case ErrorCode::DegenerateKernel: return "DegenerateKernel";
      case ErrorCode::UnstableDrift: return "UnstableDrift";
      case ErrorCode::LoopThroughEP: return "LoopThroughEP";
      case ErrorCode::NotCirculant: return "NotCirculant";
      case ErrorCode::TooLarge: return "TooLarge";
      case ErrorCode::EmptyPartition: return "EmptyPartition";
      case ErrorCode::Unphysical: return "Unphysical";
      case ErrorCode::AllTrajectoriesDegenerate: return "AllTrajectoriesDegenerate";
      case ErrorCode::UnknownKey: return "UnknownKey";
      case ErrorCode::MissingRequired: return "MissingRequired";
      case ErrorCode::ValidationFailed: return "ValidationFailed";
      case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
  }

  // CLI exit code: 10 + enum index, leaving 0/1/2 for success, generic
  // failure and command-line usage errors.
  int exit_code() const { return 10 + static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace oqsync
