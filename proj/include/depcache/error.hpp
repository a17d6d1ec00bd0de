#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace depcache {

enum class ErrorCode {
  CycleDetected,
  InvalidId,
  DuplicateEdge,
  SelfLoop,
  EmptyUniverse,
  TooLarge,
  InvalidArgument,
  NotCached,
  AlreadyCached,
  MissingDependencies,
  CacheFull,
  WouldBreakFeasibility,
  EmptyPool,
  EmptyBucket,
  InvalidCapacity,
  RequestTooLarge,
  UnsupportedDag,
  StateSpaceTooLarge,
  AllItemsPruned,
  InvalidParameters,
  InvalidHeight,
  ParseError,
  ConfigError,
  InternalError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::InvalidId: return "InvalidId";
    case ErrorCode::DuplicateEdge: return "DuplicateEdge";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotCached: return "NotCached";
    case ErrorCode::AlreadyCached: return "AlreadyCached";
    case ErrorCode::MissingDependencies: return "MissingDependencies";
    case ErrorCode::CacheFull: return "CacheFull";
    case ErrorCode::WouldBreakFeasibility: return "WouldBreakFeasibility";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::EmptyBucket: return "EmptyBucket";
    case ErrorCode::InvalidCapacity: return "InvalidCapacity";
    case ErrorCode::RequestTooLarge: return "RequestTooLarge";
    case ErrorCode::UnsupportedDag: return "UnsupportedDag";
    case ErrorCode::StateSpaceTooLarge: return "StateSpaceTooLarge";
    case ErrorCode::AllItemsPruned: return "AllItemsPruned";
    case ErrorCode::InvalidParameters: return "InvalidParameters";
    case ErrorCode::InvalidHeight: return "InvalidHeight";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InternalError: return "InternalError";
  }
  return "Unknown";
}

// Every failure in the library surfaces as this exception; code() lets
// callers and tests branch on the category.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace depcache
