#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace forcinglab {

enum class ErrorCode {
  AtomOutsideUniverse,
  InsufficientUniverse,
  NoUntouchedPair,
  NotSupported,
  FamilyMismatch,
  InvalidCondition,
  InvalidArgument,
  BudgetExceeded,
  NotAntichain,
  NonUniformSize,
  NoFreshAtom,
  NotGenericEnough,
  OutOfArity,
  Overflow,
  NonCanonical,
  InvalidChain,
  ChainTooLong,
  OracleFailed,
  NoWitness,
  IncompatiblePrefixes,
  ConfigInvalid,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::AtomOutsideUniverse: return "AtomOutsideUniverse";
    case ErrorCode::InsufficientUniverse: return "InsufficientUniverse";
    case ErrorCode::NoUntouchedPair: return "NoUntouchedPair";
    case ErrorCode::NotSupported: return "NotSupported";
    case ErrorCode::FamilyMismatch: return "FamilyMismatch";
    case ErrorCode::InvalidCondition: return "InvalidCondition";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::NotAntichain: return "NotAntichain";
    case ErrorCode::NonUniformSize: return "NonUniformSize";
    case ErrorCode::NoFreshAtom: return "NoFreshAtom";
    case ErrorCode::NotGenericEnough: return "NotGenericEnough";
    case ErrorCode::OutOfArity: return "OutOfArity";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NonCanonical: return "NonCanonical";
    case ErrorCode::InvalidChain: return "InvalidChain";
    case ErrorCode::ChainTooLong: return "ChainTooLong";
    case ErrorCode::OracleFailed: return "OracleFailed";
    case ErrorCode::NoWitness: return "NoWitness";
    case ErrorCode::IncompatiblePrefixes: return "IncompatiblePrefixes";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
  }
  return "Unknown";
}

/// Base of every error raised by the library. Errors that carry a witness
/// (a permutation, a pair of conditions) derive from this and add fields.
class LabError : public std::runtime_error {
 public:
  LabError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Wall-clock cap for the exhaustive searches. A default-constructed budget
/// never expires.
class Budget {
 public:
  Budget() = default;

  static Budget milliseconds(std::int64_t ms) {
    Budget b;
    b.deadline_ = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
    return b;
  }

  bool expired() const {
    return deadline_ && std::chrono::steady_clock::now() > *deadline_;
  }

  // Cheap enough to call per search node; the clock is only read every 4096 calls.
  void check(const char* where) const {
    if (!deadline_) return;
    if ((++ticks_ & 0xfffu) != 0) return;
    if (expired()) throw LabError(ErrorCode::BudgetExceeded, std::string("time budget exhausted in ") + where);
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> deadline_;
  mutable std::uint32_t ticks_ = 0;
};

}  // namespace forcinglab
