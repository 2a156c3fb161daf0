#pragma once

#include <stdexcept>
#include <string>

namespace scengen {

enum class Errc {
  MissingCell,
  NonMonotoneDates,
  UnknownColumn,
  NonFiniteValue,
  LengthMismatch,
  WindowTooLong,
  IndexMismatch,
  AllReturnsExtreme,
  EmptyPanel,
  NegativeTime,
  LoadingCountMismatch,
  MaturityOutOfRange,
  EmptyJumpMeasure,
  NonFiniteState,
  InsufficientHistory,
  TooFewSamples,
  InvalidCorrelation,
  BadConfig,
  BadModelFile,
  IoError,
};

/// All library failures surface as Error; code() identifies the condition so
/// callers (and the CLI exit-code mapping) can dispatch without string matching.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::MissingCell: return "MissingCell";
    case Errc::NonMonotoneDates: return "NonMonotoneDates";
    case Errc::UnknownColumn: return "UnknownColumn";
    case Errc::NonFiniteValue: return "NonFiniteValue";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::WindowTooLong: return "WindowTooLong";
    case Errc::IndexMismatch: return "IndexMismatch";
    case Errc::AllReturnsExtreme: return "AllReturnsExtreme";
    case Errc::EmptyPanel: return "EmptyPanel";
    case Errc::NegativeTime: return "NegativeTime";
    case Errc::LoadingCountMismatch: return "LoadingCountMismatch";
    case Errc::MaturityOutOfRange: return "MaturityOutOfRange";
    case Errc::EmptyJumpMeasure: return "EmptyJumpMeasure";
    case Errc::NonFiniteState: return "NonFiniteState";
    case Errc::InsufficientHistory: return "InsufficientHistory";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::InvalidCorrelation: return "InvalidCorrelation";
    case Errc::BadConfig: return "BadConfig";
    case Errc::BadModelFile: return "BadModelFile";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

} // namespace scengen
