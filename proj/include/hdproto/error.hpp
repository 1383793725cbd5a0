#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hdp {

/// Error categories raised by the library. Each maps to a stable name and a
/// distinct process exit code in the command-line tool.
enum class Errc {
  DimensionMismatch,
  ZeroVector,
  NonFiniteInput,
  EmptyInput,
  NonFiniteLoss,
  InvalidArgument,
  DuplicateClass,
  ShotCountMismatch,
  EmptyMemory,
  UnknownClass,
  LabelOutOfRange,
  EmptyClass,
  UnknownLabel,
  EmptyEvaluation,
  BadMagic,
  VersionUnsupported,
  TruncatedFile,
  IoError,
  ConfigError,
};

std::string_view errc_name(Errc code) noexcept;

/// Exit code used by the CLI for a given category. 0 and 1 are reserved for
/// success and usage errors.
int errc_exit_code(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

}  // namespace hdp
