#include "hdproto/error.hpp"

namespace hdp {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ZeroVector: return "ZeroVector";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::NonFiniteLoss: return "NonFiniteLoss";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::DuplicateClass: return "DuplicateClass";
    case Errc::ShotCountMismatch: return "ShotCountMismatch";
    case Errc::EmptyMemory: return "EmptyMemory";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::LabelOutOfRange: return "LabelOutOfRange";
    case Errc::EmptyClass: return "EmptyClass";
    case Errc::UnknownLabel: return "UnknownLabel";
    case Errc::EmptyEvaluation: return "EmptyEvaluation";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::IoError: return "IoError";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

int errc_exit_code(Errc code) noexcept { return 10 + static_cast<int>(code); }

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace hdp
