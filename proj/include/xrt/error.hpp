#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace xrt {

enum class ErrorCode {
    // input documents
    MalformedRegistry,
    MalformedProject,
    MalformedInput,
    IoFailure,
    // registry
    UnknownSdk,
    UnknownVersion,
    // fetch
    NoConnection,
    NetworkFailure,
    NotFound,
    ChecksumMismatch,
    AlreadyTerminal,
    Cancelled,
    // bundle
    UnknownFormat,
    CorruptArchive,
    ManifestMissing,
    HashMismatch,
    PathEscape,
    PathConflict,
    // project
    BadSymbol,
    NoSuchScene,
    NoSuchNode,
    InvalidArgument,
    // transition
    AlreadyInstalled,
    NotInstalled,
    SdkMissing,
    StaleRevision,
    NoSdkInstalled,
    AmbiguousSdk,
    // journal
    NestedTransaction,
    NoOpenTransaction,
    RollbackFailure,
    ProjectLocked,
    // evalkit
    NonPositiveTime,
    EmptyInput,
    // regserve
    PortInUse,
};

std::string_view to_string(ErrorCode code) noexcept;

/// The single exception type thrown by the library. The code drives CLI exit
/// status; the message is meant for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace xrt
