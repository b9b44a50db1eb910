#include "xrt/error.hpp"

namespace xrt {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedRegistry: return "MalformedRegistry";
    case ErrorCode::MalformedProject: return "MalformedProject";
    case ErrorCode::MalformedInput: return "MalformedInput";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::UnknownSdk: return "UnknownSdk";
    case ErrorCode::UnknownVersion: return "UnknownVersion";
    case ErrorCode::NoConnection: return "NoConnection";
    case ErrorCode::NetworkFailure: return "NetworkFailure";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::AlreadyTerminal: return "AlreadyTerminal";
    case ErrorCode::Cancelled: return "Cancelled";
    case ErrorCode::UnknownFormat: return "UnknownFormat";
    case ErrorCode::CorruptArchive: return "CorruptArchive";
    case ErrorCode::ManifestMissing: return "ManifestMissing";
    case ErrorCode::HashMismatch: return "HashMismatch";
    case ErrorCode::PathEscape: return "PathEscape";
    case ErrorCode::PathConflict: return "PathConflict";
    case ErrorCode::BadSymbol: return "BadSymbol";
    case ErrorCode::NoSuchScene: return "NoSuchScene";
    case ErrorCode::NoSuchNode: return "NoSuchNode";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AlreadyInstalled: return "AlreadyInstalled";
    case ErrorCode::NotInstalled: return "NotInstalled";
    case ErrorCode::SdkMissing: return "SdkMissing";
    case ErrorCode::StaleRevision: return "StaleRevision";
    case ErrorCode::NoSdkInstalled: return "NoSdkInstalled";
    case ErrorCode::AmbiguousSdk: return "AmbiguousSdk";
    case ErrorCode::NestedTransaction: return "NestedTransaction";
    case ErrorCode::NoOpenTransaction: return "NoOpenTransaction";
    case ErrorCode::RollbackFailure: return "RollbackFailure";
    case ErrorCode::ProjectLocked: return "ProjectLocked";
    case ErrorCode::NonPositiveTime: return "NonPositiveTime";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::PortInUse: return "PortInUse";
    }
    return "Unknown";
}

}  // namespace xrt
