#pragma once

#include "xrt/registry.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace xrt {

struct Url {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;  ///< includes query, always starts with '/'

    /// Throws InvalidArgument for anything that is not http(s)://host[:port][/path].
    static Url parse(std::string_view text);
    std::string origin() const;
};

struct FetchOptions {
    /// Connectivity probe. Defaults to the artifact's origin.
    std::optional<std::string> probe_url;
    std::chrono::milliseconds connect_timeout{3000};
    std::chrono::milliseconds read_timeout{30000};
};

/// True iff the probe endpoint produced any HTTP response within `timeout`.
bool check_connectivity(const std::string& probe_url, std::chrono::milliseconds timeout);

/// GET a small text document (used for registries served over HTTP).
std::string fetch_text(const std::string& url, const FetchOptions& options = {});

enum class TicketState { Pending, Running, Cancelled, Failed, Done };
enum class FailReason { None, NotFound, HttpStatus, ConnectionDropped, SizeMismatch, Io };

std::string_view to_string(TicketState state) noexcept;
std::string_view to_string(FailReason reason) noexcept;

struct Progress {
    std::uint64_t bytes_received = 0;
    std::optional<std::uint64_t> total_bytes;
    /// bytes_received / total_bytes when the total is known.
    std::optional<double> fraction;
};

/// `staging/<sdkid>-<version>.<ext>`
std::filesystem::path staged_path_for(const ArtifactDescriptor& desc,
                                      const std::filesystem::path& staging_dir);

/// Handle on one background transfer. State moves Pending -> Running ->
/// {Cancelled | Failed | Done} and never leaves a terminal state. progress(),
/// state() and cancel() may be called from any thread.
class DownloadTicket {
public:
    DownloadTicket(DownloadTicket&&) noexcept;
    DownloadTicket& operator=(DownloadTicket&&) noexcept;
    DownloadTicket(const DownloadTicket&) = delete;
    DownloadTicket& operator=(const DownloadTicket&) = delete;
    /// Cancels a transfer that is still in flight.
    ~DownloadTicket();

    std::uint64_t id() const noexcept;
    TicketState state() const noexcept;
    FailReason failure() const;
    std::string failure_message() const;
    /// Only meaningful once Done.
    const std::filesystem::path& staged_path() const noexcept;

    Progress progress() const;

    /// Stops the transfer and removes its partial file. Throws AlreadyTerminal
    /// when the ticket already finished, failed or was cancelled.
    void cancel();

    /// Blocks until a terminal state is reached.
    TicketState wait() const;
    /// Returns the state after waiting at most `timeout`.
    TicketState wait_for(std::chrono::milliseconds timeout) const;

    struct State;

private:
    friend DownloadTicket start_download(const ArtifactDescriptor&, const std::filesystem::path&,
                                         const FetchOptions&);
    friend std::filesystem::path finish(DownloadTicket&, const ArtifactDescriptor&);
    explicit DownloadTicket(std::unique_ptr<State> state);

    std::unique_ptr<State> state_;
};

/// Verifies connectivity, then starts the transfer on a background thread.
/// Throws NoConnection when the probe fails. Partial data only ever lives at
/// staged_path_for(desc, staging_dir).
DownloadTicket start_download(const ArtifactDescriptor& desc,
                              const std::filesystem::path& staging_dir,
                              const FetchOptions& options = {});

/// Waits for the ticket, checks the staged file's SHA-256 against the
/// descriptor and hands back its path. A mismatching file is deleted
/// (ChecksumMismatch). Failed and cancelled tickets are reported as
/// NotFound, NetworkFailure or Cancelled. A ticket can be finished once.
std::filesystem::path finish(DownloadTicket& ticket, const ArtifactDescriptor& desc);

}  // namespace xrt
