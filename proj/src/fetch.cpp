#include "xrt/fetch.hpp"

#include "xrt/error.hpp"
#include "xrt/sha256.hpp"

#include <httplib.h>

#include <atomic>
#include <charconv>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;

namespace xrt {

Url Url::parse(std::string_view text) {
    Url u;
    std::string_view rest;
    if (text.starts_with("http://")) {
        u.scheme = "http";
        u.port = 80;
        rest = text.substr(7);
    } else if (text.starts_with("https://")) {
        u.scheme = "https";
        u.port = 443;
        rest = text.substr(8);
    } else {
        fail(ErrorCode::InvalidArgument, "not an http(s) URL: " + std::string(text));
    }
    auto slash = rest.find('/');
    auto authority = rest.substr(0, slash);
    u.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        auto port_text = authority.substr(colon + 1);
        int port = 0;
        auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
        if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port <= 0 ||
            port > 65535) {
            fail(ErrorCode::InvalidArgument, "bad port in URL: " + std::string(text));
        }
        u.port = port;
        authority = authority.substr(0, colon);
    }
    if (authority.empty()) fail(ErrorCode::InvalidArgument, "URL has no host: " + std::string(text));
    u.host = std::string(authority);
    return u;
}

std::string Url::origin() const {
    return scheme + "://" + host + ":" + std::to_string(port);
}

namespace {

template <typename Client>
void apply_timeouts(Client& cli, std::chrono::milliseconds connect, std::chrono::milliseconds read) {
    cli.set_connection_timeout(connect.count() / 1000, (connect.count() % 1000) * 1000);
    cli.set_read_timeout(read.count() / 1000, (read.count() % 1000) * 1000);
    cli.set_write_timeout(read.count() / 1000, (read.count() % 1000) * 1000);
}

bool is_terminal(TicketState s) {
    return s == TicketState::Cancelled || s == TicketState::Failed || s == TicketState::Done;
}

std::atomic<std::uint64_t> g_next_ticket{1};

}  // namespace

bool check_connectivity(const std::string& probe_url, std::chrono::milliseconds timeout) {
    Url url;
    try {
        url = Url::parse(probe_url);
    } catch (const Error&) {
        return false;
    }
    httplib::Client cli(url.origin());
    if (!cli.is_valid()) return false;
    apply_timeouts(cli, timeout, timeout);
    auto res = cli.Head(url.path);
    return static_cast<bool>(res);
}

std::string fetch_text(const std::string& url_text, const FetchOptions& options) {
    auto url = Url::parse(url_text);
    httplib::Client cli(url.origin());
    apply_timeouts(cli, options.connect_timeout, options.read_timeout);
    auto res = cli.Get(url.path);
    if (!res) {
        fail(ErrorCode::NoConnection,
             "no connection to " + url.origin() + ": " + httplib::to_string(res.error()));
    }
    if (res->status == 404) fail(ErrorCode::NotFound, url_text + " returned 404");
    if (res->status != 200) {
        fail(ErrorCode::NetworkFailure, url_text + " returned HTTP " + std::to_string(res->status));
    }
    return res->body;
}

std::string_view to_string(TicketState state) noexcept {
    switch (state) {
    case TicketState::Pending: return "Pending";
    case TicketState::Running: return "Running";
    case TicketState::Cancelled: return "Cancelled";
    case TicketState::Failed: return "Failed";
    case TicketState::Done: return "Done";
    }
    return "?";
}

std::string_view to_string(FailReason reason) noexcept {
    switch (reason) {
    case FailReason::None: return "None";
    case FailReason::NotFound: return "NotFound";
    case FailReason::HttpStatus: return "HttpStatus";
    case FailReason::ConnectionDropped: return "ConnectionDropped";
    case FailReason::SizeMismatch: return "SizeMismatch";
    case FailReason::Io: return "Io";
    }
    return "?";
}

fs::path staged_path_for(const ArtifactDescriptor& desc, const fs::path& staging_dir) {
    return staging_dir / (std::string(token(desc.sdk)) + "-" + desc.version.str() + "." +
                          std::string(extension(desc.format)));
}

struct DownloadTicket::State {
    std::uint64_t id = 0;
    ArtifactDescriptor desc;
    fs::path path;
    fs::path staging_dir;
    bool created_staging_dir = false;
    FetchOptions options;

    std::atomic<TicketState> state{TicketState::Pending};
    std::atomic<std::uint64_t> bytes{0};
    std::atomic<bool> stop{false};

    mutable std::mutex mutex;
    mutable std::condition_variable done_cv;
    httplib::Client* client = nullptr;
    FailReason reason = FailReason::None;
    std::string message;
    bool consumed = false;

    std::mutex join_mutex;
    std::thread worker;

    void join() {
        std::lock_guard guard(join_mutex);
        if (worker.joinable() && worker.get_id() != std::this_thread::get_id()) worker.join();
    }

    // Removes everything this ticket put in the staging area.
    void clean_staging() {
        std::error_code ec;
        fs::remove(path, ec);
        if (created_staging_dir && fs::is_directory(staging_dir, ec) &&
            fs::is_empty(staging_dir, ec)) {
            fs::remove(staging_dir, ec);
        }
    }

    // Caller holds `mutex`.
    void settle(TicketState terminal, FailReason why = FailReason::None, std::string text = {}) {
        reason = why;
        message = std::move(text);
        if (terminal != TicketState::Done) clean_staging();
        state.store(terminal);
        done_cv.notify_all();
    }

    void run();
};

void DownloadTicket::State::run() {
    {
        std::lock_guard lock(mutex);
        if (stop) {
            settle(TicketState::Cancelled);
            return;
        }
        state.store(TicketState::Running);
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        std::lock_guard lock(mutex);
        settle(TicketState::Failed, FailReason::Io, "cannot create " + path.string());
        return;
    }

    auto url = Url::parse(desc.url);
    httplib::Client cli(url.origin());
    apply_timeouts(cli, options.connect_timeout, options.read_timeout);
    {
        std::lock_guard lock(mutex);
        client = &cli;
    }

    int status = 0;
    bool io_error = false;
    bool oversize = false;
    auto res = cli.Get(
        url.path,
        [&](const httplib::Response& r) {
            status = r.status;
            return r.status == 200 && !stop;
        },
        [&](const char* data, std::size_t n) {
            if (stop) return false;
            if (bytes + n > desc.size_bytes) {
                oversize = true;
                return false;
            }
            out.write(data, static_cast<std::streamsize>(n));
            if (!out) {
                io_error = true;
                return false;
            }
            bytes += n;
            return true;
        });
    out.close();

    std::lock_guard lock(mutex);
    client = nullptr;
    if (stop) {
        settle(TicketState::Cancelled);
    } else if (status == 404) {
        settle(TicketState::Failed, FailReason::NotFound, desc.url + " returned 404");
    } else if (status != 0 && status != 200) {
        settle(TicketState::Failed, FailReason::HttpStatus,
               desc.url + " returned HTTP " + std::to_string(status));
    } else if (io_error || out.fail()) {
        settle(TicketState::Failed, FailReason::Io, "write error on " + path.string());
    } else if (oversize) {
        settle(TicketState::Failed, FailReason::SizeMismatch,
               "server sent more than the expected " + std::to_string(desc.size_bytes) + " bytes");
    } else if (!res) {
        settle(TicketState::Failed, FailReason::ConnectionDropped,
               "connection lost after " + std::to_string(bytes.load()) + " bytes (" +
                   httplib::to_string(res.error()) + ")");
    } else if (bytes != desc.size_bytes) {
        settle(TicketState::Failed, FailReason::SizeMismatch,
               "received " + std::to_string(bytes.load()) + " of " +
                   std::to_string(desc.size_bytes) + " bytes");
    } else {
        settle(TicketState::Done);
    }
}

DownloadTicket::DownloadTicket(std::unique_ptr<State> state) : state_(std::move(state)) {}
DownloadTicket::DownloadTicket(DownloadTicket&&) noexcept = default;

DownloadTicket& DownloadTicket::operator=(DownloadTicket&& other) noexcept {
    if (this != &other) {
        DownloadTicket previous(std::move(state_));
        state_ = std::move(other.state_);
    }
    return *this;
}

DownloadTicket::~DownloadTicket() {
    if (!state_) return;
    {
        std::lock_guard lock(state_->mutex);
        if (!is_terminal(state_->state)) {
            state_->stop = true;
            if (state_->client) state_->client->stop();
        }
    }
    state_->join();
}

std::uint64_t DownloadTicket::id() const noexcept { return state_->id; }
TicketState DownloadTicket::state() const noexcept { return state_->state.load(); }

FailReason DownloadTicket::failure() const {
    std::lock_guard lock(state_->mutex);
    return state_->reason;
}

std::string DownloadTicket::failure_message() const {
    std::lock_guard lock(state_->mutex);
    return state_->message;
}

const fs::path& DownloadTicket::staged_path() const noexcept { return state_->path; }

Progress DownloadTicket::progress() const {
    Progress p;
    p.bytes_received = state_->bytes.load();
    p.total_bytes = state_->desc.size_bytes;
    if (state_->desc.size_bytes > 0) {
        p.fraction = static_cast<double>(p.bytes_received) /
                     static_cast<double>(state_->desc.size_bytes);
    } else {
        p.fraction = state_->state.load() == TicketState::Done ? 1.0 : 0.0;
    }
    return p;
}

void DownloadTicket::cancel() {
    {
        std::lock_guard lock(state_->mutex);
        if (is_terminal(state_->state)) {
            fail(ErrorCode::AlreadyTerminal,
                 "download already " + std::string(to_string(state_->state.load())));
        }
        state_->stop = true;
        if (state_->client) state_->client->stop();
    }
    state_->join();
}

TicketState DownloadTicket::wait() const {
    std::unique_lock lock(state_->mutex);
    state_->done_cv.wait(lock, [&] { return is_terminal(state_->state); });
    return state_->state;
}

TicketState DownloadTicket::wait_for(std::chrono::milliseconds timeout) const {
    std::unique_lock lock(state_->mutex);
    state_->done_cv.wait_for(lock, timeout, [&] { return is_terminal(state_->state); });
    return state_->state;
}

DownloadTicket start_download(const ArtifactDescriptor& desc, const fs::path& staging_dir,
                              const FetchOptions& options) {
    auto url = Url::parse(desc.url);
    auto probe = options.probe_url.value_or(url.origin() + "/");
    if (!check_connectivity(probe, options.connect_timeout)) {
        fail(ErrorCode::NoConnection,
             "no internet connection: could not reach " + probe + " to download " +
                 std::string(display_name(desc.sdk)) + " " + desc.version.str());
    }

    auto state = std::make_unique<DownloadTicket::State>();
    state->id = g_next_ticket++;
    state->desc = desc;
    state->options = options;
    state->staging_dir = staging_dir;
    state->path = staged_path_for(desc, staging_dir);
    std::error_code ec;
    if (!fs::exists(staging_dir, ec)) {
        fs::create_directories(staging_dir, ec);
        if (ec) fail(ErrorCode::IoFailure, "cannot create staging directory " + staging_dir.string());
        state->created_staging_dir = true;
    }
    if (fs::exists(state->path, ec)) {
        fail(ErrorCode::PathConflict, "staging file already exists: " + state->path.string());
    }
    auto* raw = state.get();
    raw->worker = std::thread([raw] { raw->run(); });
    return DownloadTicket(std::move(state));
}

fs::path finish(DownloadTicket& ticket, const ArtifactDescriptor& desc) {
    auto* s = ticket.state_.get();
    auto final_state = ticket.wait();
    s->join();
    std::lock_guard lock(s->mutex);
    if (s->consumed) fail(ErrorCode::InvalidArgument, "download ticket already finished");
    s->consumed = true;
    switch (final_state) {
    case TicketState::Cancelled:
        fail(ErrorCode::Cancelled, "download cancelled");
    case TicketState::Failed:
        fail(s->reason == FailReason::NotFound ? ErrorCode::NotFound : ErrorCode::NetworkFailure,
             "download failed: " + s->message);
    default:
        break;
    }
    auto digest = sha256_file(s->path);
    if (digest != desc.sha256) {
        s->clean_staging();
        fail(ErrorCode::ChecksumMismatch, "checksum mismatch for " + desc.url + ": expected " +
                                              desc.sha256 + ", got " + digest);
    }
    return s->path;
}

}  // namespace xrt
