#include "xrt/regserve.hpp"

#include "xrt/error.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <httplib.h>

namespace fs = std::filesystem;

namespace xrt {

struct RegistryServer::Impl {
    fs::path dir;
    httplib::Server server;
    std::thread listener;
    std::atomic<bool> stopping{false};
    bool shut = false;
    std::mutex mutex;
    std::map<std::string, FaultSpec> faults;

    FaultSpec fault_for(const std::string& route) {
        std::lock_guard lock(mutex);
        auto it = faults.find(route);
        return it == faults.end() ? FaultSpec{} : it->second;
    }

    /// Sleeps in short slices so shutdown is never held up by a stall.
    bool nap(std::chrono::milliseconds total) {
        auto until = std::chrono::steady_clock::now() + total;
        while (std::chrono::steady_clock::now() < until) {
            if (stopping) return false;
            std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(
                std::chrono::milliseconds(10),
                std::chrono::duration_cast<std::chrono::milliseconds>(until - std::chrono::steady_clock::now()) +
                    std::chrono::milliseconds(1)));
        }
        return !stopping;
    }
};

namespace {

bool read_file(const fs::path& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
}

bool safe_name(const std::string& name) {
    return !name.empty() && name.find('/') == std::string::npos && name.find('\\') == std::string::npos &&
           name != "." && name != "..";
}

}  // namespace

RegistryServer::RegistryServer(fs::path fixture_dir, int port, std::map<std::string, FaultSpec> faults)
    : impl_(std::make_unique<Impl>()) {
    impl_->dir = std::move(fixture_dir);
    impl_->faults = std::move(faults);
    Impl* self = impl_.get();

    self->server.Get("/probe", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    self->server.Get("/registry.json", [self](const httplib::Request&, httplib::Response& res) {
        std::string body;
        if (!read_file(self->dir / "registry.json", body)) {
            res.status = 404;
            return;
        }
        res.set_content(body, "application/json");
    });

    self->server.Get(R"(/artifacts/([^/]+))", [self](const httplib::Request& req, httplib::Response& res) {
        std::string name = req.matches[1];
        auto route = "/artifacts/" + name;
        auto fault = self->fault_for(route);
        auto body = std::make_shared<std::string>();
        if (fault.mode == FaultSpec::Mode::NotFound || !safe_name(name) ||
            !read_file(self->dir / "artifacts" / name, *body)) {
            res.status = 404;
            res.set_content("not found\n", "text/plain");
            return;
        }
        if (fault.mode == FaultSpec::Mode::CorruptByteAt && fault.amount < body->size()) {
            (*body)[fault.amount] = static_cast<char>((*body)[fault.amount] ^ 0xFF);
        }
        res.set_content_provider(
            body->size(), "application/octet-stream",
            [self, body, fault](std::size_t offset, std::size_t length, httplib::DataSink& sink) {
                if (self->stopping) return false;
                std::size_t chunk = std::min<std::size_t>(length, 16 * 1024);
                switch (fault.mode) {
                case FaultSpec::Mode::DropAfterBytes:
                    if (offset >= fault.amount) return false;
                    chunk = std::min<std::size_t>(chunk, fault.amount - offset);
                    break;
                case FaultSpec::Mode::Stall:
                    if (offset == 0 && !self->nap(fault.stall)) return false;
                    break;
                case FaultSpec::Mode::Throttle: {
                    // Twenty slices a second.
                    auto slice = std::max<std::uint64_t>(1, fault.amount / 20);
                    chunk = std::min<std::size_t>(chunk, slice);
                    if (!self->nap(std::chrono::milliseconds(50))) return false;
                    break;
                }
                default: break;
                }
                return sink.write(body->data() + offset, chunk);
            });
    });

    // httplib's default also sets SO_REUSEPORT, which would let a second
    // server share a busy port instead of reporting it.
    self->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    bool bound = false;
    if (port == 0) {
        port_ = self->server.bind_to_any_port("127.0.0.1");
        bound = port_ > 0;
    } else {
        port_ = port;
        bound = self->server.bind_to_port("127.0.0.1", port);
    }
    if (!bound) fail(ErrorCode::PortInUse, "cannot listen on 127.0.0.1:" + std::to_string(port));
    self->listener = std::thread([self] { self->server.listen_after_bind(); });
    self->server.wait_until_ready();
}

RegistryServer::~RegistryServer() { shutdown(); }

std::string RegistryServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

void RegistryServer::set_fault(const std::string& route, FaultSpec fault) {
    std::lock_guard lock(impl_->mutex);
    impl_->faults[route] = fault;
}

void RegistryServer::clear_faults() {
    std::lock_guard lock(impl_->mutex);
    impl_->faults.clear();
}

void RegistryServer::shutdown() {
    if (impl_->shut) return;
    impl_->shut = true;
    impl_->stopping = true;
    impl_->server.stop();
    if (impl_->listener.joinable()) impl_->listener.join();
}

}  // namespace xrt
