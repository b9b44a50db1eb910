#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

namespace xrt {

/// How one artifact route misbehaves. Faults are positional (derived from
/// the byte offset being served), so every connection sees the same thing.
struct FaultSpec {
    enum class Mode { None, DropAfterBytes, CorruptByteAt, NotFound, Stall, Throttle };

    Mode mode = Mode::None;
    /// Byte count for DropAfterBytes, byte index for CorruptByteAt, bytes per
    /// second for Throttle.
    std::uint64_t amount = 0;
    std::chrono::milliseconds stall{0};

    static FaultSpec none() { return {}; }
    static FaultSpec drop_after(std::uint64_t bytes) { return {Mode::DropAfterBytes, bytes, {}}; }
    static FaultSpec corrupt_at(std::uint64_t index) { return {Mode::CorruptByteAt, index, {}}; }
    static FaultSpec not_found() { return {Mode::NotFound, 0, {}}; }
    static FaultSpec stall_for(std::chrono::milliseconds d) { return {Mode::Stall, 0, d}; }
    static FaultSpec throttle(std::uint64_t bytes_per_second) { return {Mode::Throttle, bytes_per_second, {}}; }
};

/// Serves `<dir>/registry.json` at /registry.json, `<dir>/artifacts/<name>`
/// at /artifacts/<name>, and /probe (204). Listens on 127.0.0.1.
class RegistryServer {
public:
    /// Port 0 picks a free port. Throws PortInUse when the port is taken.
    /// `faults` is keyed by route, e.g. "/artifacts/arcore-1.2.0.pkg".
    RegistryServer(std::filesystem::path fixture_dir, int port = 0, std::map<std::string, FaultSpec> faults = {});
    ~RegistryServer();
    RegistryServer(const RegistryServer&) = delete;
    RegistryServer& operator=(const RegistryServer&) = delete;

    int port() const noexcept { return port_; }
    /// "http://127.0.0.1:<port>"
    std::string base_url() const;

    void set_fault(const std::string& route, FaultSpec fault);
    void clear_faults();

    /// Stops listening and drops transfers in flight. Idempotent.
    void shutdown();

    struct Impl;

private:
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

}  // namespace xrt
