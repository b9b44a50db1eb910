#pragma once

#include "xrt/fixtures.hpp"
#include "xrt/regserve.hpp"
#include "xrt/registry.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace xrt::test {

/// Fresh directory under $TMPDIR, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// The fixture corpus written to a temp dir and served on a free port.
struct FixtureServer {
    TempDir dir;
    std::unique_ptr<RegistryServer> server;
    Registry registry;

    FixtureServer();
    std::filesystem::path registry_file() const { return dir.path() / "registry.json"; }
    std::string registry_url() const { return server->base_url() + "/registry.json"; }
    std::string route(SdkId sdk, std::string_view version) const;
};

/// Relative path -> "dir" or the file's SHA-256, for whole-tree comparisons.
std::map<std::string, std::string> tree(const std::filesystem::path& root);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& data);

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

struct ProcessOptions {
    std::map<std::string, std::string> env;  ///< added to the inherited environment
    std::vector<std::string> unset_env;
    /// Polled every few ms while the child runs; return true to send SIGINT once.
    std::function<bool()> interrupt_when;
    std::chrono::milliseconds timeout{60000};
};

/// Runs the given program to completion, capturing stdout and stderr.
ProcessResult run_process(const std::vector<std::string>& argv, const ProcessOptions& options = {});

/// Path of the built `xrt` executable.
std::string xrt_binary();
/// Repository root (for data/ and tests/fixtures/).
std::filesystem::path source_dir();

}  // namespace xrt::test
