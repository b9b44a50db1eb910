#pragma once

#include "xrt/bundle_writer.hpp"
#include "xrt/registry.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace xrt::fixtures {

struct Artifact {
    SdkId sdk{};
    std::string version;
    ArchiveFormat format{};
    std::vector<BundleFile> files;
    std::string bytes;

    std::string file_name() const;  ///< "<sdk>-<version>.<ext>"
};

/// Two versions of each of the four SDKs, byte-for-byte reproducible.
const std::vector<Artifact>& artifacts();

const Artifact& artifact(SdkId sdk, std::string_view version);

/// Registry describing artifacts() as served from `<base_url>/artifacts/`.
Registry registry_for(const std::string& base_url);

/// Writes `<dir>/registry.json` and `<dir>/artifacts/*`. Returns the registry.
Registry write_corpus(const std::filesystem::path& dir, const std::string& base_url);

}  // namespace xrt::fixtures
