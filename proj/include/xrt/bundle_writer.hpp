#pragma once

// Builders for artifact archives. Used to produce fixture corpora; the
// output is deterministic byte-for-byte.

#include <span>
#include <string>
#include <string_view>

namespace xrt {

struct BundleFile {
    std::string path;  ///< relative to assets/, e.g. "sdks/arcore/Scripts/Session.cs"
    std::string data;
    bool executable = false;
    bool directory = false;
};

/// gzip+tar with a generated manifest.json as first member.
std::string write_pkg_bundle(std::span<const BundleFile> files);

/// Like write_pkg_bundle, but with a caller-provided manifest text. Lets tests
/// build bundles whose manifest disagrees with their content.
std::string write_pkg_bundle_with_manifest(std::string_view manifest_json,
                                           std::span<const BundleFile> files);

std::string write_zip_bundle(std::span<const BundleFile> files, bool deflate = true);

}  // namespace xrt
