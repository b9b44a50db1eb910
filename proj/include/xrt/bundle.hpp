#pragma once

#include "xrt/registry.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xrt {

struct ManifestEntry {
    std::string path;  ///< relative to the project's assets/ directory
    std::string sha256;
    bool executable = false;

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Internal index of a PkgBundle: a JSON array of {path, sha256, exec}.
struct BundleManifest {
    std::vector<ManifestEntry> entries;

    /// Throws CorruptArchive on schema errors, PathEscape on unsafe paths.
    static BundleManifest from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;
};

/// Paths created by one extraction, project-relative with '/' separators.
/// Directories are listed parent-first in creation order.
struct ExtractionReport {
    std::vector<std::string> created_files;
    std::vector<std::string> created_dirs;

    bool empty() const noexcept { return created_files.empty() && created_dirs.empty(); }
    nlohmann::json to_json() const;
    static ExtractionReport from_json(const nlohmann::json& doc);

    friend bool operator==(const ExtractionReport&, const ExtractionReport&) = default;
};

/// Validates an archive-relative path: no absolute paths, no empty, "." or
/// ".." segments, no backslashes or drive colons. Throws PathEscape.
std::string checked_relative_path(std::string_view path);

/// Sniffs magic bytes: `PK\3\4` is Zip, `\x1f\x8b` is PkgBundle.
ArchiveFormat detect_format(const std::filesystem::path& archive);

/// Extracts a gzip+tar bundle whose first member is manifest.json into
/// `project_root/assets/`. All-or-nothing: every check (paths, hashes,
/// manifest coverage) runs before the first byte is written, and a write
/// failure removes everything written so far.
ExtractionReport extract_pkg(const std::filesystem::path& archive,
                             const std::filesystem::path& project_root);

/// Same contract as extract_pkg for PKZIP archives, integrity checked with
/// each entry's CRC32.
ExtractionReport extract_zip(const std::filesystem::path& archive,
                             const std::filesystem::path& project_root);

/// detect_format, then the matching extractor.
ExtractionReport extract_archive(const std::filesystem::path& archive,
                                 const std::filesystem::path& project_root);

/// Deletes reported files, then reported directories deepest-first. A
/// directory that still has foreign content is left in place and returned.
std::vector<std::string> remove_extracted(const std::filesystem::path& project_root,
                                          const ExtractionReport& report);

}  // namespace xrt
