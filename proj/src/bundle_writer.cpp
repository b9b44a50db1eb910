#include "xrt/bundle_writer.hpp"

#include "xrt/archive_codec.hpp"
#include "xrt/bundle.hpp"
#include "xrt/sha256.hpp"

#include <vector>

namespace xrt {

std::string write_pkg_bundle(std::span<const BundleFile> files) {
    BundleManifest manifest;
    for (const auto& f : files) {
        if (!f.directory) manifest.entries.push_back({f.path, sha256_hex(f.data), f.executable});
    }
    return write_pkg_bundle_with_manifest(manifest.to_json().dump(), files);
}

std::string write_pkg_bundle_with_manifest(std::string_view manifest_json,
                                           std::span<const BundleFile> files) {
    std::vector<codec::TarMember> members;
    members.push_back({"manifest.json", codec::TarType::File, 0644, std::string(manifest_json)});
    for (const auto& f : files) {
        codec::TarMember m;
        m.path = f.path;
        m.type = f.directory ? codec::TarType::Directory : codec::TarType::File;
        m.mode = f.executable ? 0755 : 0644;
        m.data = f.data;
        members.push_back(std::move(m));
    }
    return codec::gzip(codec::write_tar(members));
}

std::string write_zip_bundle(std::span<const BundleFile> files, bool deflate) {
    std::vector<codec::ZipMember> members;
    for (const auto& f : files) {
        codec::ZipMember m;
        m.path = f.path;
        m.directory = f.directory;
        m.executable = f.executable;
        m.data = f.data;
        members.push_back(std::move(m));
    }
    return codec::write_zip(members, deflate);
}

}  // namespace xrt
