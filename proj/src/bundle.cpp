#include "xrt/bundle.hpp"

#include "xrt/archive_codec.hpp"
#include "xrt/error.hpp"
#include "xrt/sha256.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace xrt {

std::string checked_relative_path(std::string_view path) {
    auto escape = [&](const char* why) -> std::string {
        fail(ErrorCode::PathEscape, "unsafe archive path '" + std::string(path) + "': " + why);
    };
    if (path.empty()) return escape("empty");
    if (path.front() == '/') return escape("absolute");
    if (path.find('\\') != std::string_view::npos) return escape("backslash");
    if (path.find(':') != std::string_view::npos) return escape("drive or stream separator");
    if (path.find('\0') != std::string_view::npos) return escape("NUL byte");
    std::size_t start = 0;
    while (start <= path.size()) {
        auto slash = path.find('/', start);
        auto seg = path.substr(start, slash == std::string_view::npos ? path.npos : slash - start);
        if (seg.empty()) return escape("empty segment");
        if (seg == ".") return escape("'.' segment");
        if (seg == "..") return escape("'..' segment");
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return std::string(path);
}

BundleManifest BundleManifest::from_json(const json& doc) {
    if (!doc.is_array()) fail(ErrorCode::CorruptArchive, "manifest must be a JSON array");
    BundleManifest m;
    for (const auto& item : doc) {
        if (!item.is_object() || !item.contains("path") || !item["path"].is_string() ||
            !item.contains("sha256") || !item["sha256"].is_string() ||
            !is_sha256_hex(item["sha256"].get<std::string>())) {
            fail(ErrorCode::CorruptArchive, "manifest entry needs string path and sha256");
        }
        ManifestEntry e;
        e.path = checked_relative_path(item["path"].get<std::string>());
        e.sha256 = item["sha256"].get<std::string>();
        if (item.contains("exec")) {
            if (!item["exec"].is_boolean()) fail(ErrorCode::CorruptArchive, "manifest exec must be a boolean");
            e.executable = item["exec"].get<bool>();
        }
        m.entries.push_back(std::move(e));
    }
    return m;
}

json BundleManifest::to_json() const {
    json out = json::array();
    for (const auto& e : entries) {
        out.push_back({{"path", e.path}, {"sha256", e.sha256}, {"exec", e.executable}});
    }
    return out;
}

json ExtractionReport::to_json() const {
    return {{"createdFiles", created_files}, {"createdDirs", created_dirs}};
}

ExtractionReport ExtractionReport::from_json(const json& doc) {
    ExtractionReport r;
    r.created_files = doc.at("createdFiles").get<std::vector<std::string>>();
    r.created_dirs = doc.at("createdDirs").get<std::vector<std::string>>();
    return r;
}

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct PlannedFile {
    std::string rel;  // relative to assets/
    std::string data;
    bool executable = false;
};

struct ExtractionPlan {
    std::vector<PlannedFile> files;
    std::vector<std::string> dirs;
    std::set<std::string> seen;

    void add_file(std::string rel, std::string data, bool exec) {
        if (!seen.insert(rel).second) fail(ErrorCode::CorruptArchive, "duplicate entry '" + rel + "'");
        files.push_back({std::move(rel), std::move(data), exec});
    }
    void add_dir(std::string rel) { dirs.push_back(std::move(rel)); }
};

constexpr std::string_view kAssets = "assets";

// Every directory needed by the plan, project-relative and parent-first.
std::vector<std::string> required_dirs(const ExtractionPlan& plan) {
    std::vector<std::string> ordered;
    std::set<std::string> known;
    auto add_chain = [&](std::string_view rel, bool include_self) {
        std::string prefix(kAssets);
        if (known.insert(prefix).second) ordered.push_back(prefix);
        std::size_t start = 0;
        while (true) {
            auto slash = rel.find('/', start);
            if (slash == std::string_view::npos) {
                if (include_self) {
                    auto full = prefix + "/" + std::string(rel.substr(start));
                    if (known.insert(full).second) ordered.push_back(full);
                }
                break;
            }
            prefix += "/" + std::string(rel.substr(start, slash - start));
            if (known.insert(prefix).second) ordered.push_back(prefix);
            start = slash + 1;
        }
    };
    for (const auto& f : plan.files) add_chain(f.rel, false);
    for (const auto& d : plan.dirs) add_chain(d, true);
    return ordered;
}

ExtractionReport commit(const fs::path& root, const ExtractionPlan& plan) {
    ExtractionReport report;
    if (plan.files.empty() && plan.dirs.empty()) return report;
    if (!fs::is_directory(root)) fail(ErrorCode::IoFailure, "project root " + root.string() + " is not a directory");

    std::set<std::string> file_paths;
    for (const auto& f : plan.files) file_paths.insert(std::string(kAssets) + "/" + f.rel);

    std::vector<std::string> to_create;
    for (const auto& rel : required_dirs(plan)) {
        if (file_paths.count(rel)) fail(ErrorCode::CorruptArchive, "'" + rel + "' is both a file and a directory");
        auto st = fs::symlink_status(root / rel);
        if (fs::is_symlink(st)) fail(ErrorCode::PathEscape, "'" + rel + "' is a symbolic link");
        if (fs::exists(st) && !fs::is_directory(st)) {
            fail(ErrorCode::PathConflict, "'" + rel + "' exists and is not a directory");
        }
        if (!fs::exists(st)) to_create.push_back(rel);
    }
    for (const auto& rel : file_paths) {
        if (fs::exists(fs::symlink_status(root / rel))) {
            fail(ErrorCode::PathConflict, "'" + rel + "' already exists");
        }
    }

    try {
        for (const auto& rel : to_create) {
            fs::create_directory(root / rel);
            report.created_dirs.push_back(rel);
        }
        for (const auto& f : plan.files) {
            auto rel = std::string(kAssets) + "/" + f.rel;
            auto target = root / rel;
            {
                std::ofstream out(target, std::ios::binary | std::ios::trunc);
                report.created_files.push_back(rel);
                out.write(f.data.data(), static_cast<std::streamsize>(f.data.size()));
                if (!out) throw std::runtime_error("write failed for " + rel);
            }
            if (f.executable) {
                fs::permissions(target, fs::perms::owner_exec | fs::perms::group_exec | fs::perms::others_exec,
                                fs::perm_options::add);
            }
        }
    } catch (const std::exception& e) {
        remove_extracted(root, report);
        fail(ErrorCode::IoFailure, std::string("extraction failed, changes reverted: ") + e.what());
    }
    return report;
}

}  // namespace

ArchiveFormat detect_format(const fs::path& archive) {
    std::ifstream in(archive, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open " + archive.string());
    char magic[4] = {};
    in.read(magic, 4);
    auto n = in.gcount();
    if (n >= 4 && magic[0] == 'P' && magic[1] == 'K' && magic[2] == 3 && magic[3] == 4) {
        return ArchiveFormat::Zip;
    }
    if (n >= 2 && static_cast<unsigned char>(magic[0]) == 0x1f &&
        static_cast<unsigned char>(magic[1]) == 0x8b) {
        return ArchiveFormat::PkgBundle;
    }
    fail(ErrorCode::UnknownFormat, archive.filename().string() + " is neither a zip nor a package bundle");
}

ExtractionReport extract_pkg(const fs::path& archive, const fs::path& project_root) {
    auto members = codec::read_tar(codec::gunzip(read_file(archive)));
    if (members.empty() || members.front().path != "manifest.json" ||
        members.front().type != codec::TarType::File) {
        fail(ErrorCode::ManifestMissing, archive.filename().string() + " has no leading manifest.json");
    }
    json doc;
    try {
        doc = json::parse(members.front().data);
    } catch (const json::exception& e) {
        fail(ErrorCode::CorruptArchive, std::string("manifest is not valid JSON: ") + e.what());
    }
    auto manifest = BundleManifest::from_json(doc);
    std::map<std::string, const ManifestEntry*> by_path;
    for (const auto& e : manifest.entries) {
        if (!by_path.emplace(e.path, &e).second) {
            fail(ErrorCode::CorruptArchive, "manifest lists '" + e.path + "' twice");
        }
    }

    ExtractionPlan plan;
    for (std::size_t i = 1; i < members.size(); ++i) {
        auto& m = members[i];
        if (m.type == codec::TarType::Symlink || m.type == codec::TarType::HardLink) {
            fail(ErrorCode::PathEscape, "link entries are not allowed ('" + m.path + "')");
        }
        if (m.type == codec::TarType::Other) {
            fail(ErrorCode::CorruptArchive, "unsupported tar entry type for '" + m.path + "'");
        }
        auto rel = checked_relative_path(m.path);
        if (m.type == codec::TarType::Directory) {
            plan.add_dir(std::move(rel));
            continue;
        }
        auto it = by_path.find(rel);
        if (it == by_path.end()) fail(ErrorCode::CorruptArchive, "'" + rel + "' is not in the manifest");
        if (sha256_hex(m.data) != it->second->sha256) {
            fail(ErrorCode::HashMismatch, "hash mismatch for '" + rel + "'");
        }
        bool exec = it->second->executable;
        by_path.erase(it);
        plan.add_file(std::move(rel), std::move(m.data), exec);
    }
    if (!by_path.empty()) {
        fail(ErrorCode::CorruptArchive, "manifest entry '" + by_path.begin()->first + "' is missing from the archive");
    }
    return commit(project_root, plan);
}

ExtractionReport extract_zip(const fs::path& archive, const fs::path& project_root) {
    auto members = codec::read_zip(read_file(archive));
    ExtractionPlan plan;
    for (auto& m : members) {
        if (m.symlink) fail(ErrorCode::PathEscape, "symbolic link entries are not allowed ('" + m.path + "')");
        auto rel = checked_relative_path(m.path);
        if (m.directory) {
            plan.add_dir(std::move(rel));
        } else {
            plan.add_file(std::move(rel), std::move(m.data), m.executable);
        }
    }
    return commit(project_root, plan);
}

ExtractionReport extract_archive(const fs::path& archive, const fs::path& project_root) {
    return detect_format(archive) == ArchiveFormat::Zip ? extract_zip(archive, project_root)
                                                        : extract_pkg(archive, project_root);
}

std::vector<std::string> remove_extracted(const fs::path& project_root, const ExtractionReport& report) {
    for (const auto& rel : report.created_files) {
        std::error_code ec;
        fs::remove(project_root / rel, ec);
        if (ec) fail(ErrorCode::IoFailure, "cannot remove " + rel + ": " + ec.message());
    }
    std::vector<std::string> kept;
    for (auto it = report.created_dirs.rbegin(); it != report.created_dirs.rend(); ++it) {
        auto p = project_root / *it;
        std::error_code ec;
        if (!fs::exists(p, ec)) continue;
        if (!fs::is_empty(p, ec)) {
            kept.push_back(*it);
            continue;
        }
        fs::remove(p, ec);
        if (ec) fail(ErrorCode::IoFailure, "cannot remove " + *it + ": " + ec.message());
    }
    return kept;
}

}  // namespace xrt
