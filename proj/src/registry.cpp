#include "xrt/registry.hpp"

#include "xrt/error.hpp"
#include "xrt/sha256.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace xrt {

using nlohmann::json;

std::string_view token(SdkId sdk) noexcept {
    switch (sdk) {
    case SdkId::ARCore: return "arcore";
    case SdkId::ARKit: return "arkit";
    case SdkId::OculusIntegration: return "oculus";
    case SdkId::MixedRealityToolkit: return "mrtk";
    }
    return "?";
}

std::string_view display_name(SdkId sdk) noexcept {
    switch (sdk) {
    case SdkId::ARCore: return "ARCore";
    case SdkId::ARKit: return "ARKit";
    case SdkId::OculusIntegration: return "Oculus Integration";
    case SdkId::MixedRealityToolkit: return "Mixed Reality Toolkit";
    }
    return "?";
}

std::optional<SdkId> parse_sdk_id(std::string_view text) noexcept {
    for (SdkId sdk : kAllSdks) {
        if (token(sdk) == text) return sdk;
    }
    return std::nullopt;
}

SdkId sdk_from_token(std::string_view text) {
    if (auto sdk = parse_sdk_id(text)) return *sdk;
    fail(ErrorCode::UnknownSdk,
         "unknown SDK '" + std::string(text) + "' (expected arcore, arkit, oculus or mrtk)");
}

SdkVersion SdkVersion::parse(std::string_view text) {
    SdkVersion v;
    v.text_ = std::string(text);
    if (text.empty()) {
        fail(ErrorCode::InvalidArgument, "empty version string");
    }
    std::size_t start = 0;
    while (true) {
        auto dot = text.find('.', start);
        auto part = text.substr(start, dot == std::string_view::npos ? text.npos : dot - start);
        std::uint32_t value = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
        if (part.empty() || ec != std::errc{} || ptr != part.data() + part.size()) {
            fail(ErrorCode::InvalidArgument, "bad version string '" + v.text_ + "'");
        }
        v.segments_.push_back(value);
        if (dot == std::string_view::npos) break;
        start = dot + 1;
    }
    return v;
}

std::strong_ordering operator<=>(const SdkVersion& a, const SdkVersion& b) noexcept {
    const auto n = std::max(a.segments_.size(), b.segments_.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t x = i < a.segments_.size() ? a.segments_[i] : 0;
        std::uint32_t y = i < b.segments_.size() ? b.segments_[i] : 0;
        if (auto c = x <=> y; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

std::string_view token(ArchiveFormat format) noexcept {
    return format == ArchiveFormat::Zip ? "zip" : "pkg";
}

std::string_view extension(ArchiveFormat format) noexcept {
    return token(format);
}

namespace {

[[noreturn]] void malformed(const std::string& what) {
    fail(ErrorCode::MalformedRegistry, "malformed registry: " + what);
}

bool valid_url(std::string_view url) {
    std::string_view rest;
    if (url.starts_with("http://")) {
        rest = url.substr(7);
    } else if (url.starts_with("https://")) {
        rest = url.substr(8);
    } else {
        return false;
    }
    auto host = rest.substr(0, rest.find('/'));
    return !host.empty() && host.front() != ':';
}

ArtifactDescriptor parse_entry(SdkId sdk, const json& item) {
    if (!item.is_object()) malformed("entry for " + std::string(token(sdk)) + " is not an object");
    for (const char* key : {"version", "url", "sha256", "format", "size"}) {
        if (!item.contains(key)) {
            malformed("entry for " + std::string(token(sdk)) + " lacks '" + key + "'");
        }
    }
    for (const auto& [key, _] : item.items()) {
        if (key != "version" && key != "url" && key != "sha256" && key != "format" && key != "size") {
            malformed("unexpected key '" + key + "'");
        }
    }
    ArtifactDescriptor desc;
    desc.sdk = sdk;
    if (!item["version"].is_string()) malformed("version must be a string");
    try {
        desc.version = SdkVersion::parse(item["version"].get<std::string>());
    } catch (const Error& e) {
        malformed(e.what());
    }
    if (!item["url"].is_string() || !valid_url(item["url"].get<std::string>())) {
        malformed("url must be an absolute http(s) URL");
    }
    desc.url = item["url"].get<std::string>();
    if (!item["sha256"].is_string() || !is_sha256_hex(item["sha256"].get<std::string>())) {
        malformed("sha256 must be 64 lowercase hex characters");
    }
    desc.sha256 = item["sha256"].get<std::string>();
    const auto& fmt = item["format"];
    if (fmt == "pkg") {
        desc.format = ArchiveFormat::PkgBundle;
    } else if (fmt == "zip") {
        desc.format = ArchiveFormat::Zip;
    } else {
        malformed("format must be \"pkg\" or \"zip\"");
    }
    if (!item["size"].is_number_unsigned()) malformed("size must be a non-negative integer");
    desc.size_bytes = item["size"].get<std::uint64_t>();
    return desc;
}

}  // namespace

Registry Registry::from_json(const json& doc) {
    if (!doc.is_object() || !doc.contains("sdks") || !doc["sdks"].is_object()) {
        malformed("top-level object must contain an 'sdks' map");
    }
    Registry reg;
    for (const auto& [key, list] : doc["sdks"].items()) {
        auto sdk = parse_sdk_id(key);
        if (!sdk) malformed("unknown SDK key '" + key + "'");
        if (!list.is_array()) malformed("versions of '" + key + "' must be an array");
        std::vector<ArtifactDescriptor> versions;
        for (const auto& item : list) {
            auto desc = parse_entry(*sdk, item);
            if (!versions.empty() && !(versions.back().version < desc.version)) {
                malformed("versions of '" + key + "' must be strictly ascending (" +
                          versions.back().version.str() + " then " + desc.version.str() + ")");
            }
            versions.push_back(std::move(desc));
        }
        if (!versions.empty()) reg.entries_.emplace(*sdk, std::move(versions));
    }
    return reg;
}

json Registry::to_json() const {
    json sdks = json::object();
    for (const auto& [sdk, versions] : entries_) {
        json list = json::array();
        for (const auto& d : versions) {
            list.push_back({{"version", d.version.str()},
                            {"url", d.url},
                            {"sha256", d.sha256},
                            {"format", token(d.format)},
                            {"size", d.size_bytes}});
        }
        sdks[std::string(token(sdk))] = std::move(list);
    }
    return json{{"sdks", std::move(sdks)}};
}

std::vector<SdkId> Registry::sdks() const {
    std::vector<SdkId> out;
    for (const auto& [sdk, _] : entries_) out.push_back(sdk);
    return out;
}

std::size_t Registry::size() const noexcept {
    std::size_t n = 0;
    for (const auto& [_, versions] : entries_) n += versions.size();
    return n;
}

std::vector<SdkVersion> Registry::list_versions(SdkId sdk) const {
    std::vector<SdkVersion> out;
    if (auto it = entries_.find(sdk); it != entries_.end()) {
        for (const auto& d : it->second) out.push_back(d.version);
    }
    return out;
}

const ArtifactDescriptor& Registry::resolve(SdkId sdk, std::string_view spec) const {
    auto it = entries_.find(sdk);
    if (it == entries_.end() || it->second.empty()) {
        fail(ErrorCode::UnknownSdk,
             "registry has no versions of " + std::string(display_name(sdk)));
    }
    const auto& versions = it->second;
    if (spec == "latest") return versions.back();
    SdkVersion wanted;
    try {
        wanted = SdkVersion::parse(spec);
    } catch (const Error&) {
        fail(ErrorCode::UnknownVersion, "bad version spec '" + std::string(spec) + "'");
    }
    for (const auto& d : versions) {
        if (d.version == wanted) return d;
    }
    fail(ErrorCode::UnknownVersion, std::string(display_name(sdk)) + " " + std::string(spec) +
                                        " is not in the registry");
}

Registry parse_registry(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        malformed(e.what());
    }
    return Registry::from_json(doc);
}

Registry load_registry(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot read registry " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_registry(ss.str());
}

std::string canonical_registry_text(const Registry& registry) {
    return registry.to_json().dump(2) + "\n";
}

}  // namespace xrt
