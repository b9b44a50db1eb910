#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xrt {

enum class SdkId { ARCore, ARKit, OculusIntegration, MixedRealityToolkit };

inline constexpr std::array<SdkId, 4> kAllSdks{
    SdkId::ARCore, SdkId::ARKit, SdkId::OculusIntegration, SdkId::MixedRealityToolkit};

/// Stable token used in files and on the command line ("arcore", "arkit", ...).
std::string_view token(SdkId sdk) noexcept;
std::string_view display_name(SdkId sdk) noexcept;
std::optional<SdkId> parse_sdk_id(std::string_view text) noexcept;
/// Like parse_sdk_id, but throws UnknownSdk.
SdkId sdk_from_token(std::string_view text);

/// Dotted numeric version. Ordering is segment-wise numeric with missing
/// trailing segments treated as zero, so "1.0" and "1.0.0" compare equal.
class SdkVersion {
public:
    /// Throws InvalidArgument on anything but `digits(.digits)*`.
    static SdkVersion parse(std::string_view text);

    const std::string& str() const noexcept { return text_; }
    const std::vector<std::uint32_t>& segments() const noexcept { return segments_; }

    friend std::strong_ordering operator<=>(const SdkVersion& a, const SdkVersion& b) noexcept;
    friend bool operator==(const SdkVersion& a, const SdkVersion& b) noexcept {
        return (a <=> b) == std::strong_ordering::equal;
    }

private:
    std::string text_;
    std::vector<std::uint32_t> segments_;
};

enum class ArchiveFormat { PkgBundle, Zip };

std::string_view token(ArchiveFormat format) noexcept;
/// File extension used for staged downloads.
std::string_view extension(ArchiveFormat format) noexcept;

struct ArtifactDescriptor {
    SdkId sdk{};
    SdkVersion version;
    std::string url;
    std::string sha256;
    ArchiveFormat format{};
    std::uint64_t size_bytes = 0;

    friend bool operator==(const ArtifactDescriptor&, const ArtifactDescriptor&) = default;
};

/// Catalog of downloadable SDK versions. Immutable once loaded.
class Registry {
public:
    Registry() = default;

    /// Validates and builds a registry from its JSON document. Throws
    /// MalformedRegistry on any schema or ordering violation.
    static Registry from_json(const nlohmann::json& doc);
    nlohmann::json to_json() const;

    std::vector<SdkId> sdks() const;
    /// Total number of (sdk, version) entries.
    std::size_t size() const noexcept;

    std::vector<SdkVersion> list_versions(SdkId sdk) const;
    /// `spec` is "latest" or an exact version.
    const ArtifactDescriptor& resolve(SdkId sdk, std::string_view spec) const;

    friend bool operator==(const Registry&, const Registry&) = default;

private:
    std::map<SdkId, std::vector<ArtifactDescriptor>> entries_;
};

Registry parse_registry(std::string_view text);
Registry load_registry(const std::filesystem::path& path);
/// Canonical serialized form (sorted keys, two-space indent, trailing newline).
std::string canonical_registry_text(const Registry& registry);

}  // namespace xrt
