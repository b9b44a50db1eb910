#pragma once

#include "xrt/project.hpp"
#include "xrt/registry.hpp"

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace xrt {

enum class Reality { AugmentedAndroid, AugmentedIOS, VirtualOculus, MixedHolographic };

inline constexpr std::array<Reality, 4> kAllRealities{
    Reality::AugmentedAndroid, Reality::AugmentedIOS, Reality::VirtualOculus, Reality::MixedHolographic};

/// "ar-android", "ar-ios", "vr-oculus", "mr-holo"
std::string_view token(Reality reality) noexcept;
std::optional<Reality> parse_reality(std::string_view text) noexcept;
/// Like parse_reality, but throws InvalidArgument.
Reality reality_from_token(std::string_view text);

SdkId sdk_for(Reality reality) noexcept;
Reality reality_for(SdkId sdk) noexcept;

/// The four mutually exclusive reality define symbols.
const std::set<std::string>& reality_define_symbols();

struct RealityProfile {
    Reality reality{};
    SdkId sdk{};
    BuildTargetGroup target{};
    std::vector<GraphicsApi> allowed_graphics_apis;
    /// Written when the current list is not a non-empty subset of the allowed ones.
    std::vector<GraphicsApi> preferred_graphics_apis;
    std::set<std::string> required_packages;
    std::optional<int> min_android_api_level;
    std::optional<bool> ar_supported;
    std::string define_symbol;
    std::set<BuildTargetGroup> define_groups;
    SceneNode camera_template;
};

class ProfileTable {
public:
    /// The table compiled into the binary from profiles/realities.json.
    static const ProfileTable& builtin();
    /// Throws MalformedInput on schema errors or when a reality is missing.
    static ProfileTable parse(std::string_view text);

    const RealityProfile& get(Reality reality) const;

private:
    std::map<Reality, RealityProfile> profiles_;
};

const RealityProfile& profile_for(Reality reality);

}  // namespace xrt
