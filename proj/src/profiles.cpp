#include "xrt/profiles.hpp"

#include "xrt/error.hpp"

#include <algorithm>

#include <json.hpp>

using nlohmann::json;

namespace xrt {

namespace detail {
extern const std::string_view kBuiltinProfiles;
}

std::string_view token(Reality reality) noexcept {
    switch (reality) {
    case Reality::AugmentedAndroid: return "ar-android";
    case Reality::AugmentedIOS: return "ar-ios";
    case Reality::VirtualOculus: return "vr-oculus";
    case Reality::MixedHolographic: return "mr-holo";
    }
    return "?";
}

std::optional<Reality> parse_reality(std::string_view text) noexcept {
    for (auto r : kAllRealities) {
        if (token(r) == text) return r;
    }
    return std::nullopt;
}

Reality reality_from_token(std::string_view text) {
    if (auto r = parse_reality(text)) return *r;
    fail(ErrorCode::InvalidArgument,
         "unknown reality '" + std::string(text) + "' (expected ar-android, ar-ios, vr-oculus or mr-holo)");
}

SdkId sdk_for(Reality reality) noexcept {
    switch (reality) {
    case Reality::AugmentedAndroid: return SdkId::ARCore;
    case Reality::AugmentedIOS: return SdkId::ARKit;
    case Reality::VirtualOculus: return SdkId::OculusIntegration;
    case Reality::MixedHolographic: return SdkId::MixedRealityToolkit;
    }
    return SdkId::ARCore;
}

Reality reality_for(SdkId sdk) noexcept {
    switch (sdk) {
    case SdkId::ARCore: return Reality::AugmentedAndroid;
    case SdkId::ARKit: return Reality::AugmentedIOS;
    case SdkId::OculusIntegration: return Reality::VirtualOculus;
    case SdkId::MixedRealityToolkit: return Reality::MixedHolographic;
    }
    return Reality::AugmentedAndroid;
}

const std::set<std::string>& reality_define_symbols() {
    static const std::set<std::string> symbols{"ARCORE_SDK", "ARKIT_SDK", "OCULUS_SDK", "MRTK_SDK"};
    return symbols;
}

namespace {

[[noreturn]] void malformed(const std::string& what) { fail(ErrorCode::MalformedInput, "profile table: " + what); }

std::vector<GraphicsApi> api_list(const json& doc, const char* key) {
    std::vector<GraphicsApi> out;
    for (const auto& v : doc.at(key)) out.push_back(parse_graphics_api(v.get<std::string>()));
    if (out.empty()) malformed(std::string(key) + " must not be empty");
    return out;
}

RealityProfile parse_profile(Reality reality, const json& doc) {
    static const std::set<std::string> known{"sdk",          "target",          "allowedGraphicsApis",
                                             "preferredGraphicsApis", "requiredPackages", "minAndroidApiLevel",
                                             "arSupported",  "defineSymbol",    "defineGroups",
                                             "cameraTemplate"};
    for (const auto& [k, v] : doc.items()) {
        if (!known.contains(k)) malformed("unknown key '" + k + "' in " + std::string(token(reality)));
    }
    RealityProfile p;
    p.reality = reality;
    p.sdk = sdk_from_token(doc.at("sdk").get<std::string>());
    if (p.sdk != sdk_for(reality)) malformed(std::string(token(reality)) + " names the wrong SDK");
    p.target = parse_group(doc.at("target").get<std::string>());
    p.allowed_graphics_apis = api_list(doc, "allowedGraphicsApis");
    p.preferred_graphics_apis = api_list(doc, "preferredGraphicsApis");
    for (auto api : p.preferred_graphics_apis) {
        if (std::find(p.allowed_graphics_apis.begin(), p.allowed_graphics_apis.end(), api) ==
            p.allowed_graphics_apis.end()) {
            malformed("preferred graphics API not in the allowed list of " + std::string(token(reality)));
        }
    }
    p.required_packages = doc.at("requiredPackages").get<std::set<std::string>>();
    if (doc.contains("minAndroidApiLevel")) p.min_android_api_level = doc.at("minAndroidApiLevel").get<int>();
    if (doc.contains("arSupported")) p.ar_supported = doc.at("arSupported").get<bool>();
    p.define_symbol = doc.at("defineSymbol").get<std::string>();
    if (!reality_define_symbols().contains(p.define_symbol)) malformed("unknown define symbol " + p.define_symbol);
    for (const auto& g : doc.at("defineGroups")) p.define_groups.insert(parse_group(g.get<std::string>()));
    if (!p.define_groups.contains(BuildTargetGroup::Standalone)) {
        malformed(std::string(token(reality)) + " define groups must include Standalone");
    }
    p.camera_template = scene_node_from_json(doc.at("cameraTemplate"));
    if (p.camera_template.role != NodeRole::SdkCameraRig || p.camera_template.rig_sdk != p.sdk) {
        malformed("camera template of " + std::string(token(reality)) + " must be a rig for its SDK");
    }
    return p;
}

}  // namespace

ProfileTable ProfileTable::parse(std::string_view text) {
    ProfileTable table;
    try {
        auto doc = json::parse(text);
        if (doc.at("format").get<int>() != 1) malformed("unsupported format");
        const auto& realities = doc.at("realities");
        for (const auto& [key, value] : realities.items()) {
            auto r = parse_reality(key);
            if (!r) malformed("unknown reality '" + key + "'");
            table.profiles_.emplace(*r, parse_profile(*r, value));
        }
    } catch (const json::exception& e) {
        malformed(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedInput) throw;
        malformed(e.what());
    }
    for (auto r : kAllRealities) {
        if (!table.profiles_.contains(r)) malformed("missing reality " + std::string(token(r)));
    }
    return table;
}

const ProfileTable& ProfileTable::builtin() {
    static const ProfileTable table = parse(detail::kBuiltinProfiles);
    return table;
}

const RealityProfile& ProfileTable::get(Reality reality) const { return profiles_.at(reality); }

const RealityProfile& profile_for(Reality reality) { return ProfileTable::builtin().get(reality); }

}  // namespace xrt
