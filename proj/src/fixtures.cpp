#include "xrt/fixtures.hpp"

#include "xrt/error.hpp"
#include "xrt/sha256.hpp"

#include <fstream>
#include <random>

namespace fs = std::filesystem;

namespace xrt::fixtures {

std::string Artifact::file_name() const {
    return std::string(token(sdk)) + "-" + version + "." + std::string(extension(format));
}

namespace {

std::string noise(std::uint32_t seed, std::size_t size) {
    std::mt19937 rng(seed);
    std::string out(size, '\0');
    for (auto& c : out) c = static_cast<char>(rng() & 0xFF);
    return out;
}

std::string source(std::string_view cls, std::string_view version) {
    return "// " + std::string(cls) + " " + std::string(version) + "\npublic class " + std::string(cls) +
           " {\n    public const string Version = \"" + std::string(version) + "\";\n}\n";
}

std::string package_json(std::string_view name, std::string_view version) {
    return "{\n  \"name\": \"" + std::string(name) + "\",\n  \"version\": \"" + std::string(version) + "\"\n}\n";
}

std::vector<BundleFile> arcore_files(const std::string& v, std::uint32_t seed) {
    return {
        {"sdks/arcore/package.json", package_json("com.google.ar.core", v)},
        {"sdks/arcore/Runtime/ARCoreSession.cs", source("ARCoreSession", v)},
        {"sdks/arcore/Runtime/Plugins/arcore_client.aar", noise(seed, 200 * 1024)},
        {"sdks/arcore/Editor/ARCoreBuildHook.cs", source("ARCoreBuildHook", v)},
        {"sdks/arcore/Prefabs/ARCore Device.prefab", "prefab: ARCore Device\ncamera: First Person Camera\n"},
    };
}

std::vector<BundleFile> arkit_files(const std::string& v) {
    return {
        {"sdks/arkit/", "", false, true},
        {"sdks/arkit/Plugins/", "", false, true},
        {"sdks/arkit/Plugins/iOS/", "", false, true},
        {"sdks/arkit/Plugins/iOS/UnityARKit/", "", false, true},
        {"sdks/arkit/Plugins/iOS/UnityARKit/NativeInterface/", "", false, true},
        {"sdks/arkit/Plugins/iOS/UnityARKit/NativeInterface/ARSessionNative.mm",
         "// ARKit native bridge " + v + "\n#import <ARKit/ARKit.h>\n"},
        {"sdks/arkit/Scripts/", "", false, true},
        {"sdks/arkit/Scripts/ARKitCameraManager.cs", source("ARKitCameraManager", v)},
        {"sdks/arkit/Examples/", "", false, true},
        {"sdks/arkit/README.txt", "Unity ARKit plugin " + v + "\n"},
    };
}

std::vector<BundleFile> oculus_files(const std::string& v, std::uint32_t seed) {
    return {
        {"sdks/oculus/package.json", package_json("com.oculus.integration", v)},
        {"sdks/oculus/VR/Scripts/OVRCameraRig.cs", source("OVRCameraRig", v)},
        {"sdks/oculus/VR/Plugins/OVRPlugin.aar", noise(seed, 32 * 1024)},
    };
}

std::vector<BundleFile> mrtk_files(const std::string& v) {
    return {
        {"sdks/mrtk/package.json", package_json("com.microsoft.mixedreality.toolkit", v)},
        {"sdks/mrtk/Core/MixedRealityToolkit.cs", source("MixedRealityToolkit", v)},
        {"sdks/mrtk/Services/InputSystem.cs", source("InputSystem", v)},
        {"sdks/mrtk/Tools/build.sh", "#!/bin/sh\necho mrtk " + v + "\n", true},
    };
}

Artifact make(SdkId sdk, std::string version, ArchiveFormat format, std::vector<BundleFile> files) {
    Artifact a{sdk, std::move(version), format, std::move(files), {}};
    a.bytes = format == ArchiveFormat::Zip ? write_zip_bundle(a.files) : write_pkg_bundle(a.files);
    return a;
}

}  // namespace

const std::vector<Artifact>& artifacts() {
    static const std::vector<Artifact> all = [] {
        std::vector<Artifact> v;
        v.push_back(make(SdkId::ARCore, "1.0.0", ArchiveFormat::PkgBundle, arcore_files("1.0.0", 100)));
        v.push_back(make(SdkId::ARCore, "1.2.0", ArchiveFormat::PkgBundle, arcore_files("1.2.0", 120)));
        v.push_back(make(SdkId::ARKit, "2.1.0", ArchiveFormat::Zip, arkit_files("2.1.0")));
        v.push_back(make(SdkId::ARKit, "3.0.0", ArchiveFormat::Zip, arkit_files("3.0.0")));
        v.push_back(make(SdkId::OculusIntegration, "12.0.0", ArchiveFormat::PkgBundle, oculus_files("12.0.0", 12)));
        v.push_back(make(SdkId::OculusIntegration, "20.1.0", ArchiveFormat::PkgBundle, oculus_files("20.1.0", 20)));
        v.push_back(make(SdkId::MixedRealityToolkit, "2.4.0", ArchiveFormat::PkgBundle, mrtk_files("2.4.0")));
        v.push_back(make(SdkId::MixedRealityToolkit, "2.5.1", ArchiveFormat::PkgBundle, mrtk_files("2.5.1")));
        return v;
    }();
    return all;
}

const Artifact& artifact(SdkId sdk, std::string_view version) {
    for (const auto& a : artifacts()) {
        if (a.sdk == sdk && a.version == version) return a;
    }
    fail(ErrorCode::UnknownVersion, "no fixture for " + std::string(token(sdk)) + " " + std::string(version));
}

Registry registry_for(const std::string& base_url) {
    nlohmann::json sdks = nlohmann::json::object();
    for (const auto& a : artifacts()) {
        sdks[std::string(token(a.sdk))].push_back({{"version", a.version},
                                                   {"url", base_url + "/artifacts/" + a.file_name()},
                                                   {"sha256", sha256_hex(a.bytes)},
                                                   {"format", token(a.format)},
                                                   {"size", a.bytes.size()}});
    }
    return Registry::from_json({{"sdks", sdks}});
}

Registry write_corpus(const fs::path& dir, const std::string& base_url) {
    auto registry = registry_for(base_url);
    std::error_code ec;
    fs::create_directories(dir / "artifacts", ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot create " + (dir / "artifacts").string());
    auto write = [](const fs::path& path, const std::string& data) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(data.data(), static_cast<std::streamsize>(data.size()));
        if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    };
    write(dir / "registry.json", canonical_registry_text(registry));
    for (const auto& a : artifacts()) write(dir / "artifacts" / a.file_name(), a.bytes);
    return registry;
}

}  // namespace xrt::fixtures
