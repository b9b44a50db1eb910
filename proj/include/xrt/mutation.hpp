#pragma once

#include "xrt/project.hpp"

#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace xrt {

// Every project change an install or transition makes is one of these.
// Applying a mutation returns its inverse, captured from the state it was
// applied to; applying that inverse restores the state exactly.
namespace mutation {

struct SetTarget {
    BuildTargetGroup target{};
};
struct SetGraphicsApis {
    std::vector<GraphicsApi> apis;
};
struct AddPackage {
    std::string name;
};
struct RemovePackage {
    std::string name;
};
struct SetMinApi {
    int level = 0;
};
struct SetArSupported {
    bool enabled = false;
};
/// Removes every symbol in `exclusive` from all groups, then adds `symbol`
/// to each of `groups`.
struct SwapDefines {
    std::string symbol;
    std::set<BuildTargetGroup> groups;
    std::set<std::string> exclusive;
};
struct SetDefines {
    DefineTable defines;
};
/// Deactivates the camera and inserts `rig` right after it as a sibling,
/// carrying the camera's transform.
struct ReplaceCamera {
    std::string scene;
    std::string camera_path;
    SceneNode rig;
};
struct RestoreCamera {
    std::string scene;
    std::string camera_path;
    bool was_active = true;
    std::string rig_path;
};
struct InsertNode {
    std::string scene;
    std::string parent_path;
    std::optional<std::size_t> index;
    SceneNode node;
};
struct RemoveNode {
    std::string scene;
    std::string path;
};
struct RegisterSdk {
    SdkId sdk{};
    InstalledSdk record;
};
struct UnregisterSdk {
    SdkId sdk{};
};
/// Files already written by an extraction. Forward application only checks
/// they are present.
struct PlaceFiles {
    ExtractionReport report;
};
struct RemoveFiles {
    ExtractionReport report;
};

}  // namespace mutation

using Mutation = std::variant<mutation::SetTarget, mutation::SetGraphicsApis, mutation::AddPackage,
                              mutation::RemovePackage, mutation::SetMinApi, mutation::SetArSupported,
                              mutation::SwapDefines, mutation::SetDefines, mutation::ReplaceCamera,
                              mutation::RestoreCamera, mutation::InsertNode, mutation::RemoveNode,
                              mutation::RegisterSdk, mutation::UnregisterSdk, mutation::PlaceFiles,
                              mutation::RemoveFiles>;

std::string_view kind(const Mutation& m) noexcept;
nlohmann::json to_json(const Mutation& m);
Mutation mutation_from_json(const nlohmann::json& doc);

struct ApplyContext {
    std::filesystem::path project_root;
    /// When false, file mutations touch only the model, never the disk.
    bool disk_effects = true;
    /// Decides whether a file can be deleted. Defaults to "exists and its
    /// directory is writable"; tests substitute locked-file scenarios.
    std::function<bool(const std::filesystem::path&)> can_remove;
};

/// Applies `m` and returns its inverse. Bumps project.revision. Throws on
/// a precondition failure, leaving the project untouched.
Mutation apply_mutation(Project& project, const Mutation& m, const ApplyContext& ctx);

/// For RemoveFiles: the first file that could not be deleted, if any.
std::optional<std::string> first_unremovable(const Mutation& m, const ApplyContext& ctx);

}  // namespace xrt
