#pragma once

#include "xrt/bundle.hpp"
#include "xrt/registry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xrt {

enum class BuildTargetGroup { Standalone, Android, iOS, UWP };

inline constexpr std::array<BuildTargetGroup, 4> kAllGroups{
    BuildTargetGroup::Standalone, BuildTargetGroup::Android, BuildTargetGroup::iOS,
    BuildTargetGroup::UWP};

std::string_view token(BuildTargetGroup group) noexcept;
BuildTargetGroup parse_group(std::string_view text);

enum class GraphicsApi { OpenGLES2, OpenGLES3, Metal, Direct3D11 };

std::string_view token(GraphicsApi api) noexcept;  // "OPENGLES2", ..., "D3D11"
GraphicsApi parse_graphics_api(std::string_view text);

struct Vec3 {
    double x = 0, y = 0, z = 0;
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

/// Unit quaternion, scalar first.
struct Quat {
    double w = 1, x = 0, y = 0, z = 0;
    friend bool operator==(const Quat&, const Quat&) = default;
};

struct Transform {
    Vec3 position;
    Quat rotation;
    Vec3 scale{1, 1, 1};
    friend bool operator==(const Transform&, const Transform&) = default;
};

enum class NodeRole { Plain, Camera, SdkCameraRig };

struct SceneNode {
    std::string name;
    Transform transform;
    bool active = true;
    NodeRole role = NodeRole::Plain;
    std::optional<SdkId> rig_sdk;  ///< set iff role == SdkCameraRig
    std::vector<SceneNode> children;

    const SceneNode* child(std::string_view child_name) const noexcept;
    SceneNode* child(std::string_view child_name) noexcept;

    friend bool operator==(const SceneNode&, const SceneNode&) = default;
};

using DefineTable = std::map<BuildTargetGroup, std::set<std::string>>;

struct ProjectSettings {
    BuildTargetGroup active_target = BuildTargetGroup::Standalone;
    std::vector<GraphicsApi> graphics_apis{GraphicsApi::Direct3D11};
    int min_android_api_level = 0;
    bool ar_supported = false;
    std::set<std::string> packages;
    /// Groups with no symbols are absent, never empty sets.
    DefineTable defines;

    friend bool operator==(const ProjectSettings&, const ProjectSettings&) = default;
};

struct InstalledSdk {
    SdkVersion version;
    ExtractionReport files;
    friend bool operator==(const InstalledSdk&, const InstalledSdk&) = default;
};

struct Project {
    ProjectSettings settings;
    std::map<std::string, SceneNode> scenes;  ///< scene name -> root node
    std::map<SdkId, InstalledSdk> installed_sdks;
    std::string asset_root = "assets";
    /// In-memory mutation counter; not serialized and ignored by ==.
    std::uint64_t revision = 0;

    friend bool operator==(const Project& a, const Project& b) {
        return a.settings == b.settings && a.scenes == b.scenes &&
               a.installed_sdks == b.installed_sdks && a.asset_root == b.asset_root;
    }
};

// ---- canonical serialization -----------------------------------------------

nlohmann::json to_json(const SceneNode& node);
SceneNode scene_node_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const DefineTable& defines);
DefineTable define_table_from_json(const nlohmann::json& doc);
nlohmann::json to_json(const Project& project);
/// Throws MalformedProject on any schema or invariant violation.
Project project_from_json(const nlohmann::json& doc);

/// Canonical text: sorted keys, two-space indent, shortest round-trip
/// doubles, trailing newline. Equal projects give equal bytes.
std::string canonical_text(const Project& project);
/// SHA-256 of canonical_text.
std::string snapshot_hash(const Project& project);

Project parse_project(std::string_view text);
Project load_project(const std::filesystem::path& path);
/// Writes canonical_text via a temporary file and rename.
void save_project(const Project& project, const std::filesystem::path& path);

// ---- settings --------------------------------------------------------------

/// `[A-Z][A-Z0-9_]*`
bool is_valid_define_symbol(std::string_view symbol) noexcept;

/// No-op when already present. Throws BadSymbol.
void add_define(Project& project, std::string_view symbol, BuildTargetGroup group);
/// No-op when absent. Throws BadSymbol.
void remove_define(Project& project, std::string_view symbol, BuildTargetGroup group);
bool has_define(const Project& project, std::string_view symbol, BuildTargetGroup group);

void set_active_target(Project& project, BuildTargetGroup group);
void add_package(Project& project, std::string_view name);
void remove_package(Project& project, std::string_view name);

// ---- scene graph -----------------------------------------------------------

/// `node_path` is slash-separated and starts with the root node's name.
/// Throws NoSuchScene / NoSuchNode.
const SceneNode& find_node(const Project& project, std::string_view scene, std::string_view node_path);
SceneNode& find_node(Project& project, std::string_view scene, std::string_view node_path);
bool node_exists(const Project& project, std::string_view scene, std::string_view node_path);

/// Parent path of "A/B/C" is "A/B"; of a root path it is empty.
std::string parent_path(std::string_view node_path);

/// `base`, or `base (1)`, `base (2)`, ... whichever is free among `parent`'s children.
std::string unique_child_name(const SceneNode& parent, std::string_view base);

/// Inserts `node` under the node at `parent_path`, renaming it if a sibling
/// already uses its name. `index` defaults to appending. Returns the new path.
std::string insert_node(Project& project, std::string_view scene, std::string_view parent_path,
                        SceneNode node, std::optional<std::size_t> index = std::nullopt);

struct RemovedNode {
    SceneNode node;
    std::string parent_path;
    std::size_t index = 0;
};

/// Detaches a non-root node.
RemovedNode remove_node(Project& project, std::string_view scene, std::string_view node_path);

/// Invokes `fn(path, node)` for every node in every scene, depth-first.
template <typename Fn>
void for_each_node(const Project& project, Fn&& fn);

// ---- fixtures --------------------------------------------------------------

/// A fresh project: one scene "SampleScene" with root "Main" holding a
/// "Camera" (role Camera) and an "Exhibit" node, Standalone target.
Project make_sample_project();

namespace detail {
template <typename Fn>
void visit(const SceneNode& node, const std::string& path, Fn& fn) {
    fn(path, node);
    for (const auto& c : node.children) visit(c, path + "/" + c.name, fn);
}
}  // namespace detail

template <typename Fn>
void for_each_node(const Project& project, Fn&& fn) {
    for (const auto& [scene, root] : project.scenes) {
        (void)scene;
        detail::visit(root, root.name, fn);
    }
}

}  // namespace xrt
