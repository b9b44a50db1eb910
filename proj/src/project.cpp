#include "xrt/project.hpp"

#include "xrt/error.hpp"
#include "xrt/sha256.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace xrt {

std::string_view token(BuildTargetGroup group) noexcept {
    switch (group) {
    case BuildTargetGroup::Standalone: return "Standalone";
    case BuildTargetGroup::Android: return "Android";
    case BuildTargetGroup::iOS: return "iOS";
    case BuildTargetGroup::UWP: return "UWP";
    }
    return "?";
}

BuildTargetGroup parse_group(std::string_view text) {
    for (auto g : kAllGroups) {
        if (token(g) == text) return g;
    }
    fail(ErrorCode::InvalidArgument, "unknown build target group '" + std::string(text) + "'");
}

std::string_view token(GraphicsApi api) noexcept {
    switch (api) {
    case GraphicsApi::OpenGLES2: return "OPENGLES2";
    case GraphicsApi::OpenGLES3: return "OPENGLES3";
    case GraphicsApi::Metal: return "METAL";
    case GraphicsApi::Direct3D11: return "D3D11";
    }
    return "?";
}

GraphicsApi parse_graphics_api(std::string_view text) {
    for (auto api : {GraphicsApi::OpenGLES2, GraphicsApi::OpenGLES3, GraphicsApi::Metal,
                     GraphicsApi::Direct3D11}) {
        if (token(api) == text) return api;
    }
    fail(ErrorCode::InvalidArgument, "unknown graphics API '" + std::string(text) + "'");
}

const SceneNode* SceneNode::child(std::string_view child_name) const noexcept {
    for (const auto& c : children) {
        if (c.name == child_name) return &c;
    }
    return nullptr;
}

SceneNode* SceneNode::child(std::string_view child_name) noexcept {
    for (auto& c : children) {
        if (c.name == child_name) return &c;
    }
    return nullptr;
}

// ---- serialization ---------------------------------------------------------

namespace {

[[noreturn]] void malformed(const std::string& what) {
    fail(ErrorCode::MalformedProject, "malformed project: " + what);
}

std::string_view role_token(NodeRole role) {
    switch (role) {
    case NodeRole::Plain: return "Plain";
    case NodeRole::Camera: return "Camera";
    case NodeRole::SdkCameraRig: return "SdkCameraRig";
    }
    return "?";
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

std::array<double, 4> numbers(const json& doc, std::size_t n, const char* what) {
    if (!doc.is_array() || doc.size() != n) malformed(std::string(what) + " must be an array of " + std::to_string(n));
    std::array<double, 4> out{};
    for (std::size_t i = 0; i < n; ++i) {
        if (!doc[i].is_number()) malformed(std::string(what) + " must contain numbers");
        out[i] = doc[i].get<double>();
        if (!std::isfinite(out[i])) malformed(std::string(what) + " must be finite");
    }
    return out;
}

const json& field(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) malformed(std::string("missing field '") + key + "'");
    return obj[key];
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const char* where) {
    for (const auto& [k, v] : obj.items()) {
        if (std::none_of(keys.begin(), keys.end(), [&](const char* want) { return k == want; })) {
            malformed(std::string("unknown field '") + k + "' in " + where);
        }
    }
}

template <typename T>
T typed(const json& obj, const char* key) {
    const auto& v = field(obj, key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) malformed(std::string("'") + key + "' must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) malformed(std::string("'") + key + "' must be a string");
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) malformed(std::string("'") + key + "' must be an integer");
    }
    return v.get<T>();
}

void check_name(const std::string& name) {
    if (name.empty() || name.find('/') != std::string::npos) {
        malformed("node name '" + name + "' must be non-empty and contain no '/'");
    }
}

}  // namespace

json to_json(const SceneNode& node) {
    json children = json::array();
    for (const auto& c : node.children) children.push_back(to_json(c));
    const auto& t = node.transform;
    json out{{"name", node.name},
             {"active", node.active},
             {"role", role_token(node.role)},
             {"transform",
              {{"position", vec_json(t.position)},
               {"rotation", json::array({t.rotation.w, t.rotation.x, t.rotation.y, t.rotation.z})},
               {"scale", vec_json(t.scale)}}},
             {"children", std::move(children)}};
    if (node.rig_sdk) out["sdk"] = token(*node.rig_sdk);
    return out;
}

SceneNode scene_node_from_json(const json& doc) {
    SceneNode node;
    node.name = typed<std::string>(doc, "name");
    check_name(node.name);
    node.active = typed<bool>(doc, "active");
    auto role = typed<std::string>(doc, "role");
    if (role == "Plain") {
        node.role = NodeRole::Plain;
    } else if (role == "Camera") {
        node.role = NodeRole::Camera;
    } else if (role == "SdkCameraRig") {
        node.role = NodeRole::SdkCameraRig;
        auto sdk = parse_sdk_id(typed<std::string>(doc, "sdk"));
        if (!sdk) malformed("rig '" + node.name + "' names an unknown SDK");
        node.rig_sdk = sdk;
    } else {
        malformed("unknown node role '" + role + "'");
    }
    if (node.role != NodeRole::SdkCameraRig && doc.contains("sdk")) {
        malformed("only SdkCameraRig nodes carry an sdk");
    }
    const auto& t = field(doc, "transform");
    auto p = numbers(field(t, "position"), 3, "position");
    auto r = numbers(field(t, "rotation"), 4, "rotation");
    auto s = numbers(field(t, "scale"), 3, "scale");
    node.transform.position = {p[0], p[1], p[2]};
    node.transform.rotation = {r[0], r[1], r[2], r[3]};
    node.transform.scale = {s[0], s[1], s[2]};
    double norm = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2] + r[3] * r[3]);
    if (std::abs(norm - 1.0) > 1e-6) malformed("rotation of '" + node.name + "' is not a unit quaternion");
    if (s[0] <= 0 || s[1] <= 0 || s[2] <= 0) malformed("scale of '" + node.name + "' must be positive");

    const auto& children = field(doc, "children");
    if (!children.is_array()) malformed("children must be an array");
    for (const auto& c : children) {
        auto child = scene_node_from_json(c);
        if (node.child(child.name)) malformed("duplicate sibling name '" + child.name + "' under '" + node.name + "'");
        node.children.push_back(std::move(child));
    }
    return node;
}

json to_json(const DefineTable& defines) {
    json out = json::object();
    for (const auto& [group, symbols] : defines) {
        if (!symbols.empty()) out[std::string(token(group))] = symbols;
    }
    return out;
}

DefineTable define_table_from_json(const json& doc) {
    if (!doc.is_object()) malformed("defines must be an object");
    DefineTable table;
    for (const auto& [key, list] : doc.items()) {
        BuildTargetGroup group;
        try {
            group = parse_group(key);
        } catch (const Error&) {
            malformed("unknown build target group '" + key + "'");
        }
        if (!list.is_array()) malformed("defines of " + key + " must be an array");
        std::set<std::string> symbols;
        for (const auto& s : list) {
            if (!s.is_string() || !is_valid_define_symbol(s.get<std::string>())) {
                malformed("ill-formed define symbol in " + key);
            }
            symbols.insert(s.get<std::string>());
        }
        if (!symbols.empty()) table[group] = std::move(symbols);
    }
    return table;
}

json to_json(const Project& project) {
    const auto& s = project.settings;
    json apis = json::array();
    for (auto api : s.graphics_apis) apis.push_back(token(api));
    json scenes = json::object();
    for (const auto& [name, root] : project.scenes) scenes[name] = to_json(root);
    json sdks = json::object();
    for (const auto& [sdk, rec] : project.installed_sdks) {
        auto entry = rec.files.to_json();
        entry["version"] = rec.version.str();
        sdks[std::string(token(sdk))] = std::move(entry);
    }
    return {{"format", 1},
            {"assetRoot", project.asset_root},
            {"settings",
             {{"activeTarget", token(s.active_target)},
              {"graphicsApis", std::move(apis)},
              {"minAndroidApiLevel", s.min_android_api_level},
              {"arSupported", s.ar_supported},
              {"packages", s.packages},
              {"defines", to_json(s.defines)}}},
            {"scenes", std::move(scenes)},
            {"installedSdks", std::move(sdks)}};
}

Project project_from_json(const json& doc) {
    try {
        if (!doc.is_object()) malformed("top level must be an object");
        if (typed<int>(doc, "format") != 1) malformed("unsupported format version");
        only_keys(doc, {"format", "assetRoot", "settings", "scenes", "installedSdks"}, "project");
        Project p;
        p.asset_root = typed<std::string>(doc, "assetRoot");

        const auto& s = field(doc, "settings");
        only_keys(s, {"activeTarget", "graphicsApis", "minAndroidApiLevel", "arSupported", "packages", "defines"},
                  "settings");
        try {
            p.settings.active_target = parse_group(typed<std::string>(s, "activeTarget"));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::MalformedProject) throw;
            malformed(e.what());
        }
        const auto& apis = field(s, "graphicsApis");
        if (!apis.is_array() || apis.empty()) malformed("graphicsApis must be a non-empty array");
        p.settings.graphics_apis.clear();
        for (const auto& a : apis) {
            if (!a.is_string()) malformed("graphicsApis must hold strings");
            GraphicsApi api;
            try {
                api = parse_graphics_api(a.get<std::string>());
            } catch (const Error& e) {
                malformed(e.what());
            }
            if (std::find(p.settings.graphics_apis.begin(), p.settings.graphics_apis.end(), api) !=
                p.settings.graphics_apis.end()) {
                malformed("duplicate graphics API");
            }
            p.settings.graphics_apis.push_back(api);
        }
        p.settings.min_android_api_level = typed<int>(s, "minAndroidApiLevel");
        if (p.settings.min_android_api_level < 0) malformed("minAndroidApiLevel must be >= 0");
        p.settings.ar_supported = typed<bool>(s, "arSupported");
        const auto& packages = field(s, "packages");
        if (!packages.is_array()) malformed("packages must be an array");
        for (const auto& pkg : packages) {
            if (!pkg.is_string() || pkg.get<std::string>().empty()) malformed("package names must be non-empty strings");
            p.settings.packages.insert(pkg.get<std::string>());
        }
        p.settings.defines = define_table_from_json(field(s, "defines"));

        const auto& scenes = field(doc, "scenes");
        if (!scenes.is_object()) malformed("scenes must be an object");
        for (const auto& [name, root] : scenes.items()) {
            if (name.empty()) malformed("scene names must be non-empty");
            p.scenes.emplace(name, scene_node_from_json(root));
        }

        const auto& sdks = field(doc, "installedSdks");
        if (!sdks.is_object()) malformed("installedSdks must be an object");
        for (const auto& [key, rec] : sdks.items()) {
            auto sdk = parse_sdk_id(key);
            if (!sdk) malformed("unknown installed SDK '" + key + "'");
            InstalledSdk installed;
            try {
                installed.version = SdkVersion::parse(typed<std::string>(rec, "version"));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::MalformedProject) throw;
                malformed(e.what());
            }
            installed.files = ExtractionReport::from_json(rec);
            p.installed_sdks.emplace(*sdk, std::move(installed));
        }
        return p;
    } catch (const json::exception& e) {
        malformed(e.what());
    }
}

std::string canonical_text(const Project& project) { return to_json(project).dump(2) + "\n"; }

std::string snapshot_hash(const Project& project) { return sha256_hex(canonical_text(project)); }

Project parse_project(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        malformed(e.what());
    }
    return project_from_json(doc);
}

Project load_project(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot read project file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_project(ss.str());
}

void save_project(const Project& project, const fs::path& path) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        auto text = canonical_text(project);
        out.write(text.data(), static_cast<std::streamsize>(text.size()));
        if (!out) fail(ErrorCode::IoFailure, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot replace " + path.string() + ": " + ec.message());
}

// ---- settings --------------------------------------------------------------

bool is_valid_define_symbol(std::string_view symbol) noexcept {
    if (symbol.empty() || symbol.front() < 'A' || symbol.front() > 'Z') return false;
    return std::all_of(symbol.begin(), symbol.end(), [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
    });
}

namespace {
void require_symbol(std::string_view symbol) {
    if (!is_valid_define_symbol(symbol)) {
        fail(ErrorCode::BadSymbol, "define symbol '" + std::string(symbol) + "' must match [A-Z][A-Z0-9_]*");
    }
}
}  // namespace

void add_define(Project& project, std::string_view symbol, BuildTargetGroup group) {
    require_symbol(symbol);
    if (project.settings.defines[group].insert(std::string(symbol)).second) ++project.revision;
}

void remove_define(Project& project, std::string_view symbol, BuildTargetGroup group) {
    require_symbol(symbol);
    auto it = project.settings.defines.find(group);
    if (it == project.settings.defines.end()) return;
    if (it->second.erase(std::string(symbol)) > 0) ++project.revision;
    if (it->second.empty()) project.settings.defines.erase(it);
}

bool has_define(const Project& project, std::string_view symbol, BuildTargetGroup group) {
    auto it = project.settings.defines.find(group);
    return it != project.settings.defines.end() && it->second.count(std::string(symbol)) > 0;
}

void set_active_target(Project& project, BuildTargetGroup group) {
    project.settings.active_target = group;
    ++project.revision;
}

void add_package(Project& project, std::string_view name) {
    if (project.settings.packages.insert(std::string(name)).second) ++project.revision;
}

void remove_package(Project& project, std::string_view name) {
    if (project.settings.packages.erase(std::string(name)) > 0) ++project.revision;
}

// ---- scene graph -----------------------------------------------------------

namespace {

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto slash = path.find('/', start);
        out.push_back(path.substr(start, slash == std::string_view::npos ? path.npos : slash - start));
        if (slash == std::string_view::npos) break;
        start = slash + 1;
    }
    return out;
}

template <typename P, typename N>
N* locate(P& project, std::string_view scene, std::string_view node_path) {
    auto it = project.scenes.find(std::string(scene));
    if (it == project.scenes.end()) fail(ErrorCode::NoSuchScene, "no scene named '" + std::string(scene) + "'");
    auto parts = split_path(node_path);
    N* node = &it->second;
    if (parts.front() != node->name) {
        fail(ErrorCode::NoSuchNode, "no node '" + std::string(node_path) + "' in scene '" + std::string(scene) + "'");
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        node = node->child(parts[i]);
        if (!node) {
            fail(ErrorCode::NoSuchNode,
                 "no node '" + std::string(node_path) + "' in scene '" + std::string(scene) + "'");
        }
    }
    return node;
}

}  // namespace

const SceneNode& find_node(const Project& project, std::string_view scene, std::string_view node_path) {
    return *locate<const Project, const SceneNode>(project, scene, node_path);
}

SceneNode& find_node(Project& project, std::string_view scene, std::string_view node_path) {
    return *locate<Project, SceneNode>(project, scene, node_path);
}

bool node_exists(const Project& project, std::string_view scene, std::string_view node_path) {
    try {
        find_node(project, scene, node_path);
        return true;
    } catch (const Error&) {
        return false;
    }
}

std::string parent_path(std::string_view node_path) {
    auto slash = node_path.rfind('/');
    return slash == std::string_view::npos ? std::string() : std::string(node_path.substr(0, slash));
}

std::string unique_child_name(const SceneNode& parent, std::string_view base) {
    std::string name(base);
    for (int n = 1; parent.child(name); ++n) name = std::string(base) + " (" + std::to_string(n) + ")";
    return name;
}

std::string insert_node(Project& project, std::string_view scene, std::string_view parent,
                        SceneNode node, std::optional<std::size_t> index) {
    if (node.name.empty() || node.name.find('/') != std::string::npos) {
        fail(ErrorCode::InvalidArgument, "invalid node name '" + node.name + "'");
    }
    auto& p = find_node(project, scene, parent);
    node.name = unique_child_name(p, node.name);
    auto path = std::string(parent) + "/" + node.name;
    auto at = std::min(index.value_or(p.children.size()), p.children.size());
    p.children.insert(p.children.begin() + static_cast<std::ptrdiff_t>(at), std::move(node));
    ++project.revision;
    return path;
}

RemovedNode remove_node(Project& project, std::string_view scene, std::string_view node_path) {
    auto parent = parent_path(node_path);
    if (parent.empty()) fail(ErrorCode::InvalidArgument, "cannot remove a scene root");
    auto& p = find_node(project, scene, parent);
    auto name = node_path.substr(node_path.rfind('/') + 1);
    auto it = std::find_if(p.children.begin(), p.children.end(), [&](const SceneNode& c) { return c.name == name; });
    if (it == p.children.end()) fail(ErrorCode::NoSuchNode, "no node '" + std::string(node_path) + "'");
    RemovedNode removed{std::move(*it), parent, static_cast<std::size_t>(it - p.children.begin())};
    p.children.erase(it);
    ++project.revision;
    return removed;
}

Project make_sample_project() {
    Project p;
    p.settings.active_target = BuildTargetGroup::Standalone;
    p.settings.graphics_apis = {GraphicsApi::Direct3D11};
    p.settings.min_android_api_level = 19;
    p.settings.ar_supported = false;
    p.settings.packages = {"TextMeshPro"};

    SceneNode camera;
    camera.name = "Camera";
    camera.role = NodeRole::Camera;
    camera.transform.position = {0, 1, -10};

    SceneNode exhibit;
    exhibit.name = "Exhibit";
    exhibit.transform.position = {0, 0, 2};
    exhibit.transform.scale = {2, 2, 2};

    SceneNode root;
    root.name = "Main";
    root.children = {camera, exhibit};
    p.scenes.emplace("SampleScene", std::move(root));
    return p;
}

}  // namespace xrt
