#include "xrt/mutation.hpp"

#include "xrt/error.hpp"

#include <algorithm>

#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace xrt {

namespace m = mutation;

std::string_view kind(const Mutation& mut) noexcept {
    static constexpr std::string_view kNames[] = {
        "SetTarget",    "SetGraphicsApis", "AddPackage", "RemovePackage", "SetMinApi",   "SetArSupported",
        "SwapDefines",  "SetDefines",      "ReplaceCamera", "RestoreCamera", "InsertNode", "RemoveNode",
        "RegisterSdk",  "UnregisterSdk",   "PlaceFiles", "RemoveFiles"};
    static_assert(std::size(kNames) == std::variant_size_v<Mutation>);
    return kNames[mut.index()];
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json groups_json(const std::set<BuildTargetGroup>& groups) {
    json out = json::array();
    for (auto g : groups) out.push_back(token(g));
    return out;
}

json installed_json(const InstalledSdk& rec) {
    auto out = rec.files.to_json();
    out["version"] = rec.version.str();
    return out;
}

InstalledSdk installed_from_json(const json& doc) {
    return {SdkVersion::parse(doc.at("version").get<std::string>()), ExtractionReport::from_json(doc)};
}

bool default_can_remove(const fs::path& p) {
    std::error_code ec;
    if (!fs::exists(fs::symlink_status(p, ec))) return true;
    auto dir = p.parent_path();
    return ::access(dir.c_str(), W_OK) == 0;
}

void normalize(DefineTable& table) {
    for (auto it = table.begin(); it != table.end();) {
        it = it->second.empty() ? table.erase(it) : std::next(it);
    }
}

}  // namespace

json to_json(const Mutation& mut) {
    json out = std::visit(
        overloaded{
            [](const m::SetTarget& x) { return json{{"target", token(x.target)}}; },
            [](const m::SetGraphicsApis& x) {
                json apis = json::array();
                for (auto a : x.apis) apis.push_back(token(a));
                return json{{"apis", apis}};
            },
            [](const m::AddPackage& x) { return json{{"name", x.name}}; },
            [](const m::RemovePackage& x) { return json{{"name", x.name}}; },
            [](const m::SetMinApi& x) { return json{{"level", x.level}}; },
            [](const m::SetArSupported& x) { return json{{"enabled", x.enabled}}; },
            [](const m::SwapDefines& x) {
                return json{{"symbol", x.symbol}, {"groups", groups_json(x.groups)}, {"exclusive", x.exclusive}};
            },
            [](const m::SetDefines& x) { return json{{"defines", to_json(x.defines)}}; },
            [](const m::ReplaceCamera& x) {
                return json{{"scene", x.scene}, {"camera", x.camera_path}, {"rig", to_json(x.rig)}};
            },
            [](const m::RestoreCamera& x) {
                return json{{"scene", x.scene}, {"camera", x.camera_path}, {"wasActive", x.was_active},
                            {"rig", x.rig_path}};
            },
            [](const m::InsertNode& x) {
                json j{{"scene", x.scene}, {"parent", x.parent_path}, {"node", to_json(x.node)}};
                j["index"] = x.index ? json(*x.index) : json(nullptr);
                return j;
            },
            [](const m::RemoveNode& x) { return json{{"scene", x.scene}, {"path", x.path}}; },
            [](const m::RegisterSdk& x) { return json{{"sdk", token(x.sdk)}, {"record", installed_json(x.record)}}; },
            [](const m::UnregisterSdk& x) { return json{{"sdk", token(x.sdk)}}; },
            [](const m::PlaceFiles& x) { return json{{"report", x.report.to_json()}}; },
            [](const m::RemoveFiles& x) { return json{{"report", x.report.to_json()}}; },
        },
        mut);
    out["op"] = kind(mut);
    return out;
}

Mutation mutation_from_json(const json& doc) {
    try {
        auto op = doc.at("op").get<std::string>();
        auto groups = [&](const json& arr) {
            std::set<BuildTargetGroup> out;
            for (const auto& g : arr) out.insert(parse_group(g.get<std::string>()));
            return out;
        };
        if (op == "SetTarget") return m::SetTarget{parse_group(doc.at("target").get<std::string>())};
        if (op == "SetGraphicsApis") {
            m::SetGraphicsApis x;
            for (const auto& a : doc.at("apis")) x.apis.push_back(parse_graphics_api(a.get<std::string>()));
            return x;
        }
        if (op == "AddPackage") return m::AddPackage{doc.at("name").get<std::string>()};
        if (op == "RemovePackage") return m::RemovePackage{doc.at("name").get<std::string>()};
        if (op == "SetMinApi") return m::SetMinApi{doc.at("level").get<int>()};
        if (op == "SetArSupported") return m::SetArSupported{doc.at("enabled").get<bool>()};
        if (op == "SwapDefines") {
            return m::SwapDefines{doc.at("symbol").get<std::string>(), groups(doc.at("groups")),
                                  doc.at("exclusive").get<std::set<std::string>>()};
        }
        if (op == "SetDefines") return m::SetDefines{define_table_from_json(doc.at("defines"))};
        if (op == "ReplaceCamera") {
            return m::ReplaceCamera{doc.at("scene").get<std::string>(), doc.at("camera").get<std::string>(),
                                    scene_node_from_json(doc.at("rig"))};
        }
        if (op == "RestoreCamera") {
            return m::RestoreCamera{doc.at("scene").get<std::string>(), doc.at("camera").get<std::string>(),
                                    doc.at("wasActive").get<bool>(), doc.at("rig").get<std::string>()};
        }
        if (op == "InsertNode") {
            m::InsertNode x{doc.at("scene").get<std::string>(), doc.at("parent").get<std::string>(), std::nullopt,
                            scene_node_from_json(doc.at("node"))};
            if (!doc.at("index").is_null()) x.index = doc.at("index").get<std::size_t>();
            return x;
        }
        if (op == "RemoveNode") return m::RemoveNode{doc.at("scene").get<std::string>(), doc.at("path").get<std::string>()};
        if (op == "RegisterSdk") {
            return m::RegisterSdk{sdk_from_token(doc.at("sdk").get<std::string>()), installed_from_json(doc.at("record"))};
        }
        if (op == "UnregisterSdk") return m::UnregisterSdk{sdk_from_token(doc.at("sdk").get<std::string>())};
        if (op == "PlaceFiles") return m::PlaceFiles{ExtractionReport::from_json(doc.at("report"))};
        if (op == "RemoveFiles") return m::RemoveFiles{ExtractionReport::from_json(doc.at("report"))};
        fail(ErrorCode::MalformedInput, "unknown journal op '" + op + "'");
    } catch (const json::exception& e) {
        fail(ErrorCode::MalformedInput, std::string("malformed journal entry: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedInput) throw;
        fail(ErrorCode::MalformedInput, std::string("malformed journal entry: ") + e.what());
    }
}

std::optional<std::string> first_unremovable(const Mutation& mut, const ApplyContext& ctx) {
    const auto* rf = std::get_if<m::RemoveFiles>(&mut);
    if (!rf) return std::nullopt;
    const auto& check = ctx.can_remove ? ctx.can_remove : default_can_remove;
    for (const auto& rel : rf->report.created_files) {
        if (!check(ctx.project_root / rel)) return rel;
    }
    return std::nullopt;
}

Mutation apply_mutation(Project& project, const Mutation& mut, const ApplyContext& ctx) {
    auto& s = project.settings;
    Mutation inverse = std::visit(
        overloaded{
            [&](const m::SetTarget& x) -> Mutation {
                auto old = s.active_target;
                s.active_target = x.target;
                return m::SetTarget{old};
            },
            [&](const m::SetGraphicsApis& x) -> Mutation {
                if (x.apis.empty()) fail(ErrorCode::InvalidArgument, "graphics API list must not be empty");
                auto old = s.graphics_apis;
                s.graphics_apis = x.apis;
                return m::SetGraphicsApis{std::move(old)};
            },
            [&](const m::AddPackage& x) -> Mutation {
                if (x.name.empty()) fail(ErrorCode::InvalidArgument, "empty package name");
                if (s.packages.insert(x.name).second) return m::RemovePackage{x.name};
                return m::AddPackage{x.name};
            },
            [&](const m::RemovePackage& x) -> Mutation {
                if (s.packages.erase(x.name) > 0) return m::AddPackage{x.name};
                return m::RemovePackage{x.name};
            },
            [&](const m::SetMinApi& x) -> Mutation {
                if (x.level < 0) fail(ErrorCode::InvalidArgument, "negative API level");
                auto old = s.min_android_api_level;
                s.min_android_api_level = x.level;
                return m::SetMinApi{old};
            },
            [&](const m::SetArSupported& x) -> Mutation {
                auto old = s.ar_supported;
                s.ar_supported = x.enabled;
                return m::SetArSupported{old};
            },
            [&](const m::SwapDefines& x) -> Mutation {
                if (!is_valid_define_symbol(x.symbol)) fail(ErrorCode::BadSymbol, "bad define symbol '" + x.symbol + "'");
                auto old = s.defines;
                auto next = s.defines;
                for (auto& [group, symbols] : next) {
                    for (const auto& sym : x.exclusive) symbols.erase(sym);
                }
                for (auto g : x.groups) next[g].insert(x.symbol);
                normalize(next);
                s.defines = std::move(next);
                return m::SetDefines{std::move(old)};
            },
            [&](const m::SetDefines& x) -> Mutation {
                for (const auto& [g, symbols] : x.defines) {
                    for (const auto& sym : symbols) {
                        if (!is_valid_define_symbol(sym)) fail(ErrorCode::BadSymbol, "bad define symbol '" + sym + "'");
                    }
                }
                auto old = s.defines;
                s.defines = x.defines;
                normalize(s.defines);
                return m::SetDefines{std::move(old)};
            },
            [&](const m::ReplaceCamera& x) -> Mutation {
                const auto& camera = find_node(project, x.scene, x.camera_path);
                auto parent = parent_path(x.camera_path);
                if (parent.empty()) {
                    fail(ErrorCode::InvalidArgument,
                         "camera '" + x.camera_path + "' is a scene root; it needs a parent to receive the rig");
                }
                const auto& holder = find_node(project, x.scene, parent);
                std::size_t index = 0;
                while (&holder.children[index] != &camera) ++index;
                bool was_active = camera.active;
                SceneNode rig = x.rig;
                rig.transform = camera.transform;
                auto rig_path = insert_node(project, x.scene, parent, std::move(rig), index + 1);
                find_node(project, x.scene, x.camera_path).active = false;
                return m::RestoreCamera{x.scene, x.camera_path, was_active, rig_path};
            },
            [&](const m::RestoreCamera& x) -> Mutation {
                find_node(project, x.scene, x.camera_path);
                find_node(project, x.scene, x.rig_path);
                auto removed = remove_node(project, x.scene, x.rig_path);
                find_node(project, x.scene, x.camera_path).active = x.was_active;
                return m::ReplaceCamera{x.scene, x.camera_path, std::move(removed.node)};
            },
            [&](const m::InsertNode& x) -> Mutation {
                auto path = insert_node(project, x.scene, x.parent_path, x.node, x.index);
                return m::RemoveNode{x.scene, path};
            },
            [&](const m::RemoveNode& x) -> Mutation {
                auto removed = remove_node(project, x.scene, x.path);
                return m::InsertNode{x.scene, removed.parent_path, removed.index, std::move(removed.node)};
            },
            [&](const m::RegisterSdk& x) -> Mutation {
                auto it = project.installed_sdks.find(x.sdk);
                if (it != project.installed_sdks.end()) {
                    auto old = it->second;
                    it->second = x.record;
                    return m::RegisterSdk{x.sdk, std::move(old)};
                }
                project.installed_sdks.emplace(x.sdk, x.record);
                return m::UnregisterSdk{x.sdk};
            },
            [&](const m::UnregisterSdk& x) -> Mutation {
                auto it = project.installed_sdks.find(x.sdk);
                if (it == project.installed_sdks.end()) {
                    fail(ErrorCode::NotInstalled, std::string(display_name(x.sdk)) + " is not installed");
                }
                auto old = std::move(it->second);
                project.installed_sdks.erase(it);
                return m::RegisterSdk{x.sdk, std::move(old)};
            },
            [&](const m::PlaceFiles& x) -> Mutation {
                if (ctx.disk_effects) {
                    for (const auto& rel : x.report.created_files) {
                        if (!fs::exists(ctx.project_root / rel)) {
                            fail(ErrorCode::IoFailure, "expected extracted file " + rel + " is missing");
                        }
                    }
                }
                return m::RemoveFiles{x.report};
            },
            [&](const m::RemoveFiles& x) -> Mutation {
                if (ctx.disk_effects) {
                    if (auto locked = first_unremovable(x, ctx)) {
                        fail(ErrorCode::RollbackFailure, "cannot remove " + *locked + " (file in use or read-only)");
                    }
                    remove_extracted(ctx.project_root, x.report);
                }
                return m::PlaceFiles{x.report};
            },
        },
        mut);
    ++project.revision;
    return inverse;
}

}  // namespace xrt
