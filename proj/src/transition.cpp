#include "xrt/transition.hpp"

#include "xrt/error.hpp"

#include <algorithm>

namespace fs = std::filesystem;

namespace xrt {

namespace m = mutation;

mutation::SwapDefines swap_defines_mutation(SdkId incoming) {
    const auto& profile = profile_for(reality_for(incoming));
    return m::SwapDefines{profile.define_symbol, profile.define_groups, reality_define_symbols()};
}

void swap_defines(Project& project, SdkId incoming) {
    ApplyContext ctx;
    ctx.disk_effects = false;
    apply_mutation(project, swap_defines_mutation(incoming), ctx);
}

bool defines_exclusive(const Project& project, SdkId incoming) {
    const auto& profile = profile_for(reality_for(incoming));
    for (auto g : kAllGroups) {
        std::set<std::string> present;
        if (auto it = project.settings.defines.find(g); it != project.settings.defines.end()) {
            for (const auto& sym : it->second) {
                if (reality_define_symbols().contains(sym)) present.insert(sym);
            }
        }
        std::set<std::string> wanted;
        if (profile.define_groups.contains(g)) wanted.insert(profile.define_symbol);
        if (present != wanted) return false;
    }
    return true;
}

namespace {

bool apis_acceptable(const std::vector<GraphicsApi>& current, const RealityProfile& profile) {
    if (current.empty()) return false;
    return std::all_of(current.begin(), current.end(), [&](GraphicsApi api) {
        return std::find(profile.allowed_graphics_apis.begin(), profile.allowed_graphics_apis.end(), api) !=
               profile.allowed_graphics_apis.end();
    });
}

std::string missing_sdk_message(SdkId sdk) {
    return std::string(display_name(sdk)) + " is not installed; download it first with: xrt sdk download " +
           std::string(token(sdk)) + " --install";
}

std::string join_apis(const std::vector<GraphicsApi>& apis) {
    std::string out;
    for (auto api : apis) {
        if (!out.empty()) out += ",";
        out += token(api);
    }
    return out.empty() ? "(none)" : out;
}

bool has_active_rig(const Project& project, SdkId sdk) {
    bool found = false;
    for_each_node(project, [&](const std::string&, const SceneNode& node) {
        if (node.role == NodeRole::SdkCameraRig && node.rig_sdk == sdk && node.active) found = true;
    });
    return found;
}

}  // namespace

TransitionPlan plan_transition(const Project& project, Reality reality, std::string_view scene,
                               std::string_view camera_path) {
    const auto& profile = profile_for(reality);
    if (!project.installed_sdks.contains(profile.sdk)) fail(ErrorCode::SdkMissing, missing_sdk_message(profile.sdk));
    find_node(project, scene, camera_path);
    if (parent_path(camera_path).empty()) {
        fail(ErrorCode::InvalidArgument, "camera '" + std::string(camera_path) +
                                             "' is a scene root; pick a camera that has a parent node");
    }

    TransitionPlan plan;
    plan.reality = reality;
    plan.scene = scene;
    plan.camera_path = camera_path;
    plan.revision = project.revision;

    std::vector<Mutation> steps;
    steps.push_back(m::SetTarget{profile.target});
    const auto& current = project.settings.graphics_apis;
    steps.push_back(m::SetGraphicsApis{apis_acceptable(current, profile) ? current : profile.preferred_graphics_apis});
    for (const auto& pkg : profile.required_packages) steps.push_back(m::AddPackage{pkg});
    if (profile.min_android_api_level) steps.push_back(m::SetMinApi{*profile.min_android_api_level});
    if (profile.ar_supported) steps.push_back(m::SetArSupported{*profile.ar_supported});
    if (!defines_exclusive(project, profile.sdk)) steps.push_back(swap_defines_mutation(profile.sdk));
    steps.push_back(m::ReplaceCamera{plan.scene, plan.camera_path, profile.camera_template});

    // Inverses come from a scratch copy so planning stays side-effect free.
    Project scratch = project;
    ApplyContext ctx;
    ctx.disk_effects = false;
    for (auto& step : steps) {
        auto inverse = apply_mutation(scratch, step, ctx);
        plan.steps.push_back({std::move(step), std::move(inverse)});
    }
    return plan;
}

std::uint64_t apply_transition(Workspace& ws, const TransitionPlan& plan, const TransitionHooks& hooks) {
    auto& project = ws.project();
    auto& journal = ws.journal();
    if (plan.revision != project.revision) {
        fail(ErrorCode::StaleRevision, "project changed since the transition was planned; plan again");
    }
    const auto& profile = profile_for(plan.reality);
    auto ctx = ws.context();
    journal.begin(project, "switch " + std::string(token(plan.reality)), TxKind::Transition, profile.sdk);
    try {
        for (std::size_t i = 0; i < plan.steps.size(); ++i) {
            if (hooks.before_step) hooks.before_step(i, plan.steps[i].forward);
            journal.apply(project, plan.steps[i].forward, ctx);
        }
        auto violations = validate(project, plan.reality);
        if (!violations.empty()) {
            fail(ErrorCode::InvalidArgument, "transition left the project invalid: " + violations.front());
        }
    } catch (...) {
        journal.rollback(project, ctx);
        throw;
    }
    return journal.commit(project).id;
}

std::vector<std::string> validate(const Project& project, Reality reality) {
    const auto& profile = profile_for(reality);
    const auto& s = project.settings;
    std::vector<std::string> out;
    if (!project.installed_sdks.contains(profile.sdk)) {
        out.push_back("sdk: " + std::string(token(profile.sdk)) + " is not installed");
    }
    if (s.active_target != profile.target) {
        out.push_back("activeTarget: expected " + std::string(token(profile.target)) + ", found " +
                      std::string(token(s.active_target)));
    }
    if (!apis_acceptable(s.graphics_apis, profile)) {
        out.push_back("graphicsApis: expected a non-empty subset of " + join_apis(profile.allowed_graphics_apis) +
                      ", found " + join_apis(s.graphics_apis));
    }
    for (const auto& pkg : profile.required_packages) {
        if (!s.packages.contains(pkg)) out.push_back("packages: missing \"" + pkg + "\"");
    }
    if (profile.min_android_api_level && s.min_android_api_level != *profile.min_android_api_level) {
        out.push_back("minAndroidApiLevel: expected " + std::to_string(*profile.min_android_api_level) + ", found " +
                      std::to_string(s.min_android_api_level));
    }
    if (profile.ar_supported && s.ar_supported != *profile.ar_supported) {
        out.push_back(std::string("arSupported: expected ") + (*profile.ar_supported ? "true" : "false"));
    }
    if (!defines_exclusive(project, profile.sdk)) {
        std::string groups;
        for (auto g : profile.define_groups) groups += (groups.empty() ? "" : ",") + std::string(token(g));
        out.push_back("defines: expected " + profile.define_symbol + " on " + groups +
                      " and no other reality define in any group");
    }
    if (!has_active_rig(project, profile.sdk)) {
        out.push_back("camera: no active " + std::string(token(profile.sdk)) + " camera rig in any scene");
    }
    return out;
}

std::string spawn_reality_camera(Workspace& ws, std::string_view scene) {
    auto& project = ws.project();
    if (project.installed_sdks.empty()) fail(ErrorCode::NoSdkInstalled, "no SDK is installed");
    if (project.installed_sdks.size() > 1) {
        std::string names;
        for (const auto& [sdk, rec] : project.installed_sdks) names += (names.empty() ? "" : ", ") + std::string(token(sdk));
        fail(ErrorCode::AmbiguousSdk, "more than one SDK is installed (" + names + "); cannot pick a camera");
    }
    auto it = project.scenes.find(std::string(scene));
    if (it == project.scenes.end()) fail(ErrorCode::NoSuchScene, "no scene named '" + std::string(scene) + "'");
    SdkId sdk = project.installed_sdks.begin()->first;
    SceneNode rig = profile_for(reality_for(sdk)).camera_template;
    rig.transform = Transform{};
    rig.active = true;

    auto& journal = ws.journal();
    auto ctx = ws.context();
    journal.begin(project, "spawn-camera " + std::string(token(sdk)), TxKind::SpawnCamera, sdk);
    try {
        journal.apply(project, m::InsertNode{std::string(scene), it->second.name, std::nullopt, std::move(rig)}, ctx);
    } catch (...) {
        journal.rollback(project, ctx);
        throw;
    }
    const auto& tx = journal.commit(project);
    return std::get<m::RemoveNode>(tx.entries.back().inverse).path;
}

fs::path download_artifact(const ArtifactDescriptor& desc, const InstallOptions& options) {
    auto ticket = start_download(desc, options.staging_dir, options.fetch);
    for (;;) {
        auto state = ticket.wait_for(options.poll_interval);
        if (options.on_progress) options.on_progress(ticket.progress());
        if (state != TicketState::Pending && state != TicketState::Running) break;
        if (options.should_cancel && options.should_cancel()) {
            try {
                ticket.cancel();
            } catch (const Error& e) {
                if (e.code() != ErrorCode::AlreadyTerminal) throw;
            }
            break;
        }
    }
    if (ticket.state() == TicketState::Done && options.should_cancel && options.should_cancel()) {
        // Cancelled in the window between completion and the last poll.
        std::error_code ec;
        fs::remove(ticket.staged_path(), ec);
        fail(ErrorCode::Cancelled, "download cancelled");
    }
    return finish(ticket, desc);
}

std::uint64_t install_staged(Workspace& ws, const ArtifactDescriptor& desc, const fs::path& staged) {
    auto& project = ws.project();
    if (auto it = project.installed_sdks.find(desc.sdk); it != project.installed_sdks.end()) {
        fail(ErrorCode::AlreadyInstalled, std::string(display_name(desc.sdk)) + " " + it->second.version.str() +
                                              " is already installed; uninstall it first");
    }
    auto& journal = ws.journal();
    if (journal.in_transaction()) fail(ErrorCode::NestedTransaction, "a transaction is already open");
    auto report = extract_archive(staged, ws.root());
    auto ctx = ws.context();
    journal.begin(project, "install " + std::string(token(desc.sdk)) + " " + desc.version.str(), TxKind::Install,
                  desc.sdk);
    try {
        journal.apply(project, m::PlaceFiles{report}, ctx);
        journal.apply(project, m::RegisterSdk{desc.sdk, InstalledSdk{desc.version, report}}, ctx);
        journal.apply(project, swap_defines_mutation(desc.sdk), ctx);
    } catch (...) {
        journal.rollback(project, ctx);
        throw;
    }
    return journal.commit(project).id;
}

std::uint64_t install_sdk(Workspace& ws, SdkId sdk, std::string_view version_spec, const Registry& registry,
                          const InstallOptions& options) {
    const auto& desc = registry.resolve(sdk, version_spec);
    if (auto it = ws.project().installed_sdks.find(sdk); it != ws.project().installed_sdks.end()) {
        fail(ErrorCode::AlreadyInstalled, std::string(display_name(sdk)) + " " + it->second.version.str() +
                                              " is already installed; uninstall it first");
    }
    auto staged = download_artifact(desc, options);
    struct StagedCleanup {
        fs::path path;
        ~StagedCleanup() {
            std::error_code ec;
            fs::remove(path, ec);
        }
    } cleanup{staged};
    return install_staged(ws, desc, staged);
}

}  // namespace xrt
