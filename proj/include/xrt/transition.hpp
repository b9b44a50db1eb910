#pragma once

#include "xrt/fetch.hpp"
#include "xrt/journal.hpp"
#include "xrt/profiles.hpp"
#include "xrt/workspace.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace xrt {

/// Removes every other reality define from all groups and adds the incoming
/// SDK's symbol to its profile's groups. Idempotent.
void swap_defines(Project& project, SdkId incoming);
mutation::SwapDefines swap_defines_mutation(SdkId incoming);

/// True when the reality defines are exactly `incoming`'s symbol on its groups.
bool defines_exclusive(const Project& project, SdkId incoming);

struct PlanStep {
    Mutation forward;
    Mutation inverse;
};

struct TransitionPlan {
    Reality reality{};
    std::string scene;
    std::string camera_path;
    /// project.revision the plan was computed against.
    std::uint64_t revision = 0;
    std::vector<PlanStep> steps;
};

/// Pure: never touches `project`. Throws SdkMissing (with the download
/// command in the message), NoSuchScene, NoSuchNode, InvalidArgument.
TransitionPlan plan_transition(const Project& project, Reality reality, std::string_view scene,
                               std::string_view camera_path);

struct TransitionHooks {
    /// Called before each step; throwing from it aborts the transition.
    std::function<void(std::size_t index, const Mutation& step)> before_step;
};

/// Applies the plan as one journaled transaction. Any failure rolls the
/// project back to its pre-call state and rethrows. Throws StaleRevision
/// when the project changed since planning.
std::uint64_t apply_transition(Workspace& ws, const TransitionPlan& plan, const TransitionHooks& hooks = {});

/// Unmet requirements of `reality`, one human-readable line each.
std::vector<std::string> validate(const Project& project, Reality reality);

/// Adds the installed SDK's camera rig under the scene's root node at the
/// origin. Throws NoSdkInstalled, AmbiguousSdk, NoSuchScene. Returns the
/// new node's path.
std::string spawn_reality_camera(Workspace& ws, std::string_view scene);

struct InstallOptions {
    FetchOptions fetch;
    std::filesystem::path staging_dir;
    std::function<void(const Progress&)> on_progress;
    /// Polled while downloading; returning true cancels the transfer.
    std::function<bool()> should_cancel;
    std::chrono::milliseconds poll_interval{50};
};

/// Downloads and verifies one artifact, honouring on_progress and
/// should_cancel. Returns the staged path.
std::filesystem::path download_artifact(const ArtifactDescriptor& desc, const InstallOptions& options);

/// Extracts an already verified staged artifact and records the install as
/// one transaction: files, installed-SDK record, define swap.
std::uint64_t install_staged(Workspace& ws, const ArtifactDescriptor& desc, const std::filesystem::path& staged);

/// Resolves, downloads, installs, then deletes the staged artifact.
/// Throws AlreadyInstalled before any network traffic when the SDK is present.
std::uint64_t install_sdk(Workspace& ws, SdkId sdk, std::string_view version_spec, const Registry& registry,
                          const InstallOptions& options);

/// Reverts the SDK's install and every later transaction acting for it,
/// keeps later transactions of other SDKs by replaying them, and deletes
/// the SDK's files. Throws NotInstalled or RollbackFailure, in which case
/// nothing has changed.
void uninstall_sdk(Workspace& ws, SdkId sdk);

}  // namespace xrt
