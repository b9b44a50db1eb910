#include "support.hpp"

#include "xrt/error.hpp"
#include "xrt/transition.hpp"

#include <gtest/gtest.h>

using namespace xrt;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

struct Fixture {
    test::FixtureServer fx;
    test::TempDir root;
    test::TempDir staging;
    Workspace ws = Workspace::create(root.path(), make_sample_project());

    void install(SdkId sdk, std::string_view version = "latest") {
        InstallOptions opts;
        opts.staging_dir = staging.path();
        install_sdk(ws, sdk, version, fx.registry, opts);
        ws.save();
    }
    void switch_to(Reality r) {
        apply_transition(ws, plan_transition(ws.project(), r, "SampleScene", "Main/Camera"));
        ws.save();
    }
    void uninstall(SdkId sdk) {
        uninstall_sdk(ws, sdk);
        ws.save();
    }
    /// Project tree without the journal, which legitimately keeps history.
    std::map<std::string, std::string> snapshot() const {
        auto t = test::tree(root.path());
        t.erase("journal.log");
        t.erase(".xrt.lock");
        return t;
    }
};

}  // namespace

TEST(Uninstall, InstallThenUninstallIsByteIdentical) {
    for (auto sdk : kAllSdks) {
        Fixture f;
        auto before = f.snapshot();
        f.install(sdk);
        EXPECT_NE(f.snapshot(), before);
        f.uninstall(sdk);
        EXPECT_EQ(f.snapshot(), before) << token(sdk);
        EXPECT_FALSE(fs::exists(f.root.path() / "assets/sdks" / std::string(token(sdk))));
        EXPECT_TRUE(f.ws.project().installed_sdks.empty());
    }
}

TEST(Uninstall, NotInstalledFails) {
    Fixture f;
    auto before = f.snapshot();
    EXPECT_EQ(code_of([&] { f.uninstall(SdkId::ARKit); }), ErrorCode::NotInstalled);
    EXPECT_EQ(f.snapshot(), before);
}

TEST(Uninstall, RevertsTheTransitionToo) {
    Fixture f;
    auto before = f.snapshot();
    auto project_before = canonical_text(f.ws.project());
    f.install(SdkId::ARCore);
    f.switch_to(Reality::AugmentedAndroid);
    spawn_reality_camera(f.ws, "SampleScene");
    f.ws.save();
    f.uninstall(SdkId::ARCore);
    EXPECT_EQ(canonical_text(f.ws.project()), project_before);
    EXPECT_EQ(f.snapshot(), before);
    EXPECT_FALSE(fs::exists(f.root.path() / "assets/sdks/arcore"));
}

TEST(Uninstall, LockedFileFailsWithNothingChanged) {
    Fixture f;
    f.install(SdkId::OculusIntegration);
    f.switch_to(Reality::VirtualOculus);
    auto before = f.snapshot();
    auto project_before = canonical_text(f.ws.project());
    auto journal_before = test::read_file(f.ws.journal_file());
    f.ws.can_remove = [](const fs::path& p) { return p.extension() != ".aar"; };
    EXPECT_EQ(code_of([&] { uninstall_sdk(f.ws, SdkId::OculusIntegration); }), ErrorCode::RollbackFailure);
    EXPECT_EQ(f.snapshot(), before);
    EXPECT_EQ(canonical_text(f.ws.project()), project_before);
    EXPECT_EQ(test::read_file(f.ws.journal_file()), journal_before);
    // Once the file is released the uninstall goes through.
    f.ws.can_remove = nullptr;
    EXPECT_NO_THROW(f.uninstall(SdkId::OculusIntegration));
}

TEST(Uninstall, OtherSdkWorkIsReplayed) {
    Fixture f;
    auto before = f.snapshot();
    f.install(SdkId::ARCore);
    f.install(SdkId::ARKit);
    f.switch_to(Reality::AugmentedIOS);
    f.uninstall(SdkId::ARCore);
    // ARKit's install and switch survive.
    EXPECT_TRUE(f.ws.project().installed_sdks.contains(SdkId::ARKit));
    EXPECT_FALSE(f.ws.project().installed_sdks.contains(SdkId::ARCore));
    EXPECT_TRUE(validate(f.ws.project(), Reality::AugmentedIOS).empty());
    EXPECT_FALSE(fs::exists(f.root.path() / "assets/sdks/arcore"));
    EXPECT_TRUE(fs::exists(f.root.path() / "assets/sdks/arkit"));
    // The rewritten journal still replays, so ARKit can be removed in turn.
    auto reopened = Workspace::open(f.root.path());
    EXPECT_EQ(reopened.journal().transactions().size(), f.ws.journal().transactions().size());
    for (const auto& tx : reopened.journal().transactions()) EXPECT_EQ(tx.sdk, SdkId::ARKit);
    f.uninstall(SdkId::ARKit);
    EXPECT_EQ(f.snapshot(), before);
}

TEST(Uninstall, SharedDirectoriesAreAdoptedByTheRemainingInstall) {
    Fixture f;
    auto before = f.snapshot();
    f.install(SdkId::MixedRealityToolkit);
    f.install(SdkId::ARKit);
    // mrtk created assets/ and assets/sdks; arkit's files live under them.
    f.uninstall(SdkId::MixedRealityToolkit);
    EXPECT_TRUE(fs::exists(f.root.path() / "assets/sdks/arkit"));
    EXPECT_FALSE(fs::exists(f.root.path() / "assets/sdks/mrtk"));
    const auto& dirs = f.ws.project().installed_sdks.at(SdkId::ARKit).files.created_dirs;
    EXPECT_NE(std::find(dirs.begin(), dirs.end(), "assets/sdks"), dirs.end());
    f.uninstall(SdkId::ARKit);
    EXPECT_EQ(f.snapshot(), before);
}

TEST(Uninstall, ReverseOrderOfManyInstallsRestoresEverything) {
    Fixture f;
    auto before = f.snapshot();
    std::vector<SdkId> order{SdkId::ARKit, SdkId::OculusIntegration, SdkId::ARCore, SdkId::MixedRealityToolkit};
    for (auto sdk : order) {
        f.install(sdk);
        f.switch_to(reality_for(sdk));
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) f.uninstall(*it);
    EXPECT_EQ(f.snapshot(), before);
    EXPECT_TRUE(f.ws.journal().transactions().empty());
}

TEST(Uninstall, ForwardOrderAlsoRestoresEverything) {
    Fixture f;
    auto before = f.snapshot();
    std::vector<SdkId> order{SdkId::ARKit, SdkId::OculusIntegration, SdkId::ARCore};
    for (auto sdk : order) {
        f.install(sdk);
        f.switch_to(reality_for(sdk));
    }
    for (auto sdk : order) f.uninstall(sdk);
    EXPECT_EQ(f.snapshot(), before);
}

TEST(Uninstall, ForeignFilesInSdkDirectoryAreKept) {
    Fixture f;
    f.install(SdkId::ARKit);
    test::write_file(f.root.path() / "assets/sdks/arkit/notes.txt", "mine");
    f.uninstall(SdkId::ARKit);
    EXPECT_EQ(test::read_file(f.root.path() / "assets/sdks/arkit/notes.txt"), "mine");
    EXPECT_TRUE(f.ws.project().installed_sdks.empty());
}
