#include "support.hpp"

#include "xrt/cli.hpp"
#include "xrt/error.hpp"
#include "xrt/workspace.hpp"

#include <gtest/gtest.h>

using namespace xrt;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

struct Cli {
    test::FixtureServer fx;
    test::TempDir root;
    fs::path project = root.path() / "game";
    fs::path staging = root.path() / "staging";

    test::ProcessResult run(std::vector<std::string> args, test::ProcessOptions opts = {}) {
        args.insert(args.begin(), test::xrt_binary());
        opts.env.emplace("XRT_REGISTRY", fx.registry_file().string());
        opts.env.emplace("XRT_STAGING", staging.string());
        return test::run_process(args, opts);
    }
    test::ProcessResult init() { return run({"init", "--project", project.string()}); }
    test::ProcessResult install(const std::string& sdk) {
        return run({"sdk", "download", sdk, "--install", "--project", project.string()});
    }
    std::string project_text() const { return test::read_file(project / "project.json"); }
    bool staging_empty() const { return !fs::exists(staging) || fs::is_empty(staging); }
};

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST(ExitCodes, Mapping) {
    EXPECT_EQ(cli::exit_code_for(ErrorCode::NoConnection), 3);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::NetworkFailure), 3);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::ChecksumMismatch), 4);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::PathEscape), 4);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::MalformedRegistry), 5);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::MalformedProject), 5);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::Cancelled), 6);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::SdkMissing), 2);
    EXPECT_EQ(cli::exit_code_for(ErrorCode::AlreadyInstalled), 2);
}

TEST(CliRegistry, ListShowsFourSdks) {
    Cli c;
    auto r = c.run({"registry", "list"});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    for (const char* sdk : {"arcore", "arkit", "oculus", "mrtk"}) EXPECT_TRUE(contains(r.out, sdk)) << sdk;
    EXPECT_TRUE(contains(r.out, "1.2.0"));
}

TEST(CliRegistry, FilterAndCsv) {
    Cli c;
    auto r = c.run({"registry", "list", "--sdk", "arkit", "--format", "csv"});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(r.out.starts_with("sdk,version,format,size,sha256,url\n"));
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
    EXPECT_FALSE(contains(r.out, "arcore"));
}

TEST(CliRegistry, FromUrl) {
    Cli c;
    auto r = c.run({"registry", "list", "--registry", c.fx.registry_url()});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(contains(r.out, "mrtk"));
}

TEST(CliRegistry, CorruptRegistryExitsFive) {
    Cli c;
    auto r = c.run({"registry", "list", "--registry",
                    (test::source_dir() / "tests/fixtures/bad/truncated.json").string()});
    EXPECT_EQ(r.exit_code, 5);
    EXPECT_FALSE(r.err.empty());
}

TEST(CliUsage, UnknownCommandAndRealityExitTwo) {
    Cli c;
    EXPECT_EQ(c.run({"frobnicate"}).exit_code, 2);
    c.init();
    EXPECT_EQ(c.run({"validate", "xr-web", "--project", c.project.string()}).exit_code, 2);
    EXPECT_EQ(c.run({"sdk", "download", "vive", "--project", c.project.string()}).exit_code, 2);
}

TEST(CliInstall, DownloadInstallSucceeds) {
    Cli c;
    ASSERT_EQ(c.init().exit_code, 0);
    auto r = c.install("arcore");
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(contains(r.out, "installed arcore 1.2.0"));
    EXPECT_TRUE(fs::exists(c.project / "assets/sdks/arcore"));
    EXPECT_TRUE(contains(c.project_text(), "ARCORE_SDK"));
    EXPECT_TRUE(c.staging_empty());
    EXPECT_EQ(c.install("arcore").exit_code, 2);
}

TEST(CliInstall, DownloadOnlyLeavesArtifactInStaging) {
    Cli c;
    auto r = c.run({"sdk", "download", "arkit", "--version", "2.1.0"});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(fs::exists(c.staging / "arkit-2.1.0.zip"));
}

TEST(CliInstall, OfflineExitsThreeWithHint) {
    Cli c;
    c.init();
    auto before = c.project_text();
    c.fx.server->shutdown();
    auto r = c.install("arcore");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_TRUE(contains(r.err, "connection")) << r.err;
    EXPECT_EQ(c.project_text(), before);
    EXPECT_TRUE(c.staging_empty());
}

TEST(CliInstall, DroppedTransferExitsThree) {
    Cli c;
    c.init();
    c.fx.server->set_fault(c.fx.route(SdkId::ARCore, "1.2.0"), FaultSpec::drop_after(4096));
    EXPECT_EQ(c.install("arcore").exit_code, 3);
    EXPECT_TRUE(c.staging_empty());
}

TEST(CliInstall, ChecksumFailureExitsFour) {
    Cli c;
    c.init();
    auto before = c.project_text();
    c.fx.server->set_fault(c.fx.route(SdkId::ARKit, "3.0.0"), FaultSpec::corrupt_at(10));
    auto r = c.install("arkit");
    EXPECT_EQ(r.exit_code, 4);
    EXPECT_TRUE(c.staging_empty());
    EXPECT_EQ(c.project_text(), before);
    EXPECT_FALSE(fs::exists(c.project / "assets"));
}

TEST(CliInstall, InterruptExitsSixWithEmptyStaging) {
    Cli c;
    c.init();
    auto before = c.project_text();
    c.fx.server->set_fault(c.fx.route(SdkId::ARCore, "1.2.0"), FaultSpec::throttle(32 * 1024));
    auto start = std::chrono::steady_clock::now();
    test::ProcessOptions opts;
    opts.interrupt_when = [&] { return std::chrono::steady_clock::now() - start > 600ms; };
    auto r = c.run({"sdk", "download", "arcore", "--install", "--project", c.project.string()}, opts);
    EXPECT_EQ(r.exit_code, 6) << r.err;
    EXPECT_TRUE(c.staging_empty());
    EXPECT_EQ(c.project_text(), before);
}

TEST(CliSwitch, SwitchThenValidateIsClean) {
    Cli c;
    c.init();
    ASSERT_EQ(c.install("oculus").exit_code, 0);
    auto v = c.run({"validate", "vr-oculus", "--project", c.project.string()});
    EXPECT_EQ(v.exit_code, 2);
    EXPECT_FALSE(v.out.empty());
    auto s = c.run({"switch", "vr-oculus", "--camera", "Main/Camera", "--project", c.project.string()});
    EXPECT_EQ(s.exit_code, 0) << s.err;
    v = c.run({"validate", "vr-oculus", "--project", c.project.string()});
    EXPECT_EQ(v.exit_code, 0) << v.out;
}

TEST(CliSwitch, MissingSdkPointsAtDownload) {
    Cli c;
    c.init();
    auto before = c.project_text();
    auto r = c.run({"switch", "ar-android", "--camera", "Main/Camera", "--project", c.project.string()});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_TRUE(contains(r.err, "xrt sdk download arcore")) << r.err;
    EXPECT_EQ(c.project_text(), before);
}

TEST(CliSwitch, BadCameraExitsTwoUnchanged) {
    Cli c;
    c.init();
    c.install("mrtk");
    auto before = c.project_text();
    auto r = c.run({"switch", "mr-holo", "--camera", "Main/Nope", "--project", c.project.string()});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ(c.project_text(), before);
}

TEST(CliUninstall, RestoresInitialBytes) {
    Cli c;
    c.init();
    auto before = c.project_text();
    c.install("arkit");
    ASSERT_EQ(c.run({"switch", "ar-ios", "--camera", "Main/Camera", "--project", c.project.string()}).exit_code, 0);
    ASSERT_EQ(c.run({"spawn-camera", "--project", c.project.string()}).exit_code, 0);
    auto r = c.run({"uninstall", "arkit", "--project", c.project.string()});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_EQ(c.project_text(), before);
    EXPECT_FALSE(fs::exists(c.project / "assets"));
    EXPECT_EQ(c.run({"uninstall", "arkit", "--project", c.project.string()}).exit_code, 2);
}

TEST(CliSpawn, NoSdkExitsTwo) {
    Cli c;
    c.init();
    auto before = c.project_text();
    EXPECT_EQ(c.run({"spawn-camera", "--project", c.project.string()}).exit_code, 2);
    EXPECT_EQ(c.project_text(), before);
}

TEST(CliEval, ShippedTrials) {
    Cli c;
    auto r = c.run({"eval", (test::source_dir() / "data/evaluation_trials.csv").string()});
    EXPECT_EQ(r.exit_code, 0) << r.err;
    EXPECT_TRUE(contains(r.out, "62.50"));
    EXPECT_TRUE(contains(r.out, "98.89"));
    auto csv = c.run({"eval", (test::source_dir() / "data/evaluation_trials.csv").string(), "--format", "csv"});
    EXPECT_TRUE(contains(csv.out, "min,all,,62.50"));
}

TEST(CliEval, BadInputExitsFive) {
    Cli c;
    test::write_file(c.root.path() / "t.csv", "participant,task,manual_seconds\n1,install,0\n");
    EXPECT_EQ(c.run({"eval", (c.root.path() / "t.csv").string()}).exit_code, 5);
    test::write_file(c.root.path() / "e.csv", "participant,task,manual_seconds\n");
    EXPECT_EQ(c.run({"eval", (c.root.path() / "e.csv").string()}).exit_code, 5);
}

TEST(CliProject, CorruptProjectExitsFive) {
    Cli c;
    c.init();
    test::write_file(c.project / "project.json", "{\"settings\": 3}");
    EXPECT_EQ(c.run({"validate", "ar-ios", "--project", c.project.string()}).exit_code, 5);
}

TEST(CliProject, LockedProjectExitsTwo) {
    Cli c;
    c.init();
    c.install("arcore");
    auto before = c.project_text();
    std::optional<ProjectLock> held;
    held.emplace(c.project);
    auto r = c.run({"switch", "ar-android", "--camera", "Main/Camera", "--project", c.project.string()});
    EXPECT_EQ(r.exit_code, 2);
    EXPECT_EQ(c.project_text(), before);
    held.reset();
    EXPECT_EQ(c.run({"switch", "ar-android", "--camera", "Main/Camera", "--project", c.project.string()}).exit_code, 0);
}
