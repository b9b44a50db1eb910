#include "support.hpp"

#include "xrt/error.hpp"
#include "xrt/fetch.hpp"
#include "xrt/sha256.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace xrt;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace {

bool empty_dir(const fs::path& dir) { return !fs::exists(dir) || fs::is_empty(dir); }

ArtifactDescriptor descriptor_for(const test::FixtureServer& fx, const std::string& name, const std::string& data) {
    test::write_file(fx.dir.path() / "artifacts" / name, data);
    return ArtifactDescriptor{SdkId::MixedRealityToolkit, SdkVersion::parse("0.0.1"),
                              fx.server->base_url() + "/artifacts/" + name, sha256_hex(data),
                              ArchiveFormat::PkgBundle, data.size()};
}

}  // namespace

TEST(Connectivity, RunningServerAnswers) {
    test::FixtureServer fx;
    EXPECT_TRUE(check_connectivity(fx.server->base_url() + "/probe", 1000ms));
}

TEST(Connectivity, StoppedServerDoesNot) {
    test::FixtureServer fx;
    auto url = fx.server->base_url() + "/probe";
    fx.server->shutdown();
    EXPECT_FALSE(check_connectivity(url, 1000ms));
}

TEST(Connectivity, UnroutableAddressGivesUpWithinTimeout) {
    auto start = std::chrono::steady_clock::now();
    EXPECT_FALSE(check_connectivity("http://10.255.255.1:9/probe", 1000ms));
    EXPECT_LT(std::chrono::steady_clock::now() - start, 2s);
}

TEST(Download, ReachesDoneWithDescribedSize) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::ARCore, "1.2.0");
    auto ticket = start_download(desc, staging.path());
    EXPECT_EQ(ticket.wait(), TicketState::Done);
    EXPECT_EQ(fs::file_size(ticket.staged_path()), desc.size_bytes);
    EXPECT_EQ(ticket.staged_path(), staged_path_for(desc, staging.path()));
    EXPECT_EQ(ticket.staged_path().filename(), "arcore-1.2.0.pkg");
    auto p = ticket.progress();
    ASSERT_TRUE(p.fraction);
    EXPECT_DOUBLE_EQ(*p.fraction, 1.0);
    EXPECT_EQ(finish(ticket, desc), staged_path_for(desc, staging.path()));
}

TEST(Download, NotFoundFails) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::ARKit, "latest");
    fx.server->set_fault(fx.route(SdkId::ARKit, "3.0.0"), FaultSpec::not_found());
    auto ticket = start_download(desc, staging.path());
    EXPECT_EQ(ticket.wait(), TicketState::Failed);
    EXPECT_EQ(ticket.failure(), FailReason::NotFound);
    EXPECT_TRUE(empty_dir(staging.path()));
    try {
        finish(ticket, desc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NotFound);
    }
}

TEST(Download, ZeroByteArtifact) {
    test::FixtureServer fx;
    test::TempDir staging;
    auto desc = descriptor_for(fx, "empty.pkg", "");
    EXPECT_EQ(desc.sha256, "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    auto ticket = start_download(desc, staging.path());
    EXPECT_EQ(ticket.wait(), TicketState::Done);
    auto path = finish(ticket, desc);
    EXPECT_EQ(fs::file_size(path), 0u);
}

TEST(Download, OfflineIsNoConnection) {
    test::FixtureServer fx;
    test::TempDir staging;
    auto desc = fx.registry.resolve(SdkId::ARCore, "latest");
    fx.server->shutdown();
    try {
        start_download(desc, staging.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NoConnection);
        EXPECT_NE(std::string(e.what()).find("connection"), std::string::npos);
    }
    EXPECT_TRUE(empty_dir(staging.path()));
}

TEST(Progress, MidTransferFractionStrictlyBetween) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::ARCore, "1.2.0");
    fx.server->set_fault(fx.route(SdkId::ARCore, "1.2.0"), FaultSpec::throttle(256 * 1024));
    auto ticket = start_download(desc, staging.path());
    bool saw_middle = false;
    std::uint64_t last = 0;
    while (ticket.wait_for(5ms) == TicketState::Running || ticket.state() == TicketState::Pending) {
        auto p = ticket.progress();
        EXPECT_GE(p.bytes_received, last);
        last = p.bytes_received;
        if (p.fraction && *p.fraction > 0 && *p.fraction < 1) saw_middle = true;
    }
    EXPECT_TRUE(saw_middle);
    EXPECT_EQ(ticket.state(), TicketState::Done);
}

TEST(Cancel, MidTransferLeavesNoFiles) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::ARCore, "1.2.0");
    fx.server->set_fault(fx.route(SdkId::ARCore, "1.2.0"), FaultSpec::throttle(64 * 1024));
    auto ticket = start_download(desc, staging.path());
    while (ticket.progress().bytes_received == 0) std::this_thread::sleep_for(2ms);
    ticket.cancel();
    EXPECT_EQ(ticket.state(), TicketState::Cancelled);
    EXPECT_TRUE(empty_dir(staging.path()));
    auto frozen = ticket.progress().bytes_received;
    std::this_thread::sleep_for(100ms);
    EXPECT_EQ(ticket.progress().bytes_received, frozen);
    try {
        finish(ticket, desc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Cancelled);
    }
}

TEST(Cancel, AfterDoneOrTwiceIsAlreadyTerminal) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::MixedRealityToolkit, "2.4.0");
    auto done = start_download(desc, staging.path());
    done.wait();
    try {
        done.cancel();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AlreadyTerminal);
    }

    test::TempDir staging2;
    fx.server->set_fault(fx.route(SdkId::ARCore, "1.2.0"), FaultSpec::throttle(32 * 1024));
    auto slow = start_download(fx.registry.resolve(SdkId::ARCore, "1.2.0"), staging2.path());
    slow.cancel();
    try {
        slow.cancel();
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AlreadyTerminal);
    }
}

TEST(Finish, CorruptedByteIsChecksumMismatchWithoutResidue) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::OculusIntegration, "20.1.0");
    fx.server->set_fault(fx.route(SdkId::OculusIntegration, "20.1.0"), FaultSpec::corrupt_at(100));
    auto ticket = start_download(desc, staging.path());
    EXPECT_EQ(ticket.wait(), TicketState::Done);
    EXPECT_EQ(ticket.progress().bytes_received, desc.size_bytes);
    try {
        finish(ticket, desc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ChecksumMismatch);
    }
    EXPECT_TRUE(empty_dir(staging.path()));
}

TEST(Finish, ConsumesTicketOnce) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::MixedRealityToolkit, "2.5.1");
    auto ticket = start_download(desc, staging.path());
    finish(ticket, desc);
    EXPECT_THROW(finish(ticket, desc), Error);
}

TEST(Download, DroppedConnectionFailsAndCleansStaging) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::ARCore, "1.0.0");
    fx.server->set_fault(fx.route(SdkId::ARCore, "1.0.0"), FaultSpec::drop_after(50000));
    auto ticket = start_download(desc, staging.path());
    EXPECT_EQ(ticket.wait(), TicketState::Failed);
    EXPECT_LE(ticket.progress().bytes_received, 50000u);
    EXPECT_TRUE(empty_dir(staging.path()));
    try {
        finish(ticket, desc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NetworkFailure);
    }
}

TEST(Download, NothingWrittenOutsideStaging) {
    test::FixtureServer fx;
    test::TempDir root;
    auto staging = root.path() / "staging";
    auto before = test::tree(root.path());
    const auto& desc = fx.registry.resolve(SdkId::ARKit, "2.1.0");
    auto ticket = start_download(desc, staging);
    ticket.wait();
    auto after = test::tree(root.path());
    for (const auto& [path, hash] : after) {
        if (!before.contains(path)) EXPECT_TRUE(path.starts_with("staging")) << path;
    }
}

TEST(Download, ExistingStagedFileIsAConflict) {
    test::FixtureServer fx;
    test::TempDir staging;
    const auto& desc = fx.registry.resolve(SdkId::ARKit, "2.1.0");
    test::write_file(staged_path_for(desc, staging.path()), "old");
    try {
        start_download(desc, staging.path());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PathConflict);
    }
    EXPECT_EQ(test::read_file(staged_path_for(desc, staging.path())), "old");
}
