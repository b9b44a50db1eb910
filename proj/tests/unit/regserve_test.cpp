#include "support.hpp"

#include "xrt/error.hpp"
#include "xrt/fetch.hpp"
#include "xrt/sha256.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <random>
#include <thread>

using namespace xrt;
using namespace std::chrono_literals;

namespace {

std::string blob(std::size_t n) {
    std::mt19937 rng(42);
    std::string s(n, '\0');
    for (auto& c : s) c = static_cast<char>(rng() & 0xff);
    return s;
}

struct Fetched {
    bool ok = false;
    int status = 0;
    std::string body;
};

/// Streams a route, keeping whatever arrived even when the transfer breaks.
Fetched get(const RegistryServer& server, const std::string& route) {
    httplib::Client client("127.0.0.1", server.port());
    client.set_read_timeout(5, 0);
    Fetched f;
    auto res = client.Get(route, [&](const char* data, std::size_t n) {
        f.body.append(data, n);
        return true;
    });
    if (res) {
        f.status = res->status;
        f.ok = res->status == 200;
    }
    if (res.error() != httplib::Error::Success) f.ok = false;
    return f;
}

}  // namespace

TEST(RegServe, ServesBytesUnchanged) {
    test::TempDir dir;
    auto data = blob(4096);
    test::write_file(dir.path() / "artifacts/a.pkg", data);
    test::write_file(dir.path() / "registry.json", "{\"sdks\": {}}\n");
    RegistryServer server(dir.path());
    auto f = get(server, "/artifacts/a.pkg");
    EXPECT_TRUE(f.ok);
    EXPECT_EQ(f.body, data);
    auto reg = get(server, "/registry.json");
    EXPECT_EQ(reg.body, "{\"sdks\": {}}\n");
    EXPECT_EQ(get(server, "/artifacts/missing.pkg").status, 404);
    EXPECT_EQ(get(server, "/artifacts/../registry.json").status == 200, false);
}

TEST(RegServe, DropAfterBytesDeliversExactlyThatMany) {
    test::TempDir dir;
    test::write_file(dir.path() / "artifacts/a.pkg", blob(4096));
    RegistryServer server(dir.path(), 0, {{"/artifacts/a.pkg", FaultSpec::drop_after(1024)}});
    auto f = get(server, "/artifacts/a.pkg");
    EXPECT_FALSE(f.ok);
    EXPECT_EQ(f.body.size(), 1024u);
    EXPECT_EQ(f.body, blob(4096).substr(0, 1024));
}

TEST(RegServe, CorruptByteKeepsLengthButBreaksChecksum) {
    test::TempDir dir;
    auto data = blob(4096);
    test::write_file(dir.path() / "artifacts/a.pkg", data);
    RegistryServer server(dir.path());
    server.set_fault("/artifacts/a.pkg", FaultSpec::corrupt_at(0));
    auto f = get(server, "/artifacts/a.pkg");
    EXPECT_TRUE(f.ok);
    ASSERT_EQ(f.body.size(), data.size());
    EXPECT_NE(f.body[0], data[0]);
    EXPECT_EQ(f.body.substr(1), data.substr(1));

    test::TempDir staging;
    ArtifactDescriptor desc{SdkId::ARKit, SdkVersion::parse("1.0"), server.base_url() + "/artifacts/a.pkg",
                            sha256_hex(data), ArchiveFormat::PkgBundle, data.size()};
    auto ticket = start_download(desc, staging.path());
    ticket.wait();
    try {
        finish(ticket, desc);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ChecksumMismatch);
    }
    server.clear_faults();
    EXPECT_EQ(get(server, "/artifacts/a.pkg").body, data);
}

TEST(RegServe, NotFoundFault) {
    test::TempDir dir;
    test::write_file(dir.path() / "artifacts/a.pkg", "x");
    RegistryServer server(dir.path(), 0, {{"/artifacts/a.pkg", FaultSpec::not_found()}});
    EXPECT_EQ(get(server, "/artifacts/a.pkg").status, 404);
}

TEST(RegServe, StallDelaysTheResponse) {
    test::TempDir dir;
    test::write_file(dir.path() / "artifacts/a.pkg", "x");
    RegistryServer server(dir.path(), 0, {{"/artifacts/a.pkg", FaultSpec::stall_for(300ms)}});
    auto start = std::chrono::steady_clock::now();
    auto f = get(server, "/artifacts/a.pkg");
    EXPECT_GE(std::chrono::steady_clock::now() - start, 250ms);
    EXPECT_EQ(f.body, "x");
}

TEST(RegServe, ProbeAnswers204) {
    test::TempDir dir;
    RegistryServer server(dir.path());
    EXPECT_EQ(get(server, "/probe").status, 204);
}

TEST(RegServe, RestartOnTheSamePortTenTimes) {
    test::TempDir dir;
    test::write_file(dir.path() / "artifacts/a.pkg", "payload");
    int port = 0;
    {
        RegistryServer first(dir.path());
        port = first.port();
    }
    for (int i = 0; i < 10; ++i) {
        RegistryServer server(dir.path(), port);
        EXPECT_EQ(server.port(), port);
        EXPECT_EQ(get(server, "/artifacts/a.pkg").body, "payload");
        server.shutdown();
    }
}

TEST(RegServe, ShutdownTwiceIsHarmless) {
    test::TempDir dir;
    RegistryServer server(dir.path());
    server.shutdown();
    EXPECT_NO_THROW(server.shutdown());
    EXPECT_FALSE(check_connectivity(server.base_url() + "/probe", 500ms));
}

TEST(RegServe, ShutdownDuringTransferEndsIt) {
    test::TempDir dir;
    test::write_file(dir.path() / "artifacts/a.pkg", blob(512 * 1024));
    RegistryServer server(dir.path(), 0, {{"/artifacts/a.pkg", FaultSpec::throttle(64 * 1024)}});
    Fetched f;
    std::thread client([&] { f = get(server, "/artifacts/a.pkg"); });
    std::this_thread::sleep_for(200ms);
    auto start = std::chrono::steady_clock::now();
    server.shutdown();
    client.join();
    EXPECT_LT(std::chrono::steady_clock::now() - start, 3s);
    EXPECT_FALSE(f.ok);
    EXPECT_LT(f.body.size(), 512u * 1024);
}

TEST(RegServe, BusyPortIsPortInUse) {
    test::TempDir dir;
    RegistryServer first(dir.path());
    try {
        RegistryServer second(dir.path(), first.port());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::PortInUse);
    }
}

TEST(RegServe, FaultsAreDeterministicAcrossConnections) {
    test::TempDir dir;
    test::write_file(dir.path() / "artifacts/a.pkg", blob(100000));
    RegistryServer server(dir.path(), 0, {{"/artifacts/a.pkg", FaultSpec::drop_after(40000)}});
    auto a = get(server, "/artifacts/a.pkg");
    auto b = get(server, "/artifacts/a.pkg");
    EXPECT_EQ(a.body, b.body);
    EXPECT_EQ(a.body.size(), 40000u);
}

TEST(Fixtures, CorpusIsReproducible) {
    test::TempDir a, b;
    fixtures::write_corpus(a.path(), "http://127.0.0.1:8080");
    fixtures::write_corpus(b.path(), "http://127.0.0.1:8080");
    EXPECT_EQ(test::tree(a.path()), test::tree(b.path()));
    EXPECT_EQ(test::read_file(a.path() / "registry.json"),
              test::read_file(test::source_dir() / "tests/fixtures/registry.json"));
}
