#include "xrt/archive_codec.hpp"
#include "xrt/error.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace xrt;
using namespace xrt::codec;

TEST(Crc32, KnownCheckValue) {
    EXPECT_EQ(crc32("123456789"), 0xCBF43926u);
    EXPECT_EQ(crc32(""), 0u);
}

TEST(Gzip, RoundTripsArbitraryBytes) {
    std::mt19937 rng(7);
    for (std::size_t size : {0u, 1u, 100u, 70000u}) {
        std::string data(size, '\0');
        for (auto& c : data) c = static_cast<char>(rng());
        EXPECT_EQ(gunzip(gzip(data)), data);
    }
}

TEST(Gzip, RejectsGarbage) {
    try {
        gunzip("\x1f\x8bnot really gzip");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CorruptArchive);
    }
}

TEST(Deflate, RawRoundTrip) {
    std::string text(5000, 'a');
    auto packed = deflate_raw(text);
    EXPECT_LT(packed.size(), text.size());
    EXPECT_EQ(inflate_raw(packed, text.size()), text);
}

TEST(Tar, RoundTripKeepsOrderTypesAndModes) {
    std::vector<TarMember> in{
        {"manifest.json", TarType::File, 0644, "[]"},
        {"sdks/x", TarType::Directory, 0755, ""},
        {"sdks/x/run.sh", TarType::File, 0755, "#!/bin/sh\n"},
        {"sdks/x/empty.txt", TarType::File, 0644, ""},
    };
    auto out = read_tar(write_tar(in));
    ASSERT_EQ(out.size(), in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        EXPECT_EQ(out[i].path, in[i].path);
        EXPECT_EQ(out[i].type, in[i].type);
        EXPECT_EQ(out[i].mode & 0777, in[i].mode);
        EXPECT_EQ(out[i].data, in[i].data);
    }
}

TEST(Tar, LongNamesUsePrefixField) {
    std::string dir(120, 'd');
    std::string path = dir + "/" + std::string(60, 'f') + ".txt";
    std::vector<TarMember> in{{path, TarType::File, 0644, "x"}};
    auto out = read_tar(write_tar(in));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].path, path);
}

TEST(Tar, OutputIsDeterministic) {
    std::vector<TarMember> in{{"a.txt", TarType::File, 0644, "hello"}};
    EXPECT_EQ(write_tar(in), write_tar(in));
}

TEST(Tar, DetectsHeaderChecksumDamage) {
    std::vector<TarMember> in{{"a.txt", TarType::File, 0644, "hello"}};
    auto bytes = write_tar(in);
    bytes[10] ^= 0x01;
    EXPECT_THROW(read_tar(bytes), Error);
}

TEST(Tar, RequiresEndMarker) {
    std::vector<TarMember> in{{"a.txt", TarType::File, 0644, "hello"}};
    auto bytes = write_tar(in);
    EXPECT_THROW(read_tar(bytes.substr(0, 1024)), Error);
}

TEST(Zip, RoundTripStoredAndDeflated) {
    std::vector<ZipMember> in{
        {"dir", true, false, false, ""},
        {"dir/a.txt", false, false, false, std::string(3000, 'z')},
        {"dir/tool", false, false, true, "bin"},
        {"empty", false, false, false, ""},
    };
    for (bool deflate : {false, true}) {
        auto out = read_zip(write_zip(in, deflate));
        ASSERT_EQ(out.size(), in.size());
        for (std::size_t i = 0; i < in.size(); ++i) {
            EXPECT_EQ(out[i].path, in[i].path);
            EXPECT_EQ(out[i].directory, in[i].directory);
            EXPECT_EQ(out[i].executable, in[i].executable);
            EXPECT_EQ(out[i].data, in[i].data);
        }
    }
}

TEST(Zip, TruncationAndCrcDamageAreCorrupt) {
    std::vector<ZipMember> in{{"a.txt", false, false, false, "some content here"}};
    auto bytes = write_zip(in, false);
    for (auto cut : {bytes.size() / 2, bytes.size() - 1, std::size_t{10}}) {
        try {
            read_zip(bytes.substr(0, cut));
            FAIL() << "cut at " << cut;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::CorruptArchive);
        }
    }
    auto damaged = bytes;
    damaged[30 + 5 + 2] ^= 0x20;  // inside the stored payload
    EXPECT_THROW(read_zip(damaged), Error);
}

TEST(Zip, FlagsSymlinks) {
    std::vector<ZipMember> in{{"link", false, true, false, "/etc/passwd"}};
    auto out = read_zip(write_zip(in, false));
    ASSERT_EQ(out.size(), 1u);
    EXPECT_TRUE(out[0].symlink);
}
