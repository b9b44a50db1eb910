#pragma once

// Low-level container codecs: gzip, raw deflate, ustar and PKZIP 2.0. Readers
// validate structure and throw CorruptArchive; they never touch the disk.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xrt::codec {

/// Decompressed output is capped to guard against compression bombs.
inline constexpr std::size_t kMaxExpandedBytes = std::size_t{1} << 30;

std::string gunzip(std::string_view data);
std::string gzip(std::string_view data);
std::string inflate_raw(std::string_view data, std::size_t expected_size);
std::string deflate_raw(std::string_view data);
std::uint32_t crc32(std::string_view data);

enum class TarType { File, Directory, Symlink, HardLink, Other };

struct TarMember {
    std::string path;
    TarType type = TarType::File;
    std::uint32_t mode = 0644;
    std::string data;
};

std::vector<TarMember> read_tar(std::string_view data);
/// Deterministic ustar writer: zero mtime/uid/gid, long names split into prefix.
std::string write_tar(std::span<const TarMember> members);

struct ZipMember {
    std::string path;  ///< no trailing '/' once read; `directory` flags folders
    bool directory = false;
    bool symlink = false;
    bool executable = false;
    std::string data;
};

/// Parses the central directory, inflates every entry and checks its CRC32.
std::vector<ZipMember> read_zip(std::string_view data);
/// `deflate` selects method 8 for non-empty files; otherwise entries are stored.
std::string write_zip(std::span<const ZipMember> members, bool deflate);

}  // namespace xrt::codec
