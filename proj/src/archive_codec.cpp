#include "xrt/archive_codec.hpp"

#include "xrt/error.hpp"

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstring>

namespace xrt::codec {
namespace {

[[noreturn]] void corrupt(const std::string& what) {
    fail(ErrorCode::CorruptArchive, "corrupt archive: " + what);
}

// Shared inflate loop; `window_bits` selects gzip (16 + MAX_WBITS) or raw (-MAX_WBITS).
std::string inflate_with(std::string_view data, int window_bits, std::size_t limit) {
    z_stream zs{};
    if (inflateInit2(&zs, window_bits) != Z_OK) corrupt("inflate init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    std::string out;
    std::array<char, 64 * 1024> chunk{};
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
        zs.avail_out = static_cast<uInt>(chunk.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            corrupt(zs.msg ? zs.msg : "truncated compressed stream");
        }
        out.append(chunk.data(), chunk.size() - zs.avail_out);
        if (out.size() > limit) {
            inflateEnd(&zs);
            corrupt("expanded data exceeds " + std::to_string(limit) + " bytes");
        }
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            corrupt("truncated compressed stream");
        }
    }
    bool trailing = zs.avail_in != 0;
    inflateEnd(&zs);
    if (trailing) corrupt("trailing bytes after compressed stream");
    return out;
}

std::string deflate_with(std::string_view data, int window_bits) {
    z_stream zs{};
    if (deflateInit2(&zs, 9, Z_DEFLATED, window_bits, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        fail(ErrorCode::IoFailure, "deflate init failed");
    }
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    std::string out;
    std::array<char, 64 * 1024> chunk{};
    int rc = Z_OK;
    while (rc != Z_STREAM_END) {
        zs.next_out = reinterpret_cast<Bytef*>(chunk.data());
        zs.avail_out = static_cast<uInt>(chunk.size());
        rc = deflate(&zs, Z_FINISH);
        out.append(chunk.data(), chunk.size() - zs.avail_out);
    }
    deflateEnd(&zs);
    return out;
}

// ---- little-endian helpers -------------------------------------------------

std::uint16_t le16(std::string_view d, std::size_t at) {
    if (at + 2 > d.size()) corrupt("unexpected end of data");
    return static_cast<std::uint16_t>(static_cast<unsigned char>(d[at]) |
                                      (static_cast<unsigned char>(d[at + 1]) << 8));
}

std::uint32_t le32(std::string_view d, std::size_t at) {
    if (at + 4 > d.size()) corrupt("unexpected end of data");
    return static_cast<std::uint32_t>(le16(d, at)) |
           (static_cast<std::uint32_t>(le16(d, at + 2)) << 16);
}

void put16(std::string& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}

void put32(std::string& out, std::uint32_t v) {
    put16(out, static_cast<std::uint16_t>(v & 0xffff));
    put16(out, static_cast<std::uint16_t>(v >> 16));
}

// ---- tar helpers -----------------------------------------------------------

constexpr std::size_t kBlock = 512;

std::string field_string(std::string_view block, std::size_t at, std::size_t len) {
    auto f = block.substr(at, len);
    return std::string(f.substr(0, f.find('\0')));
}

std::uint64_t field_octal(std::string_view block, std::size_t at, std::size_t len) {
    auto f = block.substr(at, len);
    std::size_t i = 0;
    while (i < f.size() && f[i] == ' ') ++i;
    std::uint64_t value = 0;
    bool any = false;
    for (; i < f.size(); ++i) {
        char c = f[i];
        if (c == '\0' || c == ' ') break;
        if (c < '0' || c > '7') corrupt("bad octal field in tar header");
        value = value * 8 + static_cast<std::uint64_t>(c - '0');
        any = true;
    }
    for (; i < f.size(); ++i) {
        if (f[i] != '\0' && f[i] != ' ') corrupt("bad octal field in tar header");
    }
    if (!any) return 0;
    return value;
}

std::uint32_t header_checksum(std::string_view block) {
    std::uint32_t sum = 0;
    for (std::size_t i = 0; i < kBlock; ++i) {
        bool in_field = i >= 148 && i < 156;
        sum += in_field ? static_cast<unsigned char>(' ') : static_cast<unsigned char>(block[i]);
    }
    return sum;
}

void put_field(std::string& block, std::size_t at, std::size_t len, std::string_view value) {
    std::memcpy(block.data() + at, value.data(), std::min(len, value.size()));
}

void put_octal(std::string& block, std::size_t at, std::size_t len, std::uint64_t value) {
    // len-1 digits followed by NUL
    std::string digits(len - 1, '0');
    for (std::size_t i = digits.size(); i-- > 0 && value != 0;) {
        digits[i] = static_cast<char>('0' + (value & 7));
        value >>= 3;
    }
    if (value != 0) fail(ErrorCode::InvalidArgument, "value too large for tar header");
    put_field(block, at, len, digits);
}

}  // namespace

std::string gunzip(std::string_view data) {
    if (data.size() < 18) corrupt("gzip stream too short");
    return inflate_with(data, 16 + MAX_WBITS, kMaxExpandedBytes);
}

std::string gzip(std::string_view data) { return deflate_with(data, 16 + MAX_WBITS); }

std::string inflate_raw(std::string_view data, std::size_t expected_size) {
    auto out = inflate_with(data, -MAX_WBITS, std::min(expected_size, kMaxExpandedBytes));
    if (out.size() != expected_size) corrupt("inflated size does not match header");
    return out;
}

std::string deflate_raw(std::string_view data) { return deflate_with(data, -MAX_WBITS); }

std::uint32_t crc32(std::string_view data) {
    uLong crc = ::crc32(0L, Z_NULL, 0);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    return static_cast<std::uint32_t>(crc);
}

std::vector<TarMember> read_tar(std::string_view data) {
    std::vector<TarMember> members;
    std::size_t off = 0;
    bool ended = false;
    while (off + kBlock <= data.size()) {
        auto block = data.substr(off, kBlock);
        if (std::all_of(block.begin(), block.end(), [](char c) { return c == '\0'; })) {
            ended = true;
            break;
        }
        auto stored = field_octal(block, 148, 8);
        if (stored != header_checksum(block)) corrupt("tar header checksum mismatch");

        TarMember m;
        auto name = field_string(block, 0, 100);
        std::string prefix;
        if (block.substr(257, 5) == "ustar") prefix = field_string(block, 345, 155);
        m.path = prefix.empty() ? name : prefix + "/" + name;
        m.mode = static_cast<std::uint32_t>(field_octal(block, 100, 8));
        auto size = field_octal(block, 124, 12);
        switch (block[156]) {
        case '0':
        case '\0': m.type = TarType::File; break;
        case '5': m.type = TarType::Directory; break;
        case '2': m.type = TarType::Symlink; break;
        case '1': m.type = TarType::HardLink; break;
        default: m.type = TarType::Other; break;
        }
        if (m.type == TarType::Directory && m.path.ends_with('/')) m.path.pop_back();

        off += kBlock;
        if (size > data.size() - off) corrupt("tar member '" + m.path + "' runs past end of data");
        m.data = std::string(data.substr(off, size));
        off += (size + kBlock - 1) / kBlock * kBlock;
        members.push_back(std::move(m));
    }
    if (!ended) corrupt("tar archive has no end-of-archive marker");
    return members;
}

std::string write_tar(std::span<const TarMember> members) {
    std::string out;
    for (const auto& m : members) {
        std::string block(kBlock, '\0');
        std::string path = m.path;
        if (m.type == TarType::Directory && !path.ends_with('/')) path += '/';
        std::string name = path;
        std::string prefix;
        if (name.size() > 100) {
            auto split = path.find('/');
            while (split != std::string::npos && path.size() - split - 1 > 100) {
                split = path.find('/', split + 1);
            }
            if (split == std::string::npos || split == 0 || split > 155) {
                fail(ErrorCode::InvalidArgument, "tar path too long: " + path);
            }
            prefix = path.substr(0, split);
            name = path.substr(split + 1);
        }
        put_field(block, 0, 100, name);
        put_octal(block, 100, 8, m.type == TarType::Directory ? 0755 : m.mode);
        put_octal(block, 108, 8, 0);
        put_octal(block, 116, 8, 0);
        put_octal(block, 124, 12, m.type == TarType::File ? m.data.size() : 0);
        put_octal(block, 136, 12, 0);
        char type = '0';
        switch (m.type) {
        case TarType::File: type = '0'; break;
        case TarType::Directory: type = '5'; break;
        case TarType::Symlink: type = '2'; break;
        case TarType::HardLink: type = '1'; break;
        case TarType::Other: type = '3'; break;
        }
        block[156] = type;
        if (m.type == TarType::Symlink || m.type == TarType::HardLink) {
            put_field(block, 157, 100, m.data);
        }
        put_field(block, 257, 6, std::string_view("ustar\0", 6));
        put_field(block, 263, 2, "00");
        put_field(block, 345, 155, prefix);
        char chk[8];
        std::snprintf(chk, sizeof chk, "%06o", header_checksum(block));
        put_field(block, 148, 6, chk);
        block[154] = '\0';
        block[155] = ' ';
        out += block;
        if (m.type == TarType::File) {
            out += m.data;
            out.append((kBlock - m.data.size() % kBlock) % kBlock, '\0');
        }
    }
    out.append(2 * kBlock, '\0');
    return out;
}

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::size_t kEndSize = 22;

}  // namespace

std::vector<ZipMember> read_zip(std::string_view data) {
    if (data.size() < kEndSize) corrupt("zip too short");
    std::size_t end_pos = std::string_view::npos;
    std::size_t lowest = data.size() > kEndSize + 0xffff ? data.size() - kEndSize - 0xffff : 0;
    for (std::size_t p = data.size() - kEndSize + 1; p-- > lowest;) {
        if (le32(data, p) == kEndSig) {
            end_pos = p;
            break;
        }
    }
    if (end_pos == std::string_view::npos) corrupt("zip end-of-central-directory not found");
    if (le16(data, end_pos + 4) != 0 || le16(data, end_pos + 6) != 0) {
        corrupt("multi-disk zip archives are not supported");
    }
    std::size_t count = le16(data, end_pos + 10);
    std::uint32_t cd_size = le32(data, end_pos + 12);
    std::uint32_t cd_offset = le32(data, end_pos + 16);
    if (count == 0xffff || cd_size == 0xffffffffu || cd_offset == 0xffffffffu) {
        corrupt("zip64 archives are not supported");
    }
    if (std::size_t{cd_offset} + cd_size > end_pos) corrupt("central directory out of bounds");

    std::vector<ZipMember> members;
    std::size_t p = cd_offset;
    for (std::size_t i = 0; i < count; ++i) {
        if (le32(data, p) != kCentralSig) corrupt("bad central directory entry");
        std::uint16_t made_by = le16(data, p + 4);
        std::uint16_t flags = le16(data, p + 8);
        std::uint16_t method = le16(data, p + 10);
        std::uint32_t crc = le32(data, p + 16);
        std::uint32_t csize = le32(data, p + 20);
        std::uint32_t usize = le32(data, p + 24);
        std::size_t nlen = le16(data, p + 28);
        std::size_t elen = le16(data, p + 30);
        std::size_t clen = le16(data, p + 32);
        std::uint32_t ext_attr = le32(data, p + 38);
        std::uint32_t local = le32(data, p + 42);
        if (p + 46 + nlen > cd_offset + std::size_t{cd_size}) corrupt("central directory truncated");

        ZipMember m;
        m.path = std::string(data.substr(p + 46, nlen));
        p += 46 + nlen + elen + clen;

        if (flags & 0x1) corrupt("encrypted entry '" + m.path + "' is not supported");
        if (le32(data, local) != kLocalSig) corrupt("bad local header for '" + m.path + "'");
        std::size_t begin = std::size_t{local} + 30 + le16(data, local + 26) + le16(data, local + 28);
        if (begin > cd_offset || csize > cd_offset - begin) {
            corrupt("entry '" + m.path + "' runs past its bounds");
        }
        auto payload = data.substr(begin, csize);

        if ((made_by >> 8) == 3) {
            std::uint32_t mode = ext_attr >> 16;
            m.symlink = (mode & 0170000) == 0120000;
            m.executable = (mode & 0111) != 0 && (mode & 0170000) != 0040000;
        }
        m.directory = m.path.ends_with('/');
        if (method == 0) {
            if (csize != usize) corrupt("stored entry '" + m.path + "' has mismatched sizes");
            m.data = std::string(payload);
        } else if (method == 8) {
            m.data = inflate_raw(payload, usize);
        } else {
            corrupt("entry '" + m.path + "' uses unsupported method " + std::to_string(method));
        }
        if (crc32(m.data) != crc) corrupt("CRC32 mismatch for '" + m.path + "'");
        if (m.directory) m.path.pop_back();
        members.push_back(std::move(m));
    }
    return members;
}

std::string write_zip(std::span<const ZipMember> members, bool deflate) {
    std::string out;
    std::string central;
    constexpr std::uint16_t kDate = (0 << 9) | (1 << 5) | 1;  // 1980-01-01
    for (const auto& m : members) {
        std::string name = m.path;
        if (m.directory && !name.ends_with('/')) name += '/';
        bool compress = deflate && !m.directory && !m.data.empty();
        std::string payload = compress ? deflate_raw(m.data) : m.data;
        std::uint32_t crc = crc32(m.data);
        std::uint32_t mode = m.directory ? 0040755 : m.symlink ? 0120777 : m.executable ? 0100755 : 0100644;
        auto offset = static_cast<std::uint32_t>(out.size());

        put32(out, kLocalSig);
        put16(out, 20);
        put16(out, 0);
        put16(out, compress ? 8 : 0);
        put16(out, 0);
        put16(out, kDate);
        put32(out, crc);
        put32(out, static_cast<std::uint32_t>(payload.size()));
        put32(out, static_cast<std::uint32_t>(m.data.size()));
        put16(out, static_cast<std::uint16_t>(name.size()));
        put16(out, 0);
        out += name;
        out += payload;

        put32(central, kCentralSig);
        put16(central, (3 << 8) | 20);
        put16(central, 20);
        put16(central, 0);
        put16(central, compress ? 8 : 0);
        put16(central, 0);
        put16(central, kDate);
        put32(central, crc);
        put32(central, static_cast<std::uint32_t>(payload.size()));
        put32(central, static_cast<std::uint32_t>(m.data.size()));
        put16(central, static_cast<std::uint16_t>(name.size()));
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put16(central, 0);
        put32(central, (mode << 16) | (m.directory ? 0x10 : 0));
        put32(central, offset);
        central += name;
    }
    auto cd_offset = static_cast<std::uint32_t>(out.size());
    out += central;
    put32(out, kEndSig);
    put16(out, 0);
    put16(out, 0);
    put16(out, static_cast<std::uint16_t>(members.size()));
    put16(out, static_cast<std::uint16_t>(members.size()));
    put32(out, static_cast<std::uint32_t>(central.size()));
    put32(out, cd_offset);
    put16(out, 0);
    return out;
}

}  // namespace xrt::codec
