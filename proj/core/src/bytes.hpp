#pragma once

// Little-endian byte IO helpers shared by the binary file formats.

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gradsec/error.hpp"

namespace gradsec::detail {

inline void put_u8(std::ostream& os, std::uint8_t v) { os.put(char(v)); }

inline void put_u32(std::ostream& os, std::uint32_t v) {
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                 char((v >> 24) & 0xff)};
    os.write(b, 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
    put_u32(os, std::uint32_t(v & 0xffffffffULL));
    put_u32(os, std::uint32_t(v >> 32));
}

inline void put_f32(std::ostream& os, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(os, u);
}

inline void put_f32_array(std::ostream& os, const float* p, std::size_t n) {
    // staged through a byte buffer: one stream write, explicit little-endian
    std::vector<char> buf(n * 4);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t u;
        std::memcpy(&u, p + i, 4);
        buf[i * 4 + 0] = char(u & 0xff);
        buf[i * 4 + 1] = char((u >> 8) & 0xff);
        buf[i * 4 + 2] = char((u >> 16) & 0xff);
        buf[i * 4 + 3] = char((u >> 24) & 0xff);
    }
    os.write(buf.data(), std::streamsize(buf.size()));
}

inline std::uint8_t get_u8(std::istream& is, const std::string& what) {
    int c = is.get();
    if (c == EOF) fail(what + ": unexpected end of file");
    return std::uint8_t(c);
}

inline std::uint32_t get_u32(std::istream& is, const std::string& what) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) fail(what + ": unexpected end of file");
    return std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) | (std::uint32_t(b[2]) << 16) |
           (std::uint32_t(b[3]) << 24);
}

inline std::uint64_t get_u64(std::istream& is, const std::string& what) {
    std::uint64_t lo = get_u32(is, what);
    std::uint64_t hi = get_u32(is, what);
    return lo | (hi << 32);
}

inline float get_f32(std::istream& is, const std::string& what) {
    std::uint32_t u = get_u32(is, what);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

inline void get_f32_array(std::istream& is, float* p, std::size_t n, const std::string& what) {
    std::vector<char> buf(n * 4);
    is.read(buf.data(), std::streamsize(buf.size()));
    if (!is) fail(what + ": unexpected end of file");
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char* b = reinterpret_cast<const unsigned char*>(buf.data()) + i * 4;
        std::uint32_t u = std::uint32_t(b[0]) | (std::uint32_t(b[1]) << 8) |
                          (std::uint32_t(b[2]) << 16) | (std::uint32_t(b[3]) << 24);
        std::memcpy(p + i, &u, 4);
    }
}

inline void put_magic(std::ostream& os, const char* magic) { os.write(magic, 5); }

inline void check_magic(std::istream& is, const char* magic, const std::string& what) {
    char b[5];
    is.read(b, 5);
    if (!is || std::memcmp(b, magic, 5) != 0)
        fail(what + ": bad magic (expected " + std::string(magic) + ")");
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) fail("cannot open '" + path + "' for writing");
    return os;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) fail("cannot open '" + path + "' for reading");
    return is;
}

}  // namespace gradsec::detail
