#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "robustad/error.hpp"

namespace robustad::io {

// Little-endian primitives shared by the checkpoint and dataset-cache formats.

inline void write_u64(std::ostream& out, std::uint64_t v) {
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(buf, 8);
}

inline void write_u32(std::ostream& out, std::uint32_t v) {
    char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    out.write(buf, 4);
}

inline void write_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

inline void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

inline void write_string(std::ostream& out, std::string_view s) {
    write_u64(out, s.size());
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void read_exact(std::istream& in, char* dst, std::size_t n) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw IngestionError("unexpected end of binary stream");
}

inline std::uint64_t read_u64(std::istream& in) {
    unsigned char buf[8];
    read_exact(in, reinterpret_cast<char*>(buf), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

inline std::uint32_t read_u32(std::istream& in) {
    unsigned char buf[4];
    read_exact(in, reinterpret_cast<char*>(buf), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | buf[i];
    return v;
}

inline std::uint8_t read_u8(std::istream& in) {
    char c = 0;
    read_exact(in, &c, 1);
    return static_cast<std::uint8_t>(c);
}

inline double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

inline std::string read_string(std::istream& in, std::size_t max_len = 1u << 20) {
    const std::uint64_t n = read_u64(in);
    if (n > max_len) throw IngestionError("string length " + std::to_string(n) + " exceeds limit");
    std::string s(n, '\0');
    read_exact(in, s.data(), n);
    return s;
}

}  // namespace robustad::io
