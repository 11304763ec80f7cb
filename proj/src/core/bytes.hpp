#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace vdf {

inline u64 read_le(std::span<const u8> src, unsigned width) {
    u64 v = 0;
    for (unsigned i = 0; i < width; ++i)
        v |= static_cast<u64>(src[i]) << (8 * i);
    return v;
}

inline void write_le(std::span<u8> dst, unsigned width, u64 value) {
    for (unsigned i = 0; i < width; ++i)
        dst[i] = static_cast<u8>(value >> (8 * i));
}

inline std::string to_hex(std::span<const u8> data) {
    static const char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (u8 b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

inline bool from_hex(const std::string& hex, std::vector<u8>& out) {
    if (hex.size() % 2 != 0)
        return false;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    out.clear();
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0)
            return false;
        out.push_back(static_cast<u8>(hi << 4 | lo));
    }
    return true;
}

}  // namespace vdf
