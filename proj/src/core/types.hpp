#pragma once

#include <cstdint>
#include <cstddef>

namespace vdf {

using u8 = uint8_t;
using u16 = uint16_t;
using u32 = uint32_t;
using u64 = uint64_t;

// Instrumentation point declared by a model driver; doubles as the location
// attached to violation reports.
using SiteId = uint32_t;

// Guest address layout. Private (encrypted) memory sits in the canonical
// upper half; shared (decrypted) memory in a fixed low window. The device
// side can only ever observe or touch the shared window.
inline constexpr u64 kPrivateBase = 0xFFFF'8000'0000'0000ull;
inline constexpr u64 kPrivateEnd = 0xFFFF'FFFF'FFFF'FFFFull;  // exclusive
inline constexpr u64 kSharedBase = 0x0000'0000'1000'0000ull;
inline constexpr u64 kSharedEnd = 0x0000'0000'2000'0000ull;  // exclusive

enum class AddrSpace : u8 { Private, Shared, Outside };

inline AddrSpace addr_space(u64 addr) {
    if (addr >= kPrivateBase && addr < kPrivateEnd)
        return AddrSpace::Private;
    if (addr >= kSharedBase && addr < kSharedEnd)
        return AddrSpace::Shared;
    return AddrSpace::Outside;
}

}  // namespace vdf
