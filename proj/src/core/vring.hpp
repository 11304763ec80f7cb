#pragma once

#include <span>

#include "core/bytes.hpp"
#include "core/types.hpp"

namespace vdf::vring {

// Split-ring descriptor, serialized little-endian as addr(8) len(4) flags(2)
// next(2); exactly 16 bytes.
inline constexpr u16 kDescFlagNext = 0x1;
inline constexpr u16 kDescFlagWrite = 0x2;
inline constexpr u64 kDescSize = 16;

inline constexpr u64 kFeatureVersion1 = 1ull << 32;

struct Desc {
    u64 addr = 0;
    u32 len = 0;
    u16 flags = 0;
    u16 next = 0;
};

inline Desc decode_desc(std::span<const u8> raw) {
    Desc d;
    d.addr = read_le(raw.subspan(0, 8), 8);
    d.len = static_cast<u32>(read_le(raw.subspan(8, 4), 4));
    d.flags = static_cast<u16>(read_le(raw.subspan(12, 2), 2));
    d.next = static_cast<u16>(read_le(raw.subspan(14, 2), 2));
    return d;
}

inline void encode_desc(std::span<u8> raw, const Desc& d) {
    write_le(raw.subspan(0, 8), 8, d.addr);
    write_le(raw.subspan(8, 4), 4, d.len);
    write_le(raw.subspan(12, 2), 2, d.flags);
    write_le(raw.subspan(14, 2), 2, d.next);
}

// Ring layout offsets (no event-idx feature):
//   avail: flags u16, idx u16, ring[num] u16
//   used:  flags u16, idx u16, ring[num] of {id u32, len u32}
inline u64 avail_size(u32 num) { return 4 + 2 * u64{num}; }
inline u64 used_size(u32 num) { return 4 + 8 * u64{num}; }
inline u64 avail_ring_off(u32 slot) { return 4 + 2 * u64{slot}; }
inline u64 used_ring_off(u32 slot) { return 4 + 8 * u64{slot}; }

// MMIO transport register offsets.
namespace mmio {
inline constexpr u64 kMagic = 0x000;
inline constexpr u64 kVersion = 0x004;
inline constexpr u64 kDeviceId = 0x008;
inline constexpr u64 kVendorId = 0x00c;
inline constexpr u64 kDeviceFeatures = 0x010;
inline constexpr u64 kDeviceFeaturesSel = 0x014;
inline constexpr u64 kDriverFeatures = 0x020;
inline constexpr u64 kDriverFeaturesSel = 0x024;
inline constexpr u64 kQueueSel = 0x030;
inline constexpr u64 kQueueNumMax = 0x034;
inline constexpr u64 kQueueNum = 0x038;
inline constexpr u64 kQueueReady = 0x044;
inline constexpr u64 kQueueNotify = 0x050;
inline constexpr u64 kInterruptStatus = 0x060;
inline constexpr u64 kInterruptAck = 0x064;
inline constexpr u64 kStatus = 0x070;
inline constexpr u64 kQueueDescLow = 0x080;
inline constexpr u64 kQueueDescHigh = 0x084;
inline constexpr u64 kQueueDriverLow = 0x090;
inline constexpr u64 kQueueDriverHigh = 0x094;
inline constexpr u64 kQueueDeviceLow = 0x0a0;
inline constexpr u64 kQueueDeviceHigh = 0x0a4;
inline constexpr u64 kConfig = 0x100;
inline constexpr u32 kMagicValue = 0x74726976;

inline constexpr u32 kStatusAcknowledge = 1;
inline constexpr u32 kStatusDriver = 2;
inline constexpr u32 kStatusDriverOk = 4;
inline constexpr u32 kStatusFeaturesOk = 8;
}  // namespace mmio

}  // namespace vdf::vring
