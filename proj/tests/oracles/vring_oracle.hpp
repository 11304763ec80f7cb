#pragma once

// Reference interpreter for the split-ring protocol. Given the guest-memory
// view of one queue and its own copy of the input stream, it predicts what
// a benign device must produce: the used-ring entries, the final used.idx
// and the number of interrupts raised. Written as a straight-line
// re-implementation from the ring layout, independent of the device model.

#include <optional>
#include <vector>

#include "core/guest_mem.hpp"
#include "core/input_stream.hpp"
#include "core/vring.hpp"

namespace vdf_test {

struct RingPrediction {
    struct Used {
        vdf::u32 id;
        vdf::u32 len;
    };
    std::vector<Used> used;
    vdf::u16 used_idx = 0;
    vdf::u64 interrupts = 0;
};

// Walks every pending avail entry exactly like a conforming device would:
// chain-limited descriptor traversal, adversary-chosen payload length per
// writable descriptor (u16 draw mod (len+1)), one used entry and one
// interrupt per completed buffer.
inline RingPrediction predict_ring(const vdf::SharedSpace& shared,
                                   vdf::u64 desc_table, vdf::u64 avail,
                                   vdf::u32 num, vdf::u16 from_avail_idx,
                                   vdf::InputStream& stream) {
    using namespace vdf;
    RingPrediction out;

    auto rd16 = [&](u64 addr) -> std::optional<u16> {
        u8 b[2];
        if (!shared.raw_read(addr, 2, b))
            return std::nullopt;
        return static_cast<u16>(read_le(b, 2));
    };

    u16 cursor = from_avail_idx;
    for (;;) {
        auto avail_idx = rd16(avail + 2);
        if (!avail_idx || cursor == *avail_idx)
            break;
        auto head = rd16(avail + vring::avail_ring_off(cursor % num));
        if (!head)
            break;
        ++cursor;

        u32 written = 0;
        u16 idx = *head;
        u32 hops = 0;
        bool ok = true;
        for (;;) {
            if (idx >= num || ++hops > num) {
                ok = false;
                break;
            }
            u8 raw[vring::kDescSize];
            if (!shared.raw_read(desc_table + vring::kDescSize * idx,
                                 vring::kDescSize, raw)) {
                ok = false;
                break;
            }
            vring::Desc d = vring::decode_desc(raw);
            if (d.flags & vring::kDescFlagWrite) {
                u32 chosen = d.len ? stream.next_u16() % (d.len + 1) : 0;
                stream.take(chosen);  // payload bytes
                written += chosen;
            }
            if (!(d.flags & vring::kDescFlagNext))
                break;
            idx = d.next;
        }
        if (!ok)
            break;
        out.used.push_back({*head, written});
        ++out.used_idx;
        ++out.interrupts;
    }
    out.used_idx = static_cast<vdf::u16>(from_avail_idx + out.used.size());
    return out;
}

}  // namespace vdf_test
