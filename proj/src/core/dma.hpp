#pragma once

#include <map>
#include <vector>

#include "core/guest_mem.hpp"
#include "core/input_stream.hpp"
#include "core/report.hpp"
#include "core/task.hpp"
#include "core/types.hpp"

namespace vdf {

enum class DmaDirection : u8 { ToDevice, FromDevice, Bidirectional };

struct DmaMapping {
    u64 dma_addr = 0;      // shared, inside the bounce pool
    u64 private_base = 0;  // driver-side buffer
    u64 len = 0;
    DmaDirection dir = DmaDirection::Bidirectional;
    u32 first_slot = 0;
    u32 slot_count = 0;
};

// Records an event with the sink; throws IterationAbort when the sink says
// the iteration is over. Must only be called from task context when the
// event can be iteration-ending.
inline void raise_violation(ViolationSink& sink, const ViolationEvent& ev) {
    if (sink.on_violation(ev))
        throw IterationAbort{};
}

// Streaming/coherent DMA with a slot-based bounce pool carved out of shared
// memory. The driver maps a private buffer, gets back a pool address, and
// data crosses the boundary only at explicit synchronization points. Those
// points are where fuzz data enters, and where device-controlled lengths
// get checked against what was actually mapped.
class DmaLayer {
public:
    static constexpr u64 kSlotSize = 2048;

    DmaLayer(GuestMem& mem, ViolationSink& sink) : mem_(mem), sink_(sink) {}

    void reset();

    // Returns the pool address. Throws EnvError when the pool cannot hold
    // the request; raises a violation if the private range fails its access
    // check.
    u64 map_streaming(u64 private_base, u64 len, DmaDirection dir, SiteId site);

    // Unknown addresses are rejected (reported, not fatal). Known mappings
    // bounce back for from-device directions; a claimed length beyond the
    // registered one is reported as out-of-bounds before the copy is
    // clamped.
    void unmap_streaming(u64 dma_addr, u64 claimed_len, DmaDirection dir,
                         SiteId site);

    // Refills the shared side with `len` fresh stream bytes, then bounces to
    // the private buffer under the same length rule as unmap.
    void sync_for_cpu(u64 dma_addr, u64 len, SiteId site, InputStream& stream);

    // Coherent region, device-visible without sync calls. Throws EnvError on
    // shared-space exhaustion.
    SharedSpace::Region* alloc_coherent(u64 size);

    bool is_mapped(u64 dma_addr) const {
        return registry_.count(dma_addr) != 0;
    }
    size_t mapped_count() const { return registry_.size(); }
    const DmaMapping* mapping(u64 dma_addr) const;

    void note_injected(u64 n) { injected_bytes_ += n; }
    u64 injected_bytes() const { return injected_bytes_; }

private:
    // Bounces min(claimed_len, m.len) shared->private, reporting over-length
    // intent first. Returns true if the iteration must end afterwards.
    bool bounce_to_private(const DmaMapping& m, u64 claimed_len, SiteId site);

    GuestMem& mem_;
    ViolationSink& sink_;
    std::map<u64, DmaMapping> registry_;
    std::vector<bool> slots_;
    u64 injected_bytes_ = 0;
};

}  // namespace vdf
