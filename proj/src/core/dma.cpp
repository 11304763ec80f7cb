#include "core/dma.hpp"

#include <algorithm>
#include <sstream>

namespace vdf {

void DmaLayer::reset() {
    registry_.clear();
    slots_.assign(SharedSpace::kPoolSize / kSlotSize, false);
    injected_bytes_ = 0;
}

u64 DmaLayer::map_streaming(u64 private_base, u64 len, DmaDirection dir,
                            SiteId site) {
    if (len == 0)
        throw EnvError{"zero-length streaming mapping"};
    if (slots_.empty())
        reset();
    u32 want = static_cast<u32>((len + kSlotSize - 1) / kSlotSize);
    u32 first = 0;
    bool found = false;
    for (u32 i = 0; i + want <= slots_.size() && !found; ++i) {
        bool free = true;
        for (u32 j = 0; j < want; ++j)
            if (slots_[i + j]) {
                free = false;
                break;
            }
        if (free) {
            first = i;
            found = true;
        }
    }
    if (!found) {
        std::ostringstream os;
        os << "bounce pool exhausted: no room for " << len << " bytes";
        throw EnvError{os.str()};
    }

    // The driver must hand us a valid private buffer; a bad one is a driver
    // bug, not a device action.
    AccessKind kind =
        dir == DmaDirection::ToDevice ? AccessKind::Read : AccessKind::Write;
    if (auto ev = mem_.check_access(private_base, len, kind, site))
        raise_violation(sink_, *ev);

    DmaMapping m;
    m.dma_addr = mem_.shared().pool().base + u64{first} * kSlotSize;
    m.private_base = private_base;
    m.len = len;
    m.dir = dir;
    m.first_slot = first;
    m.slot_count = want;
    for (u32 j = 0; j < want; ++j)
        slots_[first + j] = true;

    // Fresh slots start zeroed so iteration state never leaks across runs.
    auto& pool = mem_.shared().pool();
    std::fill_n(pool.bytes.begin() + (m.dma_addr - pool.base),
                u64{want} * kSlotSize, u8{0});

    if (dir == DmaDirection::ToDevice || dir == DmaDirection::Bidirectional) {
        std::vector<u8> tmp(len);
        if (auto ev = mem_.read_bytes(private_base, len, tmp.data(), site))
            raise_violation(sink_, *ev);
        mem_.shared().raw_write(m.dma_addr, tmp);
    }

    registry_.emplace(m.dma_addr, m);
    return m.dma_addr;
}

bool DmaLayer::bounce_to_private(const DmaMapping& m, u64 claimed_len,
                                 SiteId site) {
    bool ends = false;
    if (claimed_len > m.len) {
        ViolationEvent ev;
        ev.kind = EventKind::OverLengthBounce;
        ev.site = site;
        ev.addr = m.dma_addr;
        ev.value = claimed_len;
        std::ostringstream os;
        os << "device-controlled length " << claimed_len
           << " exceeds the mapped " << m.len << " bytes";
        ev.detail = os.str();
        // Report the intent, then clamp: the simulation's own memory stays
        // sound regardless of what the driver asked for.
        ends = sink_.on_violation(ev);
    }
    u64 n = std::min(claimed_len, m.len);
    if (n) {
        std::vector<u8> tmp(n);
        mem_.shared().raw_read(m.dma_addr, n, tmp.data());
        if (auto ev = mem_.write_bytes(m.private_base, tmp, site, nullptr))
            raise_violation(sink_, *ev);
    }
    return ends;
}

void DmaLayer::unmap_streaming(u64 dma_addr, u64 claimed_len, DmaDirection dir,
                               SiteId site) {
    auto it = registry_.find(dma_addr);
    if (it == registry_.end()) {
        ViolationEvent ev;
        ev.kind = EventKind::RejectedUnmap;
        ev.site = site;
        ev.addr = dma_addr;
        ev.detail = "unmap of an address that is not currently mapped";
        raise_violation(sink_, ev);  // warning grade; never throws
        return;
    }
    DmaMapping m = it->second;
    bool ends = false;
    if (dir == DmaDirection::FromDevice || dir == DmaDirection::Bidirectional)
        ends = bounce_to_private(m, claimed_len, site);
    registry_.erase(it);
    for (u32 j = 0; j < m.slot_count; ++j)
        slots_[m.first_slot + j] = false;
    if (ends)
        throw IterationAbort{};
}

void DmaLayer::sync_for_cpu(u64 dma_addr, u64 len, SiteId site,
                            InputStream& stream) {
    auto it = registry_.find(dma_addr);
    if (it == registry_.end()) {
        ViolationEvent ev;
        ev.kind = EventKind::RejectedUnmap;
        ev.site = site;
        ev.addr = dma_addr;
        ev.detail = "sync of an address that is not currently mapped";
        raise_violation(sink_, ev);
        return;
    }
    const DmaMapping& m = it->second;
    // The stream always pays out the full requested length; only the store
    // into the shared side is clamped to the mapping.
    std::vector<u8> fill = stream.take(len);
    injected_bytes_ += len;
    u64 store = std::min(len, m.len);
    mem_.shared().raw_write(m.dma_addr,
                            std::span<const u8>(fill.data(), store));
    if (bounce_to_private(m, len, site))
        throw IterationAbort{};
}

SharedSpace::Region* DmaLayer::alloc_coherent(u64 size) {
    if (size == 0)
        throw EnvError{"zero-length coherent allocation"};
    SharedSpace::Region* r = mem_.shared().alloc_coherent(size);
    if (!r)
        throw EnvError{"shared space exhausted"};
    return r;
}

const DmaMapping* DmaLayer::mapping(u64 dma_addr) const {
    auto it = registry_.find(dma_addr);
    return it == registry_.end() ? nullptr : &it->second;
}

}  // namespace vdf
