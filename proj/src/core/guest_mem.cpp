#include "core/guest_mem.hpp"

#include <algorithm>
#include <cstring>
#include <sstream>

#include "core/bytes.hpp"

namespace vdf {

// ---------------------------------------------------------------- shared --

SharedSpace::SharedSpace() {
    Region pool;
    pool.base = kSharedBase;
    pool.size = kPoolSize;
    pool.coherent = false;
    pool.bytes.assign(kPoolSize, 0);
    regions_.emplace(pool.base, std::move(pool));
    next_coherent_ = kSharedBase + kPoolSize + kRegionGap;
}

void SharedSpace::reset() {
    // The pool buffer stays; bounce slots are zeroed when handed out, so no
    // iteration can observe a predecessor through it.
    regions_.erase(std::next(regions_.begin()), regions_.end());
    next_coherent_ = kSharedBase + kPoolSize + kRegionGap;
}

SharedSpace::Region* SharedSpace::alloc_coherent(u64 size) {
    if (size == 0)
        return nullptr;
    u64 aligned = (size + 4095) & ~u64{4095};
    if (next_coherent_ + aligned + kRegionGap > kSharedEnd)
        return nullptr;
    Region r;
    r.base = next_coherent_;
    r.size = size;
    r.coherent = true;
    r.bytes.assign(size, 0);
    next_coherent_ += aligned + kRegionGap;
    auto [it, ok] = regions_.emplace(r.base, std::move(r));
    (void)ok;
    return &it->second;
}

SharedSpace::Region* SharedSpace::find(u64 addr) {
    auto it = regions_.upper_bound(addr);
    if (it == regions_.begin())
        return nullptr;
    --it;
    Region& r = it->second;
    return (addr >= r.base && addr < r.base + r.size) ? &r : nullptr;
}

const SharedSpace::Region* SharedSpace::find(u64 addr) const {
    return const_cast<SharedSpace*>(this)->find(addr);
}

SharedSpace::Region* SharedSpace::find_range(u64 addr, u64 len) {
    Region* r = find(addr);
    if (!r || len == 0)
        return r && len == 0 ? r : nullptr;
    if (addr + len > r->base + r->size)
        return nullptr;
    return r;
}

bool SharedSpace::raw_read(u64 addr, u64 len, u8* out) const {
    const Region* r = const_cast<SharedSpace*>(this)->find_range(addr, len);
    if (!r)
        return false;
    std::memcpy(out, r->bytes.data() + (addr - r->base), len);
    return true;
}

bool SharedSpace::raw_write(u64 addr, std::span<const u8> src) {
    Region* r = find_range(addr, src.size());
    if (!r)
        return false;
    std::memcpy(r->bytes.data() + (addr - r->base), src.data(), src.size());
    return true;
}

// ------------------------------------------------------------------ slab --

void SlabAllocator::reset() {
    by_window_base_.clear();
    handle_index_.clear();
    quarantine_.clear();
    next_base_ = kPrivateBase + 0x10000;
    next_handle_ = 1;
    live_bytes_ = 0;
    live_count_ = 0;
}

AllocHandle SlabAllocator::alloc(u64 size, SiteId site,
                                 std::optional<ViolationEvent>& ev) {
    if (size == 0)
        return 0;
    if (live_bytes_ + size > cap_) {
        ViolationEvent e;
        e.kind = EventKind::AllocCapBreach;
        e.site = site;
        e.value = size;
        std::ostringstream os;
        os << "allocation of " << size << " bytes would exceed the "
           << cap_ << "-byte cap (" << live_bytes_ << " live)";
        e.detail = os.str();
        ev = std::move(e);
        return 0;
    }
    Allocation a;
    a.handle = next_handle_++;
    a.base = next_base_ + kRedzone;
    a.size = size;
    a.site = site;
    a.backing.assign(size + 2 * kRedzone, 0);
    std::memset(a.backing.data(), kRedzonePoison, kRedzone);
    std::memset(a.backing.data() + kRedzone + size, kRedzonePoison, kRedzone);
    u64 window_base = a.window_base();
    handle_index_[a.handle] = window_base;
    live_bytes_ += size;
    ++live_count_;
    next_base_ = a.window_end() + kAllocGap;
    AllocHandle h = a.handle;
    by_window_base_.emplace(window_base, std::move(a));
    return h;
}

void SlabAllocator::free(AllocHandle h, SiteId site,
                         std::optional<ViolationEvent>& ev) {
    auto idx = handle_index_.find(h);
    if (idx == handle_index_.end()) {
        ViolationEvent e;
        e.kind = EventKind::ForeignFree;
        e.site = site;
        e.value = h;
        e.detail = "free of a handle this allocator never issued";
        ev = std::move(e);
        return;
    }
    Allocation& a = by_window_base_.at(idx->second);
    if (a.state == State::Freed) {
        ViolationEvent e;
        e.kind = EventKind::DoubleFree;
        e.site = site;
        e.addr = a.base;
        e.detail = "double free";
        ev = std::move(e);
        return;
    }
    a.state = State::Freed;
    std::memset(a.user_data(), kFreePoison, a.size);
    live_bytes_ -= a.size;
    --live_count_;
    quarantine_.push_back(h);
    while (quarantine_.size() > kQuarantineDepth) {
        AllocHandle old = quarantine_.front();
        quarantine_.pop_front();
        auto old_idx = handle_index_.find(old);
        if (old_idx != handle_index_.end()) {
            by_window_base_.erase(old_idx->second);
            handle_index_.erase(old_idx);
        }
    }
}

SlabAllocator::Allocation* SlabAllocator::by_handle(AllocHandle h) {
    auto idx = handle_index_.find(h);
    return idx == handle_index_.end() ? nullptr
                                      : &by_window_base_.at(idx->second);
}

const SlabAllocator::Allocation* SlabAllocator::by_handle(AllocHandle h) const {
    return const_cast<SlabAllocator*>(this)->by_handle(h);
}

SlabAllocator::Allocation* SlabAllocator::window_containing(u64 addr) {
    auto it = by_window_base_.upper_bound(addr);
    if (it == by_window_base_.begin())
        return nullptr;
    --it;
    Allocation& a = it->second;
    return (addr >= a.window_base() && addr < a.window_end()) ? &a : nullptr;
}

const SlabAllocator::Allocation* SlabAllocator::window_containing(
    u64 addr) const {
    return const_cast<SlabAllocator*>(this)->window_containing(addr);
}

// ------------------------------------------------------------- guest mem --

void GuestMem::reset() {
    shared_.reset();
    slab_.reset();
}

std::optional<ViolationEvent> GuestMem::check_access(u64 addr, u64 len,
                                                     AccessKind kind,
                                                     SiteId site) const {
    const char* op = kind == AccessKind::Read ? "read" : "write";
    u64 pos = addr;
    const u64 end = addr + len;
    while (pos < end) {
        if (const auto* region = shared_.find(pos)) {
            pos = std::min(end, region->base + region->size);
            continue;
        }
        if (const auto* a = slab_.window_containing(pos)) {
            if (pos >= a->base && pos < a->base + a->size) {
                if (a->state == SlabAllocator::State::Live) {
                    pos = std::min(end, a->base + a->size);
                    continue;
                }
                ViolationEvent e;
                e.kind = EventKind::UseAfterFree;
                e.site = site;
                e.addr = pos;
                std::ostringstream os;
                os << op << " of freed allocation at offset " << pos - a->base;
                e.detail = os.str();
                return e;
            }
            ViolationEvent e;
            e.kind = EventKind::RedzoneAccess;
            e.site = site;
            e.addr = pos;
            std::ostringstream os;
            os << op << " hit a redzone byte "
               << (pos < a->base ? "before" : "after") << " a "
               << a->size << "-byte allocation";
            e.detail = os.str();
            return e;
        }
        ViolationEvent e;
        e.kind = EventKind::UnmappedAccess;
        e.site = site;
        e.addr = pos;
        std::ostringstream os;
        os << op << " of unmapped address 0x" << std::hex << pos;
        e.detail = os.str();
        return e;
    }
    return std::nullopt;
}

// Valid ranges never span two objects: allocations carry redzones and shared
// regions are gap-separated, so resolving the first byte is enough.
u8* GuestMem::resolve_ok_range(u64 addr, u64 len) {
    if (auto* region = shared_.find_range(addr, len))
        return region->bytes.data() + (addr - region->base);
    if (auto* a = slab_.window_containing(addr))
        return a->user_data() + (addr - a->base);
    return nullptr;
}

std::optional<ViolationEvent> GuestMem::read_bytes(u64 addr, u64 len, u8* out,
                                                   SiteId site) {
    if (auto ev = check_access(addr, len, AccessKind::Read, site))
        return ev;
    if (len == 0)
        return std::nullopt;
    std::memcpy(out, resolve_ok_range(addr, len), len);
    return std::nullopt;
}

std::optional<ViolationEvent> GuestMem::write_bytes(
    u64 addr, std::span<const u8> src, SiteId site,
    std::vector<ViolationEvent>* leaks) {
    if (auto ev = check_access(addr, src.size(), AccessKind::Write, site))
        return ev;
    if (src.empty())
        return std::nullopt;
    std::memcpy(resolve_ok_range(addr, src.size()), src.data(), src.size());
    if (leaks && addr_space(addr) == AddrSpace::Shared) {
        u64 first = (addr + 7) & ~u64{7};
        for (u64 a = first; a + 8 <= addr + src.size(); a += 8) {
            u64 word = read_le(
                std::span<const u8>(src.data() + (a - addr), 8), 8);
            if (auto ev = leak_scan(word, site))
                leaks->push_back(std::move(*ev));
        }
    }
    return std::nullopt;
}

std::optional<ViolationEvent> GuestMem::leak_scan(u64 value, SiteId site) const {
    if (addr_space(value) != AddrSpace::Private)
        return std::nullopt;
    ViolationEvent e;
    e.kind = EventKind::SharedPointerLeak;
    e.site = site;
    e.value = value;
    if (const auto* a = slab_.window_containing(value)) {
        std::ostringstream os;
        os << "private pointer into "
           << (a->state == SlabAllocator::State::Live ? "live" : "freed")
           << " allocation (size " << a->size << ") exposed to the device";
        e.detail = os.str();
    } else {
        e.detail = "private-range value exposed to the device";
    }
    return e;
}

}  // namespace vdf
