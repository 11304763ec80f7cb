#pragma once

#include <deque>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "core/report.hpp"
#include "core/types.hpp"

namespace vdf {

using AllocHandle = u64;  // 0 = allocation failure

// Shared (device-visible) memory. One fixed bounce-pool region plus
// coherent regions handed out to drivers. Regions are page-aligned with a
// guard gap between them, so any straddling access lands on unmapped bytes.
class SharedSpace {
public:
    struct Region {
        u64 base = 0;
        u64 size = 0;
        bool coherent = false;
        bool device_writable = true;
        std::vector<u8> bytes;
    };

    static constexpr u64 kPoolSize = 1 << 20;  // bounce pool default
    static constexpr u64 kRegionGap = 4096;

    SharedSpace();
    void reset();

    Region& pool() { return regions_.begin()->second; }
    // nullptr when the shared window is exhausted.
    Region* alloc_coherent(u64 size);

    Region* find(u64 addr);
    const Region* find(u64 addr) const;
    // Region fully containing [addr, addr+len).
    Region* find_range(u64 addr, u64 len);

    // Raw device-side access; returns false when outside any region.
    bool raw_read(u64 addr, u64 len, u8* out) const;
    bool raw_write(u64 addr, std::span<const u8> src);

private:
    std::map<u64, Region> regions_;  // keyed by base
    u64 next_coherent_ = 0;
};

// Private-memory slab allocator with redzones, free poisoning and a
// quarantine, mirroring the usual sanitizer allocator shape. Allocations are
// placed sparsely so that stray offsets fall into unmapped gaps rather than
// a neighbouring allocation.
class SlabAllocator {
public:
    static constexpr u64 kRedzone = 16;
    static constexpr u64 kQuarantineDepth = 256;
    static constexpr u64 kAllocGap = 4096;
    static constexpr u8 kRedzonePoison = 0xFA;
    static constexpr u8 kFreePoison = 0xFD;
    static constexpr u64 kDefaultCap = 64ull << 20;

    enum class State : u8 { Live, Freed };

    struct Allocation {
        AllocHandle handle = 0;
        u64 base = 0;  // first user byte
        u64 size = 0;
        State state = State::Live;
        SiteId site = 0;
        std::vector<u8> backing;  // [base - kRedzone, base + size + kRedzone)

        u8* user_data() { return backing.data() + kRedzone; }
        const u8* user_data() const { return backing.data() + kRedzone; }
        u64 window_base() const { return base - kRedzone; }
        u64 window_end() const { return base + size + kRedzone; }
    };

    explicit SlabAllocator(u64 cap = kDefaultCap) : cap_(cap) {}

    void reset();

    // Returns the new allocation, or a violation (cap breach) in ev. size 0
    // returns handle 0 with no event, like a failed allocation.
    AllocHandle alloc(u64 size, SiteId site, std::optional<ViolationEvent>& ev);
    // Violation (double/foreign free) in ev; no-op in that case.
    void free(AllocHandle h, SiteId site, std::optional<ViolationEvent>& ev);

    Allocation* by_handle(AllocHandle h);
    const Allocation* by_handle(AllocHandle h) const;
    // Allocation record whose window (redzones included) covers addr; records
    // past quarantine are gone and lookups return null.
    const Allocation* window_containing(u64 addr) const;
    Allocation* window_containing(u64 addr);

    u64 live_bytes() const { return live_bytes_; }
    u64 live_count() const { return live_count_; }
    u64 cap() const { return cap_; }

private:
    std::map<u64, Allocation> by_window_base_;
    std::unordered_map<AllocHandle, u64> handle_index_;
    std::deque<AllocHandle> quarantine_;
    u64 next_base_ = kPrivateBase + 0x10000;
    AllocHandle next_handle_ = 1;
    u64 live_bytes_ = 0;
    u64 live_count_ = 0;
    u64 cap_;
};

enum class AccessKind : u8 { Read, Write };

// Unified view over both address spaces: validity checking, data movement
// and the shared-pointer leak detector.
class GuestMem {
public:
    explicit GuestMem(u64 alloc_cap = SlabAllocator::kDefaultCap)
        : slab_(alloc_cap) {}

    void reset();

    SharedSpace& shared() { return shared_; }
    SlabAllocator& slab() { return slab_; }
    const SlabAllocator& slab() const { return slab_; }

    // Verdict for [addr, addr+len): nullopt when the whole range lies in a
    // live allocation or a shared region. Otherwise classifies the first
    // offending byte: redzone, freed slab memory, or unmapped.
    std::optional<ViolationEvent> check_access(u64 addr, u64 len,
                                               AccessKind kind, SiteId site) const;

    // Checked data movement. On violation returns the event and moves no
    // bytes. Writes into shared memory run the leak detector over every
    // fully-covered 8-byte-aligned word and report hits through `leaks`.
    std::optional<ViolationEvent> read_bytes(u64 addr, u64 len, u8* out,
                                             SiteId site);
    std::optional<ViolationEvent> write_bytes(u64 addr, std::span<const u8> src,
                                              SiteId site,
                                              std::vector<ViolationEvent>* leaks);

    // Warning when a value that looks like a private-space address is about
    // to become device-visible.
    std::optional<ViolationEvent> leak_scan(u64 value, SiteId site) const;

private:
    u8* resolve_ok_range(u64 addr, u64 len);

    SharedSpace shared_;
    SlabAllocator slab_;
};

}  // namespace vdf
