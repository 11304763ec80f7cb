#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/clock.hpp"
#include "core/coverage.hpp"
#include "core/device.hpp"
#include "core/dma.hpp"
#include "core/driver.hpp"
#include "core/guest_mem.hpp"
#include "core/input_stream.hpp"
#include "core/sched.hpp"
#include "core/task.hpp"

namespace vdf {

// The model guest-kernel environment one iteration runs inside: memory,
// virtual time, the cooperative scheduler, the DMA layer and the device.
// This is also the driver-facing ABI; drivers get an Env& and nothing else.
//
// Delay policy: with reduction on, delays return immediately without
// advancing virtual time, elapsed-time queries always report expiry and
// delayed work is queued with zero delay. Wait-event timeouts are never
// elided.
class Env {
public:
    Env(StackPool& pool, ViolationSink& sink)
        : sched_(pool, clock_), dma_(mem_, sink), sink_(sink) {}

    // -- iteration lifecycle (engine side) --
    void begin_iteration(InputStream* stream, CoverageMap* cov,
                         DeviceInstance* device, bool delay_reduction,
                         const std::array<bool, kArchetypeCount>& toggles);

    Scheduler& sched() { return sched_; }
    VirtualClock& clock() { return clock_; }
    GuestMem& mem() { return mem_; }
    DmaLayer& dma_layer() { return dma_; }
    DeviceInstance* device() { return device_; }
    InputStream& stream() { return *stream_; }
    ViolationSink& sink() { return sink_; }

    // ------------------------------------------------- driver-facing ABI --

    void cov(SiteId site) {
        if (cov_)
            cov_->hit(site);
    }
    bool toggle(BugArchetype a) const {
        return toggles_[static_cast<size_t>(a)];
    }

    // memory
    AllocHandle galloc(u64 size, SiteId site);
    void gfree(AllocHandle h, SiteId site);
    u64 alloc_base(AllocHandle h) const;
    std::vector<u8> mem_read(u64 addr, u64 len, SiteId site);
    void mem_write(u64 addr, std::span<const u8> bytes, SiteId site);
    u64 read_u(u64 addr, u32 width, SiteId site);
    void write_u(u64 addr, u32 width, u64 value, SiteId site);

    // time
    u64 now_ns() const { return clock_.now_ns(); }
    void delay_ns(u64 ns);
    bool time_elapsed(u64 deadline_ns) const;
    void queue_delayed_work(u64 delay_ns, std::function<void()> fn);
    WaitStatus wait_event(std::function<bool()> pred,
                          std::optional<u64> timeout_ns, SiteId site,
                          const char* reason);
    void yield() { sched_.yield_now(); }
    void spawn_worker(std::function<void()> fn, std::string name);

    // device registers
    u64 mmio_read(u32 region, u64 off, u32 width, SiteId site);
    void mmio_write(u32 region, u64 off, u32 width, u64 value, SiteId site);
    u64 pio_in(u32 region, u64 off, u32 width, SiteId site);
    void pio_out(u32 region, u64 off, u32 width, u64 value, SiteId site);

    // DMA
    u64 map_streaming(u64 private_base, u64 len, DmaDirection dir, SiteId site);
    void unmap_streaming(u64 dma_addr, u64 claimed_len, DmaDirection dir,
                         SiteId site);
    void sync_for_cpu(u64 dma_addr, u64 len, SiteId site);
    // Returns the region base (also its bus address; coherent regions live in
    // shared space).
    u64 alloc_coherent(u64 size, SiteId site);
    std::vector<u8> coherent_read(u64 base, u64 off, u64 n, SiteId site);
    void coherent_write(u64 base, u64 off, std::span<const u8> bytes,
                        SiteId site);

    // control
    [[noreturn]] void guest_bug(SiteId site, const char* msg);
    u64 guest_div(u64 num, u64 den, SiteId site);

    u64 injected_bytes() const { return dma_.injected_bytes(); }

private:
    u64 io_access(RegionKind kind, u32 region, u64 off, u32 width,
                  std::optional<u64> write_value, SiteId site);

    VirtualClock clock_;
    Scheduler sched_;
    GuestMem mem_;
    DmaLayer dma_;
    ViolationSink& sink_;
    InputStream* stream_ = nullptr;
    CoverageMap* cov_ = nullptr;
    DeviceInstance* device_ = nullptr;
    bool delay_reduction_ = true;
    std::array<bool, kArchetypeCount> toggles_{};
};

}  // namespace vdf
