#include "core/env.hpp"

#include <sstream>

namespace vdf {

void Env::begin_iteration(InputStream* stream, CoverageMap* cov,
                          DeviceInstance* device, bool delay_reduction,
                          const std::array<bool, kArchetypeCount>& toggles) {
    clock_.reset();
    sched_.reset();
    mem_.reset();
    dma_.reset();
    stream_ = stream;
    cov_ = cov;
    device_ = device;
    delay_reduction_ = delay_reduction;
    toggles_ = toggles;
}

// ---------------------------------------------------------------- memory --

AllocHandle Env::galloc(u64 size, SiteId site) {
    std::optional<ViolationEvent> ev;
    AllocHandle h = mem_.slab().alloc(size, site, ev);
    if (ev)
        raise_violation(sink_, *ev);
    return h;
}

void Env::gfree(AllocHandle h, SiteId site) {
    std::optional<ViolationEvent> ev;
    mem_.slab().free(h, site, ev);
    if (ev)
        raise_violation(sink_, *ev);
}

u64 Env::alloc_base(AllocHandle h) const {
    const auto* a = mem_.slab().by_handle(h);
    return a ? a->base : 0;
}

std::vector<u8> Env::mem_read(u64 addr, u64 len, SiteId site) {
    // Device-writable coherent memory is continuously exposed to the device;
    // in passthrough mode every read of it observes fresh device data.
    if (device_ && device_->config().mode == SimMode::Passthrough) {
        auto* region = mem_.shared().find_range(addr, len);
        if (region && region->coherent && region->device_writable) {
            std::vector<u8> bytes = stream_->take(len);
            mem_.shared().raw_write(addr, bytes);
            dma_.note_injected(len);
            return bytes;
        }
    }
    std::vector<u8> out(len);
    if (auto ev = mem_.read_bytes(addr, len, out.data(), site))
        raise_violation(sink_, *ev);
    return out;
}

void Env::mem_write(u64 addr, std::span<const u8> bytes, SiteId site) {
    std::vector<ViolationEvent> leaks;
    if (auto ev = mem_.write_bytes(addr, bytes, site, &leaks))
        raise_violation(sink_, *ev);
    for (const auto& leak : leaks)
        raise_violation(sink_, leak);  // warning grade
}

u64 Env::read_u(u64 addr, u32 width, SiteId site) {
    auto bytes = mem_read(addr, width, site);
    return read_le(bytes, width);
}

void Env::write_u(u64 addr, u32 width, u64 value, SiteId site) {
    u8 buf[8];
    write_le(std::span<u8>(buf, width), width, value);
    mem_write(addr, std::span<const u8>(buf, width), site);
}

// ------------------------------------------------------------------ time --

void Env::delay_ns(u64 ns) {
    if (delay_reduction_)
        return;  // returns immediately; virtual time untouched
    sched_.sleep_ns(ns);
}

bool Env::time_elapsed(u64 deadline_ns) const {
    if (delay_reduction_)
        return true;  // queried time is always reported as past
    return clock_.now_ns() >= deadline_ns;
}

void Env::queue_delayed_work(u64 delay_ns, std::function<void()> fn) {
    sched_.post_delayed_work(delay_reduction_ ? 0 : delay_ns, std::move(fn),
                             "delayed-work");
}

WaitStatus Env::wait_event(std::function<bool()> pred,
                           std::optional<u64> timeout_ns, SiteId site,
                           const char* reason) {
    return sched_.wait_event(std::move(pred), timeout_ns, site, reason);
}

void Env::spawn_worker(std::function<void()> fn, std::string name) {
    sched_.spawn(std::move(fn), std::move(name));
}

// ------------------------------------------------------------- registers --

u64 Env::io_access(RegionKind kind, u32 region, u64 off, u32 width,
                   std::optional<u64> write_value, SiteId site) {
    const RegionCfg* r = device_ ? device_->region(kind, region) : nullptr;
    if (!r || width == 0 || width > 8 || off + width > r->size) {
        ViolationEvent ev;
        ev.kind = EventKind::DeviceRegionOob;
        ev.site = site;
        ev.addr = off;
        std::ostringstream os;
        os << (kind == RegionKind::Mmio ? "mmio" : "pio") << " access at offset "
           << off << " width " << width << " outside region " << region;
        ev.detail = os.str();
        raise_violation(sink_, ev);
        return 0;
    }
    if (!write_value)
        return device_->io_read(kind, region, off, width);

    // Values leaving the guest through registers are leak-checked at word
    // granularity before the device model sees them.
    if (width == 8) {
        if (auto ev = mem_.leak_scan(*write_value, site))
            raise_violation(sink_, *ev);
    }
    device_->io_write(kind, region, off, width, *write_value);
    // Doorbells count as a suspension point: handlers the write produced run
    // before this task continues.
    if (sched_.deliveries_pending() && sched_.in_task())
        sched_.yield_now();
    return 0;
}

u64 Env::mmio_read(u32 region, u64 off, u32 width, SiteId site) {
    return io_access(RegionKind::Mmio, region, off, width, std::nullopt, site);
}

void Env::mmio_write(u32 region, u64 off, u32 width, u64 value, SiteId site) {
    io_access(RegionKind::Mmio, region, off, width, value, site);
}

u64 Env::pio_in(u32 region, u64 off, u32 width, SiteId site) {
    return io_access(RegionKind::Pio, region, off, width, std::nullopt, site);
}

void Env::pio_out(u32 region, u64 off, u32 width, u64 value, SiteId site) {
    io_access(RegionKind::Pio, region, off, width, value, site);
}

// ------------------------------------------------------------------- DMA --

u64 Env::map_streaming(u64 private_base, u64 len, DmaDirection dir,
                       SiteId site) {
    return dma_.map_streaming(private_base, len, dir, site);
}

void Env::unmap_streaming(u64 dma_addr, u64 claimed_len, DmaDirection dir,
                          SiteId site) {
    dma_.unmap_streaming(dma_addr, claimed_len, dir, site);
}

void Env::sync_for_cpu(u64 dma_addr, u64 len, SiteId site) {
    dma_.sync_for_cpu(dma_addr, len, site, *stream_);
}

u64 Env::alloc_coherent(u64 size, SiteId site) {
    (void)site;
    return dma_.alloc_coherent(size)->base;
}

std::vector<u8> Env::coherent_read(u64 base, u64 off, u64 n, SiteId site) {
    return mem_read(base + off, n, site);
}

void Env::coherent_write(u64 base, u64 off, std::span<const u8> bytes,
                         SiteId site) {
    mem_write(base + off, bytes, site);
}

// --------------------------------------------------------------- control --

void Env::guest_bug(SiteId site, const char* msg) {
    ViolationEvent ev;
    ev.kind = EventKind::GuestBug;
    ev.site = site;
    ev.detail = msg;
    raise_violation(sink_, ev);
    // Control never returns to the caller after a BUG, whatever the sink said.
    throw IterationAbort{};
}

u64 Env::guest_div(u64 num, u64 den, SiteId site) {
    if (den == 0) {
        ViolationEvent ev;
        ev.kind = EventKind::DivisionByZero;
        ev.site = site;
        ev.detail = "division by a device-supplied zero";
        raise_violation(sink_, ev);
        throw IterationAbort{};
    }
    return num / den;
}

}  // namespace vdf
