// The seeded-bug model drivers. Each hosts one fault archetype behind a
// toggle; the hardened variant of a driver compiles the missing validation
// in and must survive arbitrary device behavior.

#include <algorithm>

#include "core/env.hpp"
#include "drivers/catalog.hpp"

namespace vdf {
namespace {

// ------------------------------------------------------------------------
// vring-consumer: emulated-virtio consumer that trusts the device-written
// used.len and passes it to the DMA unmap as the bounce length.
// ------------------------------------------------------------------------

namespace vc {
constexpr SiteId kProbe = 100;
constexpr SiteId kBadMagic = 101;
constexpr SiteId kBadVersion = 102;
constexpr SiteId kNoVersion1 = 103;
constexpr SiteId kQueueSetup = 104;
constexpr SiteId kOp = 105;
constexpr SiteId kMap = 106;
constexpr SiteId kIrq = 107;
constexpr SiteId kRxDone = 108;
constexpr SiteId kRxTimeout = 109;
constexpr SiteId kUnmap = 110;
constexpr SiteId kRemove = 111;
constexpr u32 kQueueSize = 8;
}  // namespace vc

class VringConsumerDriver final : public ModelDriver {
public:
    VringConsumerDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        namespace m = vring::mmio;
        env.cov(vc::kProbe);
        if (env.mmio_read(0, m::kMagic, 4, vc::kProbe) != m::kMagicValue) {
            env.cov(vc::kBadMagic);
            return -1;
        }
        if (env.mmio_read(0, m::kVersion, 4, vc::kProbe) != 2) {
            env.cov(vc::kBadVersion);
            return -1;
        }
        env.mmio_write(0, m::kStatus, 4,
                       m::kStatusAcknowledge | m::kStatusDriver, vc::kProbe);
        env.mmio_write(0, m::kDeviceFeaturesSel, 4, 1, vc::kProbe);
        u64 feat_hi = env.mmio_read(0, m::kDeviceFeatures, 4, vc::kProbe);
        if (!(feat_hi & 1)) {  // VERSION_1 is bit 32
            env.cov(vc::kNoVersion1);
            return -1;
        }
        env.mmio_write(0, m::kDriverFeaturesSel, 4, 1, vc::kProbe);
        env.mmio_write(0, m::kDriverFeatures, 4, 1, vc::kProbe);
        env.mmio_write(0, m::kStatus, 4,
                       m::kStatusAcknowledge | m::kStatusDriver |
                           m::kStatusFeaturesOk,
                       vc::kProbe);

        env.cov(vc::kQueueSetup);
        env.mmio_write(0, m::kQueueSel, 4, 0, vc::kQueueSetup);
        u64 num_max = env.mmio_read(0, m::kQueueNumMax, 4, vc::kQueueSetup);
        if (num_max < vc::kQueueSize)
            return -1;
        env.mmio_write(0, m::kQueueNum, 4, vc::kQueueSize, vc::kQueueSetup);

        desc_ = env.alloc_coherent(vring::kDescSize * vc::kQueueSize,
                                   vc::kQueueSetup);
        avail_ = env.alloc_coherent(vring::avail_size(vc::kQueueSize),
                                    vc::kQueueSetup);
        used_ = env.alloc_coherent(vring::used_size(vc::kQueueSize),
                                   vc::kQueueSetup);
        env.mmio_write(0, m::kQueueDescLow, 4, desc_ & 0xFFFFFFFF, vc::kQueueSetup);
        env.mmio_write(0, m::kQueueDescHigh, 4, desc_ >> 32, vc::kQueueSetup);
        env.mmio_write(0, m::kQueueDriverLow, 4, avail_ & 0xFFFFFFFF, vc::kQueueSetup);
        env.mmio_write(0, m::kQueueDriverHigh, 4, avail_ >> 32, vc::kQueueSetup);
        env.mmio_write(0, m::kQueueDeviceLow, 4, used_ & 0xFFFFFFFF, vc::kQueueSetup);
        env.mmio_write(0, m::kQueueDeviceHigh, 4, used_ >> 32, vc::kQueueSetup);
        env.mmio_write(0, m::kQueueReady, 4, 1, vc::kQueueSetup);
        env.mmio_write(0, m::kStatus, 4,
                       m::kStatusAcknowledge | m::kStatusDriver |
                           m::kStatusFeaturesOk | m::kStatusDriverOk,
                       vc::kProbe);
        probed_ = true;
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        namespace m = vring::mmio;
        (void)op;
        (void)payload;
        env.cov(vc::kOp);
        constexpr u64 kBufLen = 0x1000;
        AllocHandle buf = env.galloc(kBufLen, vc::kOp);
        u64 dma = env.map_streaming(env.alloc_base(buf), kBufLen,
                                    DmaDirection::FromDevice, vc::kMap);

        // Post one device-writable descriptor and ring the doorbell.
        u16 head = static_cast<u16>(avail_idx_ % vc::kQueueSize);
        u8 raw[vring::kDescSize];
        vring::encode_desc(raw, {dma, kBufLen, vring::kDescFlagWrite, 0});
        env.coherent_write(desc_, vring::kDescSize * head, raw, vc::kOp);
        env.write_u(avail_ + vring::avail_ring_off(avail_idx_ % vc::kQueueSize),
                    2, head, vc::kOp);
        ++avail_idx_;
        env.write_u(avail_ + 2, 2, avail_idx_, vc::kOp);
        rx_ready_ = false;
        env.mmio_write(0, m::kQueueNotify, 4, 0, vc::kOp);

        auto st = env.wait_event([this] { return rx_ready_; }, u64{100000},
                                 vc::kOp, "vring rx");
        if (st == WaitStatus::TimedOut) {
            env.cov(vc::kRxTimeout);
            env.unmap_streaming(dma, kBufLen, DmaDirection::FromDevice,
                                vc::kUnmap);
            env.gfree(buf, vc::kRxTimeout);
            return {0xFF};
        }
        env.cov(vc::kRxDone);
        u64 len = rx_len_;
        if (hardened_ || !env.toggle(BugArchetype::SwiotlbLenOverflow))
            len = std::min<u64>(len, kBufLen);
        // Bounce back what the device claims arrived.
        env.unmap_streaming(dma, len, DmaDirection::FromDevice, vc::kUnmap);
        auto data = env.mem_read(env.alloc_base(buf), 8, vc::kRxDone);
        env.gfree(buf, vc::kRxDone);
        return data;
    }

    void irq_handler(Env& env, u32 line) override {
        namespace m = vring::mmio;
        (void)line;
        env.cov(vc::kIrq);
        if (!probed_)
            return;
        u64 isr = env.mmio_read(0, m::kInterruptStatus, 4, vc::kIrq);
        env.mmio_write(0, m::kInterruptAck, 4, isr, vc::kIrq);
        u16 uidx = static_cast<u16>(
            read_le(env.coherent_read(used_, 2, 2, vc::kIrq), 2));
        if (uidx != last_used_) {
            u32 slot = last_used_ % vc::kQueueSize;
            auto entry =
                env.coherent_read(used_, vring::used_ring_off(slot), 8, vc::kIrq);
            rx_id_ = static_cast<u32>(read_le({entry.data(), 4}, 4));
            rx_len_ = static_cast<u32>(read_le({entry.data() + 4, 4}, 4));
            ++last_used_;
            rx_ready_ = true;
        }
    }

    void remove(Env& env) override {
        namespace m = vring::mmio;
        env.cov(vc::kRemove);
        if (probed_)
            env.mmio_write(0, m::kStatus, 4, 0, vc::kRemove);
        probed_ = false;
    }

private:
    const DriverInfo& info_;
    bool hardened_;
    bool probed_ = false;
    u64 desc_ = 0, avail_ = 0, used_ = 0;
    u16 avail_idx_ = 0;
    u16 last_used_ = 0;
    u32 rx_id_ = 0;
    u32 rx_len_ = 0;
    bool rx_ready_ = false;
};

DriverInfo vring_consumer_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "vring-consumer-hardened" : "vring-consumer";
    info.bus = BusKind::Virtio;
    info.match_virtio_id = 1;
    info.default_device.bus = BusKind::Virtio;
    info.default_device.mode = SimMode::Emulated;
    info.default_device.vendor_id = 0x1AF4;
    info.default_device.virtio_device_id = 1;
    info.default_device.regions = {{0, 0x300, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.default_device.adversarial_used_len = true;
    info.sites = {vc::kProbe, vc::kBadMagic, vc::kBadVersion, vc::kNoVersion1,
                  vc::kQueueSetup, vc::kOp, vc::kMap, vc::kIrq, vc::kRxDone,
                  vc::kRxTimeout, vc::kUnmap, vc::kRemove};
    info.archetypes = {BugArchetype::SwiotlbLenOverflow};
    return info;
}

// ------------------------------------------------------------------------
// netdesc: passthrough NIC that publishes the private rx-buffer pointer in
// a device-visible descriptor ring and dereferences whatever comes back.
// ------------------------------------------------------------------------

namespace nd {
constexpr SiteId kProbe = 200;
constexpr SiteId kPublish = 201;
constexpr SiteId kOp = 202;
constexpr SiteId kIrq = 203;
constexpr SiteId kDeref = 204;
constexpr SiteId kLookup = 205;
constexpr SiteId kTimeout = 206;
constexpr SiteId kRemove = 207;
constexpr u64 kRingSlots = 16;
}  // namespace nd

class NetdescDriver final : public ModelDriver {
public:
    NetdescDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(nd::kProbe);
        ring_ = env.alloc_coherent(nd::kRingSlots * 8, nd::kProbe);
        rx_buf_ = env.galloc(2048, nd::kProbe);
        u8 slot[8];
        if (!hardened_ && env.toggle(BugArchetype::SharedPointerDeref)) {
            env.cov(nd::kPublish);
            // Descriptor carries the kernel pointer itself.
            write_le(slot, 8, env.alloc_base(rx_buf_));
        } else {
            // Descriptor carries an index; the pointer stays private.
            write_le(slot, 8, 0);
        }
        env.coherent_write(ring_, 0, slot, nd::kPublish);
        probed_ = true;
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        (void)payload;
        env.cov(nd::kOp);
        rx_done_ = false;
        env.mmio_write(0, 0x20, 4, 1, nd::kOp);  // rx doorbell
        auto st = env.wait_event([this] { return rx_done_; }, u64{100000},
                                 nd::kOp, "netdesc rx");
        if (st == WaitStatus::TimedOut) {
            env.cov(nd::kTimeout);
            return {0xFF};
        }
        return {0x00};
    }

    void irq_handler(Env& env, u32 line) override {
        (void)line;
        env.cov(nd::kIrq);
        if (!probed_)
            return;
        u64 desc = read_le(env.coherent_read(ring_, 0, 8, nd::kIrq), 8);
        if (!hardened_ && env.toggle(BugArchetype::SharedPointerDeref)) {
            if (desc != 0)
                env.mem_read(desc, 4, nd::kDeref);  // device-controlled pointer
        } else {
            env.cov(nd::kLookup);
            if (desc < nd::kRingSlots)
                env.mem_read(env.alloc_base(rx_buf_), 4, nd::kLookup);
        }
        rx_done_ = true;
    }

    void remove(Env& env) override {
        env.cov(nd::kRemove);
        if (probed_)
            env.gfree(rx_buf_, nd::kRemove);
        probed_ = false;
    }

private:
    const DriverInfo& info_;
    bool hardened_;
    bool probed_ = false;
    u64 ring_ = 0;
    AllocHandle rx_buf_ = 0;
    bool rx_done_ = false;
};

DriverInfo netdesc_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "netdesc-hardened" : "netdesc";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x15AD;
    info.match_device = 0x07B0;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x15AD;
    info.default_device.device_id = 0x07B0;
    info.default_device.regions = {{0, 0x1000, RegionKind::Mmio}};
    info.default_device.irq_lines = 2;
    info.sites = {nd::kProbe, nd::kPublish, nd::kOp, nd::kIrq,
                  nd::kDeref, nd::kLookup, nd::kTimeout, nd::kRemove};
    info.archetypes = {BugArchetype::SharedPointerDeref};
    return info;
}

// ------------------------------------------------------------------------
// probe-err: trusts a device config value during init, and on the failure
// path frees its state but reports success anyway.
// ------------------------------------------------------------------------

namespace pe {
constexpr SiteId kProbe = 300;
constexpr SiteId kLowMtu = 301;
constexpr SiteId kRemove = 302;
constexpr u16 kMinMtu = 68;
}  // namespace pe

class ProbeErrDriver final : public ModelDriver {
public:
    ProbeErrDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        namespace m = vring::mmio;
        env.cov(pe::kProbe);
        if (env.mmio_read(0, m::kMagic, 4, pe::kProbe) != m::kMagicValue)
            return -1;
        state_ = env.galloc(256, pe::kProbe);
        u16 mtu = static_cast<u16>(env.mmio_read(0, m::kConfig + 8, 2, pe::kProbe));
        if (mtu < pe::kMinMtu) {
            env.cov(pe::kLowMtu);
            env.gfree(state_, pe::kLowMtu);
            if (hardened_ || !env.toggle(BugArchetype::ProbeErrUaf))
                return -1;
            return 0;  // forgot to set the error code
        }
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        env.cov(pe::kProbe);
        return {payload.begin(), payload.end()};
    }

    void irq_handler(Env&, u32) override {}

    void remove(Env& env) override {
        env.cov(pe::kRemove);
        // Tear down through the state structure; stale handles from a lying
        // probe make this a use-after-free.
        env.read_u(env.alloc_base(state_), 8, pe::kRemove);
        env.gfree(state_, pe::kRemove);
    }

private:
    const DriverInfo& info_;
    bool hardened_;
    AllocHandle state_ = 0;
};

DriverInfo probe_err_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "probe-err-hardened" : "probe-err";
    info.bus = BusKind::Virtio;
    info.match_virtio_id = 1;
    info.default_device.bus = BusKind::Virtio;
    info.default_device.mode = SimMode::Emulated;
    info.default_device.vendor_id = 0x1AF4;
    info.default_device.virtio_device_id = 1;
    info.default_device.regions = {{0, 0x300, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {pe::kProbe, pe::kLowMtu, pe::kRemove};
    info.archetypes = {BugArchetype::ProbeErrUaf};
    return info;
}

// ------------------------------------------------------------------------
// idx-lookup: uses a device-supplied index into its descriptor table
// without a bounds check.
// ------------------------------------------------------------------------

namespace il {
constexpr SiteId kProbe = 400;
constexpr SiteId kOp = 401;
constexpr SiteId kIrq = 402;
constexpr SiteId kLookup = 403;
constexpr SiteId kReject = 404;
constexpr SiteId kRemove = 405;
constexpr u64 kEntries = 64;
constexpr u64 kEntrySize = 64;
}  // namespace il

class IdxLookupDriver final : public ModelDriver {
public:
    IdxLookupDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(il::kProbe);
        table_ = env.galloc(il::kEntries * il::kEntrySize, il::kProbe);
        probed_ = true;
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        (void)payload;
        env.cov(il::kOp);
        done_ = false;
        env.mmio_write(0, 0x0, 4, 1, il::kOp);
        auto st = env.wait_event([this] { return done_; }, u64{50000}, il::kOp,
                                 "idx completion");
        return {st == WaitStatus::Woken ? u8{0} : u8{0xFF}};
    }

    void irq_handler(Env& env, u32 line) override {
        (void)line;
        env.cov(il::kIrq);
        if (!probed_)
            return;
        u16 idx = static_cast<u16>(env.mmio_read(0, 0x10, 2, il::kIrq));
        if (hardened_ || !env.toggle(BugArchetype::UnvalidatedIndex)) {
            if (idx >= il::kEntries) {
                env.cov(il::kReject);
                done_ = true;
                return;
            }
        }
        env.read_u(env.alloc_base(table_) + u64{idx} * il::kEntrySize + 32, 4,
                   il::kLookup);
        done_ = true;
    }

    void remove(Env& env) override {
        env.cov(il::kRemove);
        if (probed_)
            env.gfree(table_, il::kRemove);
        probed_ = false;
    }

private:
    const DriverInfo& info_;
    bool hardened_;
    bool probed_ = false;
    AllocHandle table_ = 0;
    bool done_ = false;
};

DriverInfo idx_lookup_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "idx-lookup-hardened" : "idx-lookup";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x10EC;
    info.match_device = 0x8139;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x10EC;
    info.default_device.device_id = 0x8139;
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio},
                                   {0, 0x40, RegionKind::Pio}};
    info.default_device.irq_lines = 1;
    info.sites = {il::kProbe, il::kOp, il::kIrq, il::kLookup, il::kReject,
                  il::kRemove};
    info.archetypes = {BugArchetype::UnvalidatedIndex};
    return info;
}

// ------------------------------------------------------------------------
// blocker: waits on a completion only an interrupt can signal; the hardened
// variant bounds the wait.
// ------------------------------------------------------------------------

namespace bl {
constexpr SiteId kProbe = 500;
constexpr SiteId kOp = 501;
constexpr SiteId kWait = 502;
constexpr SiteId kIrq = 503;
constexpr SiteId kRemove = 504;
}  // namespace bl

class BlockerDriver final : public ModelDriver {
public:
    BlockerDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(bl::kProbe);
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        (void)payload;
        env.cov(bl::kOp);
        done_ = false;
        env.mmio_write(0, 0x0, 4, 1, bl::kOp);
        if (hardened_ || !env.toggle(BugArchetype::DeadlockWait)) {
            auto st = env.wait_event([this] { return done_; }, u64{1000000},
                                     bl::kWait, "bounded completion");
            return {st == WaitStatus::Woken ? u8{0} : u8{0xFF}};
        }
        // No timeout: if the device never answers, this thread is parked for
        // good.
        env.wait_event([this] { return done_; }, std::nullopt, bl::kWait,
                       "unbounded completion");
        return {0};
    }

    void irq_handler(Env& env, u32 line) override {
        (void)line;
        env.cov(bl::kIrq);
        done_ = true;
    }

    void remove(Env& env) override { env.cov(bl::kRemove); }

private:
    const DriverInfo& info_;
    bool hardened_;
    bool done_ = false;
};

DriverInfo blocker_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "blocker-hardened" : "blocker";
    info.bus = BusKind::Platform;
    info.match_name = "sim-blocker";
    info.default_device.bus = BusKind::Platform;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.name = "sim-blocker";
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {bl::kProbe, bl::kOp, bl::kWait, bl::kIrq, bl::kRemove};
    info.archetypes = {BugArchetype::DeadlockWait};
    return info;
}

// ------------------------------------------------------------------------
// hogger: allocates device-supplied lengths; the seeded variant never frees
// and never bounds them.
// ------------------------------------------------------------------------

namespace hg {
constexpr SiteId kProbe = 600;
constexpr SiteId kOp = 601;
constexpr SiteId kAlloc = 602;
constexpr SiteId kReject = 603;
constexpr SiteId kRemove = 604;
}  // namespace hg

class HoggerDriver final : public ModelDriver {
public:
    HoggerDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(hg::kProbe);
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        (void)payload;
        env.cov(hg::kOp);
        u64 len = env.mmio_read(0, 0x0, 4, hg::kOp);
        if (hardened_ || !env.toggle(BugArchetype::UnboundedAlloc)) {
            if (len == 0 || len > 0x10000) {
                env.cov(hg::kReject);
                return {0xFF};
            }
            AllocHandle h = env.galloc(len, hg::kAlloc);
            env.gfree(h, hg::kAlloc);
            return {0};
        }
        if (len == 0)
            return {0xFF};
        AllocHandle h = env.galloc(len, hg::kAlloc);
        if (h)
            kept_.push_back(h);  // cleanup deferred to remove; grows unbounded
        return {0};
    }

    void irq_handler(Env&, u32) override {}

    void remove(Env& env) override {
        env.cov(hg::kRemove);
        for (AllocHandle h : kept_)
            env.gfree(h, hg::kRemove);
        kept_.clear();
    }

private:
    const DriverInfo& info_;
    bool hardened_;
    std::vector<AllocHandle> kept_;
};

DriverInfo hogger_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "hogger-hardened" : "hogger";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x8086;
    info.match_device = 0x100E;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x8086;
    info.default_device.device_id = 0x100E;
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {hg::kProbe, hg::kOp, hg::kAlloc, hg::kReject, hg::kRemove};
    info.archetypes = {BugArchetype::UnboundedAlloc};
    return info;
}

// ------------------------------------------------------------------------
// asserter: BUGs out on an unexpected device state byte.
// ------------------------------------------------------------------------

namespace as {
constexpr SiteId kProbe = 700;
constexpr SiteId kOp = 701;
constexpr SiteId kBadState = 702;
constexpr SiteId kBug = 703;
constexpr SiteId kRemove = 704;
constexpr u8 kPoisonState = 0xEE;
}  // namespace as

class AsserterDriver final : public ModelDriver {
public:
    AsserterDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(as::kProbe);
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        (void)payload;
        env.cov(as::kOp);
        u8 state = static_cast<u8>(env.mmio_read(0, 0x4, 1, as::kOp));
        if (state == as::kPoisonState) {
            env.cov(as::kBadState);
            if (hardened_ || !env.toggle(BugArchetype::AssertionBug))
                return {0xFD};
            env.guest_bug(as::kBug, "device state machine in impossible state");
        }
        return {state};
    }

    void irq_handler(Env&, u32) override {}

    void remove(Env& env) override { env.cov(as::kRemove); }

private:
    const DriverInfo& info_;
    bool hardened_;
};

DriverInfo asserter_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "asserter-hardened" : "asserter";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x104C;
    info.match_device = 0xAC10;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x104C;
    info.default_device.device_id = 0xAC10;
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {as::kProbe, as::kOp, as::kBadState, as::kBug, as::kRemove};
    info.archetypes = {BugArchetype::AssertionBug};
    return info;
}

// ------------------------------------------------------------------------
// divider: computes a rate from a device-supplied u16 divisor.
// ------------------------------------------------------------------------

namespace dv {
constexpr SiteId kProbe = 800;
constexpr SiteId kOp = 801;
constexpr SiteId kIrq = 802;
constexpr SiteId kDiv = 803;
constexpr SiteId kZero = 804;
constexpr SiteId kRemove = 805;
}  // namespace dv

class DividerDriver final : public ModelDriver {
public:
    DividerDriver(const DriverInfo& info, bool hardened)
        : info_(info), hardened_(hardened) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(dv::kProbe);
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        env.cov(dv::kOp);
        total_bytes_ += payload.size() + 1;
        done_ = false;
        env.mmio_write(0, 0x0, 4, 1, dv::kOp);
        auto st = env.wait_event([this] { return done_; }, u64{50000}, dv::kOp,
                                 "rate completion");
        if (st == WaitStatus::TimedOut)
            return {0xFF};
        return {static_cast<u8>(rate_)};
    }

    void irq_handler(Env& env, u32 line) override {
        (void)line;
        env.cov(dv::kIrq);
        u16 interval = static_cast<u16>(env.mmio_read(0, 0x8, 2, dv::kIrq));
        if (hardened_ || !env.toggle(BugArchetype::DivByZero)) {
            if (interval == 0) {
                env.cov(dv::kZero);
                done_ = true;
                return;
            }
        }
        rate_ = env.guest_div(total_bytes_ * 4096, interval, dv::kDiv);
        done_ = true;
    }

    void remove(Env& env) override { env.cov(dv::kRemove); }

private:
    const DriverInfo& info_;
    bool hardened_;
    u64 total_bytes_ = 0;
    u64 rate_ = 0;
    bool done_ = false;
};

DriverInfo divider_info(bool hardened) {
    DriverInfo info;
    info.name = hardened ? "divider-hardened" : "divider";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x14E4;
    info.match_device = 0x1659;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x14E4;
    info.default_device.device_id = 0x1659;
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {dv::kProbe, dv::kOp, dv::kIrq, dv::kDiv, dv::kZero,
                  dv::kRemove};
    info.archetypes = {BugArchetype::DivByZero};
    return info;
}

template <typename D>
void add(std::vector<CatalogEntry>& out, DriverInfo (*make_info)(bool),
         bool hardened) {
    static_assert(std::is_base_of_v<ModelDriver, D>);
    CatalogEntry e;
    e.info = make_info(hardened);
    // Instances borrow a stable DriverInfo so per-iteration construction
    // stays allocation-light.
    auto info = std::make_shared<DriverInfo>(e.info);
    e.make = [info, hardened] { return std::make_unique<D>(*info, hardened); };
    out.push_back(std::move(e));
}

}  // namespace

void detail::register_archetypes(std::vector<CatalogEntry>& out) {
    for (bool hardened : {false, true}) {
        add<VringConsumerDriver>(out, vring_consumer_info, hardened);
        add<NetdescDriver>(out, netdesc_info, hardened);
        add<ProbeErrDriver>(out, probe_err_info, hardened);
        add<IdxLookupDriver>(out, idx_lookup_info, hardened);
        add<BlockerDriver>(out, blocker_info, hardened);
        add<HoggerDriver>(out, hogger_info, hardened);
        add<AsserterDriver>(out, asserter_info, hardened);
        add<DividerDriver>(out, divider_info, hardened);
    }
}

}  // namespace vdf
