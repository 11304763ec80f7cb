// Fixture drivers: no seeded archetype, but known shapes that the engine
// and harness experiments run against.

#include "core/env.hpp"
#include "drivers/catalog.hpp"

namespace vdf {
namespace {

// ------------------------------------------------------------------------
// magic-gate: a 4-byte magic checked one byte at a time, each match its own
// coverage site. Reaching the gated block is what coverage guidance has to
// accomplish; blind random search has 2^-32 odds per try.
// ------------------------------------------------------------------------

namespace mg {
constexpr SiteId kProbe = 900;
constexpr SiteId kByte0 = 901;
constexpr SiteId kByte1 = 902;
constexpr SiteId kByte2 = 903;
constexpr SiteId kByte3 = 904;
constexpr SiteId kGate = 905;
constexpr u8 kMagic[4] = {0xD3, 0x5C, 0xA1, 0x7E};
}  // namespace mg

class MagicGateDriver final : public ModelDriver {
public:
    explicit MagicGateDriver(const DriverInfo& info) : info_(info) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(mg::kProbe);
        u32 key = static_cast<u32>(env.mmio_read(0, 0x0, 4, mg::kProbe));
        if ((key & 0xFF) == mg::kMagic[0]) {
            env.cov(mg::kByte0);
            if (((key >> 8) & 0xFF) == mg::kMagic[1]) {
                env.cov(mg::kByte1);
                if (((key >> 16) & 0xFF) == mg::kMagic[2]) {
                    env.cov(mg::kByte2);
                    if (((key >> 24) & 0xFF) == mg::kMagic[3]) {
                        env.cov(mg::kByte3);
                        env.guest_bug(mg::kGate, "guarded block reached");
                    }
                }
            }
        }
        return 0;
    }

    std::vector<u8> resource_op(Env&, u8, std::span<const u8>) override {
        return {};
    }
    void irq_handler(Env&, u32) override {}
    void remove(Env&) override {}

private:
    const DriverInfo& info_;
};

DriverInfo magic_gate_info() {
    DriverInfo info;
    info.name = "magic-gate";
    info.bus = BusKind::Platform;
    info.match_name = "sim-magic";
    info.default_device.bus = BusKind::Platform;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.name = "sim-magic";
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {mg::kProbe, mg::kByte0, mg::kByte1, mg::kByte2, mg::kByte3,
                  mg::kGate};
    return info;
}

// ------------------------------------------------------------------------
// multi-gate: three init stages, each gated on an interrupt landing inside
// a short virtual-time window. Full init always ends in a pointer leak, so
// time-to-bug measures how reliably a policy gets interrupts delivered.
// ------------------------------------------------------------------------

namespace tg {
constexpr SiteId kProbe = 1000;
constexpr SiteId kStage0 = 1001;
constexpr SiteId kStage1 = 1002;
constexpr SiteId kStage2 = 1003;
constexpr SiteId kInitFail = 1004;
constexpr SiteId kPublish = 1005;
constexpr SiteId kIrq = 1006;
constexpr SiteId kOp = 1007;
constexpr SiteId kRemove = 1008;
constexpr u64 kWindowNs = 250;
constexpr int kStages = 3;
}  // namespace tg

class MultiGateDriver final : public ModelDriver {
public:
    explicit MultiGateDriver(const DriverInfo& info) : info_(info) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(tg::kProbe);
        for (int stage = 0; stage < tg::kStages; ++stage) {
            stage_done_[stage] = false;
            current_stage_ = stage;
            env.mmio_write(0, 0x10 + 4 * static_cast<u64>(stage), 4, 1,
                           tg::kProbe);
            auto st = env.wait_event(
                [this, stage] { return stage_done_[stage]; }, tg::kWindowNs,
                static_cast<SiteId>(tg::kStage0 + stage), "init gate");
            if (st == WaitStatus::TimedOut) {
                env.cov(tg::kInitFail);
                return -1;  // no interrupt inside the window: init fails
            }
            env.cov(static_cast<SiteId>(tg::kStage0 + stage));
        }
        ring_ = env.alloc_coherent(64, tg::kPublish);
        buf_ = env.galloc(512, tg::kPublish);
        u8 slot[8];
        write_le(slot, 8, env.alloc_base(buf_));
        env.cov(tg::kPublish);
        env.coherent_write(ring_, 0, slot, tg::kPublish);
        probed_ = true;
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8, std::span<const u8>) override {
        env.cov(tg::kOp);
        return {0};
    }

    void irq_handler(Env& env, u32 line) override {
        (void)line;
        env.cov(tg::kIrq);
        if (current_stage_ >= 0 && current_stage_ < tg::kStages)
            stage_done_[current_stage_] = true;
    }

    void remove(Env& env) override {
        env.cov(tg::kRemove);
        if (probed_)
            env.gfree(buf_, tg::kRemove);
        probed_ = false;
    }

private:
    const DriverInfo& info_;
    bool probed_ = false;
    int current_stage_ = -1;
    bool stage_done_[tg::kStages] = {};
    u64 ring_ = 0;
    AllocHandle buf_ = 0;
};

DriverInfo multi_gate_info() {
    DriverInfo info;
    info.name = "multi-gate";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x5049;
    info.match_device = 0x0001;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x5049;
    info.default_device.device_id = 0x0001;
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {tg::kProbe, tg::kStage0, tg::kStage1, tg::kStage2,
                  tg::kInitFail, tg::kPublish, tg::kIrq, tg::kOp, tg::kRemove};
    return info;
}

// ------------------------------------------------------------------------
// laggard: 1 ms of simulated hardware settling time in probe and in every
// resource op. The delay-reduction experiment runs on this.
// ------------------------------------------------------------------------

namespace lg {
constexpr SiteId kProbe = 1100;
constexpr SiteId kOp = 1101;
constexpr SiteId kRemove = 1102;
constexpr u64 kSettleNs = 1000000;
}  // namespace lg

class LaggardDriver final : public ModelDriver {
public:
    explicit LaggardDriver(const DriverInfo& info) : info_(info) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(lg::kProbe);
        env.mmio_write(0, 0x0, 4, 1, lg::kProbe);
        env.delay_ns(lg::kSettleNs);
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        env.cov(lg::kOp);
        env.delay_ns(lg::kSettleNs);
        return {payload.begin(), payload.end()};
    }

    void irq_handler(Env&, u32) override {}
    void remove(Env& env) override { env.cov(lg::kRemove); }

private:
    const DriverInfo& info_;
};

DriverInfo laggard_info() {
    DriverInfo info;
    info.name = "laggard";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x10B7;
    info.match_device = 0x9200;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x10B7;
    info.default_device.device_id = 0x9200;
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {lg::kProbe, lg::kOp, lg::kRemove};
    return info;
}

// ------------------------------------------------------------------------
// echo: the do-nothing baseline.
// ------------------------------------------------------------------------

namespace ec {
constexpr SiteId kProbe = 1200;
constexpr SiteId kOp = 1201;
constexpr SiteId kRemove = 1202;
}  // namespace ec

class EchoDriver final : public ModelDriver {
public:
    explicit EchoDriver(const DriverInfo& info) : info_(info) {}

    const DriverInfo& info() const override { return info_; }

    int probe(Env& env) override {
        env.cov(ec::kProbe);
        env.mmio_read(0, 0x0, 1, ec::kProbe);
        return 0;
    }

    std::vector<u8> resource_op(Env& env, u8 op,
                                std::span<const u8> payload) override {
        (void)op;
        env.cov(ec::kOp);
        return {payload.begin(), payload.end()};
    }

    void irq_handler(Env&, u32) override {}
    void remove(Env& env) override { env.cov(ec::kRemove); }

private:
    const DriverInfo& info_;
};

DriverInfo echo_info() {
    DriverInfo info;
    info.name = "echo";
    info.bus = BusKind::Pci;
    info.match_vendor = 0x1DE0;
    info.match_device = 0x0BEE;
    info.default_device.bus = BusKind::Pci;
    info.default_device.mode = SimMode::Passthrough;
    info.default_device.vendor_id = 0x1DE0;
    info.default_device.device_id = 0x0BEE;
    info.default_device.regions = {{0, 0x100, RegionKind::Mmio}};
    info.default_device.irq_lines = 1;
    info.sites = {ec::kProbe, ec::kOp, ec::kRemove};
    return info;
}

template <typename D>
void add_fixture(std::vector<CatalogEntry>& out, DriverInfo info) {
    CatalogEntry e;
    e.info = info;
    auto stable = std::make_shared<DriverInfo>(std::move(info));
    e.make = [stable] { return std::make_unique<D>(*stable); };
    out.push_back(std::move(e));
}

}  // namespace

void detail::register_fixtures(std::vector<CatalogEntry>& out) {
    add_fixture<MagicGateDriver>(out, magic_gate_info());
    add_fixture<MultiGateDriver>(out, multi_gate_info());
    add_fixture<LaggardDriver>(out, laggard_info());
    add_fixture<EchoDriver>(out, echo_info());
}

}  // namespace vdf
