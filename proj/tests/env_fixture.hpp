#pragma once

// Shared scaffolding for tests that need a live environment: a recording
// sink, a device, a stream and a root task.

#include <functional>
#include <memory>
#include <vector>

#include "core/device.hpp"
#include "core/env.hpp"

namespace vdf_test {

using namespace vdf;

struct RecordingSink final : ViolationSink {
    std::vector<ViolationEvent> events;
    Scheduler* sched = nullptr;
    bool on_violation(const ViolationEvent& ev) override {
        events.push_back(ev);
        bool ends = event_ends_iteration(ev.kind);
        if (ends && sched)
            sched->request_abort();
        return ends;
    }
};

inline DeviceConfig passthrough_pci_config(u32 irq_lines = 1) {
    DeviceConfig cfg;
    cfg.bus = BusKind::Pci;
    cfg.mode = SimMode::Passthrough;
    cfg.vendor_id = 0x1234;
    cfg.device_id = 0x5678;
    cfg.regions = {{0, 0x1000, RegionKind::Mmio}, {0, 0x40, RegionKind::Pio}};
    cfg.irq_lines = irq_lines;
    return cfg;
}

struct EnvFixture {
    StackPool pool;
    RecordingSink sink;
    Env env{pool, sink};
    std::unique_ptr<DeviceInstance> device;
    std::unique_ptr<InputStream> stream;
    CoverageMap cov;

    explicit EnvFixture(DeviceConfig cfg = passthrough_pci_config(),
                        std::vector<u8> data = {}, u64 seed = 1,
                        bool delay_reduction = true) {
        device = create_device(cfg, env.mem().shared(), env.sched());
        stream = std::make_unique<InputStream>(std::move(data), seed, 10240);
        std::array<bool, kArchetypeCount> toggles;
        toggles.fill(true);
        env.begin_iteration(stream.get(), &cov, device.get(), delay_reduction,
                            toggles);
        device->begin_iteration(stream.get());
        sink.sched = &env.sched();
        cov.begin_iteration();
    }

    Scheduler::RunResult run(std::function<void()> body,
                             u64 virtual_budget_ns = 5'000'000'000ull) {
        env.sched().spawn(std::move(body), "test-root");
        return env.sched().run(virtual_budget_ns, 5'000'000'000ull);
    }
};

}  // namespace vdf_test
