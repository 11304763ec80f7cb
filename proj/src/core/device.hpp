#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/guest_mem.hpp"
#include "core/input_stream.hpp"
#include "core/sched.hpp"
#include "core/types.hpp"
#include "core/vring.hpp"

namespace vdf {

enum class BusKind : u8 { Pci, Platform, Virtio };
enum class SimMode : u8 { Passthrough, Emulated };
enum class RegionKind : u8 { Mmio, Pio };

struct RegionCfg {
    u32 index = 0;
    u64 size = 0;
    RegionKind kind = RegionKind::Mmio;
};

struct DeviceConfig {
    BusKind bus = BusKind::Pci;
    SimMode mode = SimMode::Passthrough;
    u16 vendor_id = 0;
    u16 device_id = 0;
    std::string name;  // platform matching
    u32 virtio_device_id = 0;
    u64 feature_bits = vring::kFeatureVersion1;
    std::vector<RegionCfg> regions;
    u32 irq_lines = 1;
    // Seeded-bug scenario: the emulated device writes used.len verbatim from
    // the stream instead of the number of bytes it produced.
    bool adversarial_used_len = false;

    std::vector<std::string> validate() const;
};

// A simulated device. Register access goes through io_read/io_write (offsets
// are bounds-checked by the environment before they get here); interrupts
// are level-triggered with delivery coalescing.
class DeviceInstance {
public:
    DeviceInstance(DeviceConfig cfg, SharedSpace& shared, Scheduler& sched)
        : cfg_(std::move(cfg)), shared_(shared), sched_(sched) {
        lines_.assign(cfg_.irq_lines, Line{});
    }
    virtual ~DeviceInstance() = default;

    virtual void begin_iteration(InputStream* stream) {
        stream_ = stream;
        for (auto& l : lines_)
            l.pending = false;
        raises_ = 0;
        unbound_raises_ = 0;
        anomalies_ = 0;
    }

    virtual u64 io_read(RegionKind kind, u32 region, u64 off, u32 width) = 0;
    virtual void io_write(RegionKind kind, u32 region, u64 off, u32 width,
                          u64 value) = 0;

    const DeviceConfig& config() const { return cfg_; }
    const RegionCfg* region(RegionKind kind, u32 index) const;

    void bind_irq(std::function<void(u32)> deliver) {
        deliver_ = std::move(deliver);
    }
    void unbind_irq() { deliver_ = nullptr; }
    void raise_interrupt(u32 line);

    u64 raises() const { return raises_; }
    u64 unbound_raises() const { return unbound_raises_; }
    u64 anomalies() const { return anomalies_; }

protected:
    void note_anomaly() { ++anomalies_; }

    struct Line {
        bool pending = false;
    };

    DeviceConfig cfg_;
    SharedSpace& shared_;
    Scheduler& sched_;
    InputStream* stream_ = nullptr;
    std::vector<Line> lines_;
    std::function<void(u32)> deliver_;
    u64 raises_ = 0;
    u64 unbound_raises_ = 0;
    u64 anomalies_ = 0;
};

// Forwards stream data on every read and discards everything the driver
// writes. Interrupts only come from the harness policies.
class PassthroughDevice final : public DeviceInstance {
public:
    using DeviceInstance::DeviceInstance;

    u64 io_read(RegionKind, u32, u64, u32 width) override {
        return stream_->next_u(width);
    }
    void io_write(RegionKind, u32, u64, u32, u64) override {}
};

// Emulated VIRTIO device stub over the MMIO transport register layout.
// Implements feature negotiation, queue setup and split-ring processing;
// reads of anything outside the register model come from the stream, since
// those values are device-controlled anyway.
class VirtioMmioDevice final : public DeviceInstance {
public:
    static constexpr u32 kMaxQueues = 4;
    static constexpr u32 kQueueNumMax = 256;
    static constexpr u64 kConfigSpace = 0x100;

    VirtioMmioDevice(DeviceConfig cfg, SharedSpace& shared, Scheduler& sched)
        : DeviceInstance(std::move(cfg), shared, sched) {}

    void begin_iteration(InputStream* stream) override;

    u64 io_read(RegionKind kind, u32 region, u64 off, u32 width) override;
    void io_write(RegionKind kind, u32 region, u64 off, u32 width,
                  u64 value) override;

    struct QueueState {
        u32 num = 0;
        bool ready = false;
        u64 desc = 0;
        u64 avail = 0;
        u64 used = 0;
        u16 last_avail_idx = 0;
        u16 used_idx = 0;
    };

    const QueueState& queue(u32 i) const { return queues_[i]; }
    u8 isr() const { return isr_; }
    u32 device_status() const { return status_; }

private:
    void process_queue(u32 qi);
    void device_reset();

    std::array<QueueState, kMaxQueues> queues_;
    u32 queue_sel_ = 0;
    u32 dev_feature_sel_ = 0;
    u32 drv_feature_sel_ = 0;
    u64 driver_features_ = 0;
    u32 status_ = 0;
    u8 isr_ = 0;
};

// Factory by config; validates and picks the model.
std::unique_ptr<DeviceInstance> create_device(const DeviceConfig& cfg,
                                              SharedSpace& shared,
                                              Scheduler& sched);

}  // namespace vdf
