#include "core/device.hpp"

#include <sstream>

namespace vdf {

std::vector<std::string> DeviceConfig::validate() const {
    std::vector<std::string> errs;
    if (mode == SimMode::Emulated && bus != BusKind::Virtio)
        errs.push_back("emulated mode is only valid for the virtio bus");
    if (bus == BusKind::Platform && name.empty())
        errs.push_back("platform devices need a name for driver matching");
    if (regions.empty())
        errs.push_back("device declares no regions");
    for (const auto& r : regions) {
        if (r.size == 0) {
            std::ostringstream os;
            os << "region " << r.index << " has size 0";
            errs.push_back(os.str());
        }
    }
    if (irq_lines == 0)
        errs.push_back("device declares no interrupt lines");
    return errs;
}

const RegionCfg* DeviceInstance::region(RegionKind kind, u32 index) const {
    for (const auto& r : cfg_.regions)
        if (r.kind == kind && r.index == index)
            return &r;
    return nullptr;
}

void DeviceInstance::raise_interrupt(u32 line) {
    if (line >= lines_.size() || !deliver_) {
        ++unbound_raises_;
        return;
    }
    ++raises_;
    if (lines_[line].pending)
        return;  // handler already queued; level-triggered coalescing
    lines_[line].pending = true;
    auto deliver = deliver_;
    sched_.enqueue_delivery(
        [this, line, deliver] {
            lines_[line].pending = false;
            deliver(line);
        },
        "irq" + std::to_string(line));
}

// ---------------------------------------------------------------- virtio --

namespace regs = vring::mmio;

void VirtioMmioDevice::begin_iteration(InputStream* stream) {
    DeviceInstance::begin_iteration(stream);
    device_reset();
}

void VirtioMmioDevice::device_reset() {
    for (auto& q : queues_)
        q = QueueState{};
    queue_sel_ = 0;
    dev_feature_sel_ = 0;
    drv_feature_sel_ = 0;
    driver_features_ = 0;
    status_ = 0;
    isr_ = 0;
}

u64 VirtioMmioDevice::io_read(RegionKind kind, u32 region, u64 off,
                              u32 width) {
    (void)region;
    if (kind == RegionKind::Pio || off >= kConfigSpace || width != 4) {
        // Config space and undefined registers are device data: fuzz input.
        return stream_->next_u(width);
    }
    switch (off) {
    case regs::kMagic: return regs::kMagicValue;
    case regs::kVersion: return 2;
    case regs::kDeviceId: return cfg_.virtio_device_id;
    case regs::kVendorId: return cfg_.vendor_id;
    case regs::kDeviceFeatures:
        return dev_feature_sel_ ? static_cast<u32>(cfg_.feature_bits >> 32)
                                : static_cast<u32>(cfg_.feature_bits);
    case regs::kQueueSel: return queue_sel_;
    case regs::kQueueNumMax:
        return queue_sel_ < kMaxQueues ? kQueueNumMax : 0;
    case regs::kQueueNum:
        return queue_sel_ < kMaxQueues ? queues_[queue_sel_].num : 0;
    case regs::kQueueReady:
        return queue_sel_ < kMaxQueues && queues_[queue_sel_].ready ? 1 : 0;
    case regs::kInterruptStatus: return isr_;
    case regs::kStatus: return status_;
    default:
        return stream_->next_u(width);
    }
}

void VirtioMmioDevice::io_write(RegionKind kind, u32 region, u64 off,
                                u32 width, u64 value) {
    (void)region;
    if (kind == RegionKind::Pio || off >= kConfigSpace || width != 4)
        return;  // not part of the register model; discarded
    u32 v = static_cast<u32>(value);
    QueueState* q = queue_sel_ < kMaxQueues ? &queues_[queue_sel_] : nullptr;
    switch (off) {
    case regs::kDeviceFeaturesSel: dev_feature_sel_ = v; break;
    case regs::kDriverFeaturesSel: drv_feature_sel_ = v; break;
    case regs::kDriverFeatures:
        if (drv_feature_sel_)
            driver_features_ = (driver_features_ & 0xFFFFFFFFull) |
                               (static_cast<u64>(v) << 32);
        else
            driver_features_ = (driver_features_ & ~0xFFFFFFFFull) | v;
        break;
    case regs::kQueueSel: queue_sel_ = v; break;
    case regs::kQueueNum:
        if (q)
            q->num = v;
        break;
    case regs::kQueueReady:
        if (q)
            q->ready = v == 1;
        break;
    case regs::kQueueNotify:
        if (v < kMaxQueues)
            process_queue(v);
        break;
    case regs::kInterruptAck: isr_ &= static_cast<u8>(~v); break;
    case regs::kStatus:
        if (v == 0)
            device_reset();
        else
            status_ = v;
        break;
    case regs::kQueueDescLow:
        if (q) q->desc = (q->desc & ~0xFFFFFFFFull) | v;
        break;
    case regs::kQueueDescHigh:
        if (q) q->desc = (q->desc & 0xFFFFFFFFull) | (static_cast<u64>(v) << 32);
        break;
    case regs::kQueueDriverLow:
        if (q) q->avail = (q->avail & ~0xFFFFFFFFull) | v;
        break;
    case regs::kQueueDriverHigh:
        if (q) q->avail = (q->avail & 0xFFFFFFFFull) | (static_cast<u64>(v) << 32);
        break;
    case regs::kQueueDeviceLow:
        if (q) q->used = (q->used & ~0xFFFFFFFFull) | v;
        break;
    case regs::kQueueDeviceHigh:
        if (q) q->used = (q->used & 0xFFFFFFFFull) | (static_cast<u64>(v) << 32);
        break;
    default:
        break;
    }
}

void VirtioMmioDevice::process_queue(u32 qi) {
    QueueState& q = queues_[qi];
    bool num_valid = q.num >= 1 && q.num <= kQueueNumMax &&
                     (q.num & (q.num - 1)) == 0;
    if (!q.ready || !num_valid || !q.desc || !q.avail || !q.used) {
        note_anomaly();
        return;
    }

    auto read_u16_at = [&](u64 addr, u16& out) {
        u8 buf[2];
        if (!shared_.raw_read(addr, 2, buf))
            return false;
        out = static_cast<u16>(read_le(buf, 2));
        return true;
    };

    for (;;) {
        u16 avail_idx = 0;
        if (!read_u16_at(q.avail + 2, avail_idx)) {
            note_anomaly();
            return;
        }
        if (q.last_avail_idx == avail_idx)
            break;
        u16 slot = static_cast<u16>(q.last_avail_idx % q.num);
        u16 head = 0;
        if (!read_u16_at(q.avail + vring::avail_ring_off(slot), head)) {
            note_anomaly();
            return;
        }
        ++q.last_avail_idx;

        u32 written_total = 0;
        u16 idx = head;
        u32 hops = 0;
        bool chain_ok = true;
        for (;;) {
            if (idx >= q.num || ++hops > q.num) {
                // Untrusted `next` chains must not hang the device model.
                note_anomaly();
                chain_ok = false;
                break;
            }
            u8 raw[vring::kDescSize];
            if (!shared_.raw_read(q.desc + vring::kDescSize * idx,
                                  vring::kDescSize, raw)) {
                note_anomaly();
                chain_ok = false;
                break;
            }
            vring::Desc d = vring::decode_desc(raw);
            if (d.flags & vring::kDescFlagWrite) {
                // The payload length is adversary-chosen, up to what the
                // descriptor offers.
                u32 chosen = d.len ? stream_->next_u16() % (d.len + 1) : 0;
                std::vector<u8> payload = stream_->take(chosen);
                if (chosen && !shared_.raw_write(d.addr, payload))
                    note_anomaly();  // not a shared buffer; nothing written
                written_total += chosen;
            }
            if (!(d.flags & vring::kDescFlagNext))
                break;
            idx = d.next;
        }
        if (!chain_ok)
            return;  // stop consuming this queue

        u32 used_len = written_total;
        if (cfg_.adversarial_used_len)
            used_len = stream_->next_u32();

        u16 uslot = static_cast<u16>(q.used_idx % q.num);
        u8 entry[8];
        write_le(std::span<u8>(entry, 4), 4, head);
        write_le(std::span<u8>(entry + 4, 4), 4, used_len);
        if (!shared_.raw_write(q.used + vring::used_ring_off(uslot), entry)) {
            note_anomaly();
            return;
        }
        ++q.used_idx;
        u8 idx_bytes[2];
        write_le(idx_bytes, 2, q.used_idx);
        if (!shared_.raw_write(q.used + 2, idx_bytes)) {
            note_anomaly();
            return;
        }
        isr_ |= 1;
        raise_interrupt(0);
    }
}

std::unique_ptr<DeviceInstance> create_device(const DeviceConfig& cfg,
                                              SharedSpace& shared,
                                              Scheduler& sched) {
    if (cfg.mode == SimMode::Emulated)
        return std::make_unique<VirtioMmioDevice>(cfg, shared, sched);
    return std::make_unique<PassthroughDevice>(cfg, shared, sched);
}

}  // namespace vdf
