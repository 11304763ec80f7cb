#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "core/device.hpp"
#include "core/driver.hpp"
#include "core/harness.hpp"
#include "core/types.hpp"

namespace vdf {

inline bool operator==(const RegionCfg& a, const RegionCfg& b) {
    return a.index == b.index && a.size == b.size && a.kind == b.kind;
}
inline bool operator==(const DeviceConfig& a, const DeviceConfig& b) {
    return a.bus == b.bus && a.mode == b.mode && a.vendor_id == b.vendor_id &&
           a.device_id == b.device_id && a.name == b.name &&
           a.virtio_device_id == b.virtio_device_id &&
           a.feature_bits == b.feature_bits && a.regions == b.regions &&
           a.irq_lines == b.irq_lines &&
           a.adversarial_used_len == b.adversarial_used_len;
}
inline bool operator==(const IrqPolicy& a, const IrqPolicy& b) {
    return a.kind == b.kind && a.min_ns == b.min_ns && a.max_ns == b.max_ns;
}

// Everything one campaign needs. Defaults are desk-scale: 5 s iteration
// timeout (the full-fidelity 120 s stays available), 10 kB input/corpus-entry
// cap, targeted interrupt injection, delay reduction on.
struct CampaignConfig {
    std::string driver;
    u64 seed = 1;
    u64 max_iterations = 1000000;
    double budget_seconds = 30.0;
    double iteration_timeout_seconds = 5.0;
    u64 max_input_size = 10240;
    std::string corpus_dir;
    std::string out_dir;
    IrqPolicy irq;
    bool delay_reduction = true;
    bool stop_on_first_bug = false;

    // [engine]
    bool coverage_guidance = true;
    u64 exec_cost_ns = 20000;  // deterministic per-execution time charge
    u64 stats_interval = 10000;
    u64 max_entry_size = 10240;
    u64 alloc_cap = 64ull << 20;

    // [harness]
    HarnessKind harness = HarnessKind::Default;
    u32 harness_ops = 4;

    // [device]; absent = the selected driver's default device
    std::optional<DeviceConfig> device_override;

    // [bugs]
    std::array<bool, kArchetypeCount> toggles = [] {
        std::array<bool, kArchetypeCount> t;
        t.fill(true);
        return t;
    }();

    bool operator==(const CampaignConfig&) const = default;
};

// Line-based `key = value` with [engine]/[harness]/[device]/[bugs] sections;
// top-level keys come before any section header. Unknown keys are errors.
// Parse errors carry line numbers; semantic validation reports every failure
// at once.
bool parse_config_text(const std::string& text, CampaignConfig& out,
                       std::vector<std::string>& errors);
bool load_config_file(const std::string& path, CampaignConfig& out,
                      std::vector<std::string>& errors);

// One key in one section (empty section = top level). Used for CLI flag
// overrides as well; returns false with a message on unknown keys or
// malformed values.
bool apply_config_kv(CampaignConfig& cfg, const std::string& section,
                     const std::string& key, const std::string& value,
                     std::string& err);

// Canonical form; parse(serialize(c)) == c.
std::string serialize_config(const CampaignConfig& cfg);

std::vector<std::string> validate_config(const CampaignConfig& cfg);

u64 config_hash(const CampaignConfig& cfg);

}  // namespace vdf
