#include "drivers/catalog.hpp"

namespace vdf {

const char* archetype_name(BugArchetype a) {
    switch (a) {
    case BugArchetype::SwiotlbLenOverflow: return "swiotlb_len_overflow";
    case BugArchetype::SharedPointerDeref: return "shared_pointer_deref";
    case BugArchetype::ProbeErrUaf: return "probe_err_uaf";
    case BugArchetype::UnvalidatedIndex: return "unvalidated_index";
    case BugArchetype::DeadlockWait: return "deadlock_wait";
    case BugArchetype::UnboundedAlloc: return "unbounded_alloc";
    case BugArchetype::AssertionBug: return "assertion_bug";
    case BugArchetype::DivByZero: return "div_by_zero";
    }
    return "?";
}

bool archetype_from_name(const std::string& name, BugArchetype& out) {
    for (int i = 0; i < kArchetypeCount; ++i) {
        auto a = static_cast<BugArchetype>(i);
        if (name == archetype_name(a)) {
            out = a;
            return true;
        }
    }
    return false;
}

bool DriverInfo::matches(const DeviceConfig& dev) const {
    if (dev.bus != bus)
        return false;
    switch (bus) {
    case BusKind::Pci:
        return dev.vendor_id == match_vendor && dev.device_id == match_device;
    case BusKind::Virtio:
        return dev.virtio_device_id == match_virtio_id;
    case BusKind::Platform:
        return dev.name == match_name;
    }
    return false;
}

const std::vector<CatalogEntry>& driver_catalog() {
    static const std::vector<CatalogEntry> catalog = [] {
        std::vector<CatalogEntry> out;
        detail::register_archetypes(out);
        detail::register_fixtures(out);
        return out;
    }();
    return catalog;
}

const CatalogEntry* find_driver(const std::string& name) {
    for (const auto& e : driver_catalog())
        if (e.info.name == name)
            return &e;
    return nullptr;
}

}  // namespace vdf
