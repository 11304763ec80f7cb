#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "core/device.hpp"
#include "core/types.hpp"

namespace vdf {

class Env;

// The seeded fault each model driver can host. Toggling one off compiles in
// nothing; it just makes the driver take the validated path.
enum class BugArchetype : u8 {
    SwiotlbLenOverflow,
    SharedPointerDeref,
    ProbeErrUaf,
    UnvalidatedIndex,
    DeadlockWait,
    UnboundedAlloc,
    AssertionBug,
    DivByZero,
};
inline constexpr int kArchetypeCount = 8;

const char* archetype_name(BugArchetype a);
bool archetype_from_name(const std::string& name, BugArchetype& out);

struct DriverInfo {
    std::string name;
    BusKind bus = BusKind::Pci;
    u16 match_vendor = 0;
    u16 match_device = 0;
    u32 match_virtio_id = 0;
    std::string match_name;  // platform bus
    DeviceConfig default_device;
    std::vector<SiteId> sites;
    std::vector<BugArchetype> archetypes;

    bool matches(const DeviceConfig& dev) const;
};

// A model driver. Entry points run as cooperative tasks; all memory and
// device access goes through the Env, which is the only path to guest
// memory the ABI offers.
class ModelDriver {
public:
    virtual ~ModelDriver() = default;
    virtual const DriverInfo& info() const = 0;
    // 0 on success, negative on (honest) failure.
    virtual int probe(Env& env) = 0;
    virtual void remove(Env& env) = 0;
    virtual void irq_handler(Env& env, u32 line) = 0;
    virtual std::vector<u8> resource_op(Env& env, u8 op,
                                        std::span<const u8> payload) = 0;
};

}  // namespace vdf
