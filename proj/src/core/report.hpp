#pragma once

#include <string>
#include <vector>

#include "core/types.hpp"

namespace vdf {

// The eight violation classes.
enum class BugClass : u8 {
    OutOfBounds,
    InvalidMemoryAccess,
    SlabManagement,
    DeviceSharedPointer,
    Miscellaneous,
    AssertionFailure,
    UnboundedAllocation,
    Deadlock,
};
inline constexpr int kBugClassCount = 8;

enum class Severity : u8 { High, Low };

// What the individual detectors actually observe. classify() folds these
// into BugClass; keeping the raw kind around makes reports self-explanatory.
enum class EventKind : u8 {
    RedzoneAccess,         // read/write touched a redzone byte
    OverLengthBounce,      // claimed DMA length exceeds the registered mapping
    UnmappedAccess,        // access outside any allocation or shared region
    RejectedUnmap,         // unmap/sync of an address that was never mapped
    DeviceRegionOob,       // register access outside the device region
    UseAfterFree,          // access to freed (quarantined) memory
    DoubleFree,            // free of an already-freed allocation
    ForeignFree,           // free of a handle this allocator never issued
    SharedPointerLeak,     // private address written where the device can see it
    GuestBug,              // driver hit a BUG()-style assertion
    AllocCapBreach,        // cumulative live allocations over the cap
    AllBlockedNoWake,      // every task blocked with no wake source left
    DivisionByZero,
    Other,
};

const char* bug_class_name(BugClass c);
const char* event_kind_name(EventKind k);

struct ViolationEvent {
    EventKind kind = EventKind::Other;
    SiteId site = 0;
    u64 addr = 0;
    u64 value = 0;
    std::string detail;
};

struct BugReport {
    BugClass bug_class = BugClass::Miscellaneous;
    Severity severity = Severity::Low;
    SiteId site = 0;
    std::string driver;
    EventKind kind = EventKind::Other;
    std::string detail;
    std::vector<u8> trigger;
    u64 iteration = 0;

    std::pair<BugClass, SiteId> dedup_key() const { return {bug_class, site}; }
};

BugClass classify_event(EventKind kind);
Severity severity_of(BugClass c);

// A warning-grade event is recorded but does not end the iteration; the two
// warning kinds are pointer leaks and rejected unmaps.
bool event_ends_iteration(EventKind kind);

// Line format: class=<name> severity=<h|l> driver=<name> site=<n> iter=<n>
// input=<hex>
std::string format_report_line(const BugReport& r);
bool parse_report_line(const std::string& line, BugReport& out);

// Receives every detector event. Returns true when the event must end the
// current iteration; detector call sites in task context then unwind via
// IterationAbort (see raise_violation in env.hpp).
struct ViolationSink {
    virtual ~ViolationSink() = default;
    virtual bool on_violation(const ViolationEvent& ev) = 0;
};

struct NullSink final : ViolationSink {
    bool on_violation(const ViolationEvent& ev) override {
        return event_ends_iteration(ev.kind);
    }
};

}  // namespace vdf
