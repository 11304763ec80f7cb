#include "core/report.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

#include "core/bytes.hpp"

namespace vdf {

const char* bug_class_name(BugClass c) {
    switch (c) {
    case BugClass::OutOfBounds: return "out-of-bounds";
    case BugClass::InvalidMemoryAccess: return "invalid-memory-access";
    case BugClass::SlabManagement: return "slab-management";
    case BugClass::DeviceSharedPointer: return "device-shared-pointer";
    case BugClass::Miscellaneous: return "miscellaneous";
    case BugClass::AssertionFailure: return "assertion-failure";
    case BugClass::UnboundedAllocation: return "unbounded-allocation";
    case BugClass::Deadlock: return "deadlock";
    }
    return "?";
}

const char* event_kind_name(EventKind k) {
    switch (k) {
    case EventKind::RedzoneAccess: return "redzone-access";
    case EventKind::OverLengthBounce: return "over-length-bounce";
    case EventKind::UnmappedAccess: return "unmapped-access";
    case EventKind::RejectedUnmap: return "rejected-unmap";
    case EventKind::DeviceRegionOob: return "device-region-oob";
    case EventKind::UseAfterFree: return "use-after-free";
    case EventKind::DoubleFree: return "double-free";
    case EventKind::ForeignFree: return "foreign-free";
    case EventKind::SharedPointerLeak: return "shared-pointer-leak";
    case EventKind::GuestBug: return "guest-bug";
    case EventKind::AllocCapBreach: return "alloc-cap-breach";
    case EventKind::AllBlockedNoWake: return "all-blocked";
    case EventKind::DivisionByZero: return "division-by-zero";
    case EventKind::Other: return "other";
    }
    return "?";
}

BugClass classify_event(EventKind kind) {
    switch (kind) {
    case EventKind::RedzoneAccess:
    case EventKind::OverLengthBounce:
        return BugClass::OutOfBounds;
    case EventKind::UnmappedAccess:
    case EventKind::RejectedUnmap:
    case EventKind::DeviceRegionOob:
        return BugClass::InvalidMemoryAccess;
    case EventKind::UseAfterFree:
    case EventKind::DoubleFree:
    case EventKind::ForeignFree:
        return BugClass::SlabManagement;
    case EventKind::SharedPointerLeak:
        return BugClass::DeviceSharedPointer;
    case EventKind::GuestBug:
        return BugClass::AssertionFailure;
    case EventKind::AllocCapBreach:
        return BugClass::UnboundedAllocation;
    case EventKind::AllBlockedNoWake:
        return BugClass::Deadlock;
    case EventKind::DivisionByZero:
    case EventKind::Other:
        return BugClass::Miscellaneous;
    }
    return BugClass::Miscellaneous;
}

Severity severity_of(BugClass c) {
    // High severity: classes that can leak or corrupt guest private memory.
    switch (c) {
    case BugClass::OutOfBounds:
    case BugClass::DeviceSharedPointer:
    case BugClass::SlabManagement:
        return Severity::High;
    default:
        return Severity::Low;
    }
}

bool event_ends_iteration(EventKind kind) {
    switch (kind) {
    case EventKind::SharedPointerLeak:
    case EventKind::RejectedUnmap:
        return false;
    default:
        return true;
    }
}

std::string format_report_line(const BugReport& r) {
    std::ostringstream os;
    os << "class=" << bug_class_name(r.bug_class)
       << " severity=" << (r.severity == Severity::High ? 'h' : 'l')
       << " driver=" << r.driver << " site=" << r.site
       << " iter=" << r.iteration << " input=" << to_hex(r.trigger);
    return os.str();
}

static bool take_field(std::istringstream& is, const char* key,
                       std::string& value) {
    std::string tok;
    if (!(is >> tok))
        return false;
    size_t klen = std::strlen(key);
    if (tok.compare(0, klen, key) != 0 || tok.size() < klen + 1 ||
        tok[klen] != '=')
        return false;
    value = tok.substr(klen + 1);
    return true;
}

bool parse_report_line(const std::string& line, BugReport& out) {
    std::istringstream is(line);
    std::string cls, sev, drv, site, iter, input;
    if (!take_field(is, "class", cls) || !take_field(is, "severity", sev) ||
        !take_field(is, "driver", drv) || !take_field(is, "site", site) ||
        !take_field(is, "iter", iter) || !take_field(is, "input", input))
        return false;
    bool found = false;
    for (int i = 0; i < kBugClassCount; ++i) {
        if (cls == bug_class_name(static_cast<BugClass>(i))) {
            out.bug_class = static_cast<BugClass>(i);
            found = true;
            break;
        }
    }
    if (!found || (sev != "h" && sev != "l"))
        return false;
    out.severity = sev == "h" ? Severity::High : Severity::Low;
    out.driver = drv;
    try {
        out.site = static_cast<SiteId>(std::stoul(site));
        out.iteration = std::stoull(iter);
    } catch (...) {
        return false;
    }
    return from_hex(input, out.trigger);
}

}  // namespace vdf
