#pragma once

#include <cassert>

#include "core/types.hpp"

namespace vdf {

// Simulated guest time. Only ever moves forward; all timer semantics in the
// environment (delays, wait timeouts, injection schedules) are defined
// against this clock, never against host time.
class VirtualClock {
public:
    u64 now_ns() const { return now_ns_; }

    void advance(u64 delta_ns) { now_ns_ += delta_ns; }

    void advance_to(u64 t_ns) {
        assert(t_ns >= now_ns_);
        now_ns_ = t_ns;
    }

    void reset() { now_ns_ = 0; }

private:
    u64 now_ns_ = 0;
};

}  // namespace vdf
