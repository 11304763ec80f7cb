#pragma once

#include "core/device.hpp"
#include "core/driver.hpp"
#include "core/env.hpp"
#include "core/prng.hpp"
#include "core/sched.hpp"

namespace vdf {

enum class HarnessKind : u8 { Default, Extended };

struct IrqPolicy {
    enum class Kind : u8 { Targeted, Random, None };
    Kind kind = Kind::Targeted;
    u64 min_ns = 1;
    u64 max_ns = 1000;
};

// One fuzzing iteration's script, run as the root cooperative task.
// Default: one probe, one remove; remove is skipped when probe reports
// failure (the contract a lying probe subverts). Extended: probe, a series
// of resource ops with stream-derived op codes and payloads, remove.
void run_harness_script(Env& env, ModelDriver& driver, HarnessKind kind,
                        u32 op_count);

// Targeted injection: the waiter-registration callback raises one of the
// device's interrupt lines, round-robin, exactly once per registration.
class TargetedInjector {
public:
    explicit TargetedInjector(DeviceInstance& dev) : dev_(dev) {}

    void on_waiter_registered(const WaiterInfo&) {
        dev_.raise_interrupt(next_line_);
        next_line_ = (next_line_ + 1) % dev_.config().irq_lines;
    }

private:
    DeviceInstance& dev_;
    u32 next_line_ = 0;
};

// Random injection: interrupts are raised whenever virtual time crosses the
// next scheduled instant; gaps are uniform in [min_ns, max_ns].
class RandomInjector final : public InjectionSource {
public:
    RandomInjector(DeviceInstance& dev, u64 seed, u64 min_ns, u64 max_ns)
        : dev_(dev), prng_(seed), min_(min_ns), max_(max_ns) {
        next_ = prng_.range(min_, max_);
    }

    std::optional<u64> next_time_ns() override { return next_; }

    void fire() override {
        dev_.raise_interrupt(next_line_);
        next_line_ = (next_line_ + 1) % dev_.config().irq_lines;
        next_ += prng_.range(min_, max_);
    }

private:
    DeviceInstance& dev_;
    Xorshift64Star prng_;
    u64 min_, max_;
    u64 next_ = 0;
    u32 next_line_ = 0;
};

}  // namespace vdf
