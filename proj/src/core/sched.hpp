#pragma once

#include <chrono>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/clock.hpp"
#include "core/task.hpp"
#include "core/types.hpp"

namespace vdf {

enum class WaitStatus : u8 { Woken, TimedOut };

struct WaiterInfo {
    u32 task_id = 0;
    SiteId site = 0;
    const char* reason = "";
    u64 order = 0;
};

// Virtual-time event source consulted while every task is blocked; the
// random interrupt-injection policy plugs in here.
struct InjectionSource {
    virtual ~InjectionSource() = default;
    virtual std::optional<u64> next_time_ns() = 0;
    virtual void fire() = 0;
};

// Single-threaded deterministic scheduler for cooperative driver tasks.
//
// Suspension points are exactly: wait_event, sleep (non-reduced delay),
// explicit yield, and device notification (the caller yields after a
// doorbell that produced interrupt deliveries). There is no preemption.
// Interrupt handlers run as high-priority tasks spawned at the next
// scheduling point after the raise.
//
// Virtual time advances only when every task is blocked: the clock jumps to
// the earliest of (wait deadline, delayed work, scheduled injection). If no
// such source exists the iteration can never make progress again and is
// reported as deadlocked.
class Scheduler {
public:
    using TaskFn = std::function<void()>;

    explicit Scheduler(StackPool& pool, VirtualClock& clock)
        : pool_(pool), clock_(clock) {}

    void reset();

    // Harness notification hook: invoked once per waiter registration.
    void set_waiter_callback(std::function<void(const WaiterInfo&)> cb) {
        waiter_cb_ = std::move(cb);
    }
    void set_injection_source(InjectionSource* src) { injection_ = src; }

    u32 spawn(TaskFn fn, std::string name);

    // -- Called from inside a running task --
    void yield_now();
    WaitStatus wait_event(std::function<bool()> pred,
                          std::optional<u64> timeout_ns, SiteId site,
                          const char* reason);
    void sleep_ns(u64 ns);

    // -- Callable from anywhere --
    void post_delayed_work(u64 delay_ns, TaskFn fn, std::string name);
    // Queue an interrupt handler for execution at the next scheduling point.
    void enqueue_delivery(TaskFn fn, std::string name);
    bool deliveries_pending() const { return !deliveries_.empty(); }
    // Hard violation: unwind every task and end the run.
    void request_abort() { abort_requested_ = true; }

    bool in_task() const { return current_ != kNoTask; }
    u32 current_task() const { return current_; }

    struct RunResult {
        enum class Kind : u8 { Completed, Aborted, Timeout, EnvError };
        Kind kind = Kind::Completed;
        bool deadlock = false;  // timeout caused by all-blocked-no-wake-source
        SiteId deadlock_site = 0;
        std::string env_error;
    };

    RunResult run(u64 virtual_budget_ns, u64 host_budget_ns);

    bool waiters_empty() const;
    u64 waiter_registrations() const { return waiter_order_seq_; }

private:
    static constexpr u32 kNoTask = 0xFFFFFFFF;

    struct WaitRecord {
        std::function<bool()> pred;  // empty for plain sleeps
        bool has_deadline = false;
        u64 deadline_ns = 0;
        bool registered = false;  // true for wait_event, false for sleeps
        bool waking = false;      // queued runnable, resume pending
        SiteId site = 0;
        u64 order = 0;
        WaitStatus status = WaitStatus::Woken;
    };

    struct DelayedWork {
        u64 due_ns;
        u64 seq;
        TaskFn fn;
        std::string name;
    };

    struct Delivery {
        TaskFn fn;
        std::string name;
    };

    void run_task(u32 id, ResumeMode mode);
    void drain_due_work();
    void drain_deliveries();
    void fire_injections();
    bool wake_ready_waiters();
    std::optional<u64> earliest_wake_time();
    void unwind_all();

    StackPool& pool_;
    VirtualClock& clock_;
    std::vector<std::unique_ptr<Task>> tasks_;
    std::vector<std::optional<WaitRecord>> waits_;  // indexed by task id
    std::deque<u32> runnable_;
    std::deque<u32> priority_;  // interrupt handler tasks, run first
    std::vector<DelayedWork> delayed_;  // unsorted; scanned (always tiny)
    std::deque<Delivery> deliveries_;
    std::function<void(const WaiterInfo&)> waiter_cb_;
    InjectionSource* injection_ = nullptr;
    u32 current_ = kNoTask;
    u32 live_tasks_ = 0;
    u64 waiter_order_seq_ = 0;
    u64 work_seq_ = 0;
    bool abort_requested_ = false;
    bool env_error_seen_ = false;
    std::string env_error_msg_;
};

}  // namespace vdf
