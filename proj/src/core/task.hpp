#pragma once

#include <boost/context/fiber.hpp>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "core/types.hpp"

namespace vdf {

// Thrown inside a task to unwind it: either because a hard violation ended
// the iteration, or because the scheduler is tearing the iteration down.
struct IterationAbort {};

// Thrown by environment code on non-bug failures (pool exhaustion, malformed
// setup). Ends the iteration without producing a report.
struct EnvError {
    std::string message;
};

enum class ResumeMode : u8 { Normal, Abort };

// Reusable fixed-size stacks. Iterations spawn a handful of short-lived
// tasks each, so stack reuse is what keeps task creation off the profile.
class StackPool {
public:
    static constexpr size_t kStackSize = 256 * 1024;

    ~StackPool() {
        for (void* p : free_)
            std::free(p);
    }

    void* acquire() {
        if (!free_.empty()) {
            void* p = free_.back();
            free_.pop_back();
            return p;
        }
        return std::malloc(kStackSize);
    }

    void release(void* p) { free_.push_back(p); }

private:
    std::vector<void*> free_;
};

namespace detail {
struct PooledStackAllocator {
    StackPool* pool;

    boost::context::stack_context allocate() {
        boost::context::stack_context ctx;
        void* base = pool->acquire();
        ctx.size = StackPool::kStackSize;
        // boost expects the top of the stack.
        ctx.sp = static_cast<char*>(base) + ctx.size;
        return ctx;
    }

    void deallocate(boost::context::stack_context& ctx) {
        pool->release(static_cast<char*>(ctx.sp) - ctx.size);
    }
};
}  // namespace detail

// A cooperative task. resume() runs it until it suspends or finishes;
// suspend() (called from within the task) hands control back. Resuming with
// ResumeMode::Abort makes the suspension point throw IterationAbort so the
// task unwinds cleanly through driver code.
class Task {
public:
    using Body = std::function<void()>;

    Task(StackPool& pool, u32 id, std::string name, Body body);

    Task(const Task&) = delete;
    Task& operator=(const Task&) = delete;

    void resume(ResumeMode mode);
    void suspend();

    bool finished() const { return finished_; }
    bool env_failed() const { return env_failed_; }
    const std::string& env_error() const { return env_error_; }
    u32 id() const { return id_; }
    const std::string& name() const { return name_; }

private:
    u32 id_;
    std::string name_;
    Body body_;
    bool finished_ = false;
    bool env_failed_ = false;
    std::string env_error_;
    ResumeMode pending_mode_ = ResumeMode::Normal;
    boost::context::fiber fiber_;  // the suspended task, when valid
    boost::context::fiber sink_;   // the scheduler side, while running
};

}  // namespace vdf
