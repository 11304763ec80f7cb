#include "core/task.hpp"

#include <utility>

namespace vdf {

namespace ctx = boost::context;

Task::Task(StackPool& pool, u32 id, std::string name, Body body)
    : id_(id),
      name_(std::move(name)),
      body_(std::move(body)),
      fiber_(std::allocator_arg, detail::PooledStackAllocator{&pool},
             [this](ctx::fiber&& sink) -> ctx::fiber {
                 sink_ = std::move(sink);
                 try {
                     if (pending_mode_ == ResumeMode::Abort)
                         throw IterationAbort{};
                     body_();
                 } catch (const IterationAbort&) {
                 } catch (const EnvError& e) {
                     env_failed_ = true;
                     env_error_ = e.message;
                 }
                 finished_ = true;
                 return std::move(sink_);
             }) {}

void Task::resume(ResumeMode mode) {
    pending_mode_ = mode;
    fiber_ = std::move(fiber_).resume();
}

void Task::suspend() {
    sink_ = std::move(sink_).resume();
    if (pending_mode_ == ResumeMode::Abort)
        throw IterationAbort{};
}

}  // namespace vdf
