#include "core/sched.hpp"

#include <algorithm>
#include <cassert>

namespace vdf {

void Scheduler::reset() {
    tasks_.clear();
    waits_.clear();
    runnable_.clear();
    priority_.clear();
    delayed_.clear();
    deliveries_.clear();
    injection_ = nullptr;
    current_ = kNoTask;
    live_tasks_ = 0;
    waiter_order_seq_ = 0;
    work_seq_ = 0;
    abort_requested_ = false;
    env_error_seen_ = false;
    env_error_msg_.clear();
}

u32 Scheduler::spawn(TaskFn fn, std::string name) {
    u32 id = static_cast<u32>(tasks_.size());
    tasks_.push_back(
        std::make_unique<Task>(pool_, id, std::move(name), std::move(fn)));
    waits_.emplace_back(std::nullopt);
    runnable_.push_back(id);
    ++live_tasks_;
    return id;
}

void Scheduler::yield_now() {
    assert(in_task());
    runnable_.push_back(current_);
    tasks_[current_]->suspend();
}

WaitStatus Scheduler::wait_event(std::function<bool()> pred,
                                 std::optional<u64> timeout_ns, SiteId site,
                                 const char* reason) {
    assert(in_task());
    u32 id = current_;
    WaitRecord rec;
    rec.pred = std::move(pred);
    if (timeout_ns) {
        rec.has_deadline = true;
        rec.deadline_ns = clock_.now_ns() + *timeout_ns;
    }
    rec.registered = true;
    rec.site = site;
    rec.order = waiter_order_seq_++;
    waits_[id] = std::move(rec);
    if (waiter_cb_)
        waiter_cb_(WaiterInfo{id, site, reason, waits_[id]->order});
    tasks_[id]->suspend();
    // Back from the wake; deregister before returning to the caller.
    WaitStatus st = waits_[id]->status;
    waits_[id].reset();
    return st;
}

void Scheduler::sleep_ns(u64 ns) {
    assert(in_task());
    u32 id = current_;
    WaitRecord rec;
    rec.has_deadline = true;
    rec.deadline_ns = clock_.now_ns() + ns;
    waits_[id] = std::move(rec);
    tasks_[id]->suspend();
    waits_[id].reset();
}

void Scheduler::post_delayed_work(u64 delay_ns, TaskFn fn, std::string name) {
    delayed_.push_back(
        {clock_.now_ns() + delay_ns, work_seq_++, std::move(fn), std::move(name)});
}

void Scheduler::enqueue_delivery(TaskFn fn, std::string name) {
    deliveries_.push_back({std::move(fn), std::move(name)});
}

void Scheduler::run_task(u32 id, ResumeMode mode) {
    u32 prev = current_;
    current_ = id;
    tasks_[id]->resume(mode);
    current_ = prev;
    if (tasks_[id]->finished()) {
        --live_tasks_;
        if (tasks_[id]->env_failed() && !env_error_seen_) {
            env_error_seen_ = true;
            env_error_msg_ = tasks_[id]->env_error();
        }
    }
}

void Scheduler::drain_due_work() {
    // Stable order: earliest due time, then submission order.
    for (;;) {
        size_t best = delayed_.size();
        for (size_t i = 0; i < delayed_.size(); ++i) {
            if (delayed_[i].due_ns > clock_.now_ns())
                continue;
            if (best == delayed_.size() ||
                delayed_[i].due_ns < delayed_[best].due_ns ||
                (delayed_[i].due_ns == delayed_[best].due_ns &&
                 delayed_[i].seq < delayed_[best].seq))
                best = i;
        }
        if (best == delayed_.size())
            return;
        DelayedWork w = std::move(delayed_[best]);
        delayed_.erase(delayed_.begin() + static_cast<ptrdiff_t>(best));
        spawn(std::move(w.fn), std::move(w.name));
    }
}

void Scheduler::drain_deliveries() {
    while (!deliveries_.empty()) {
        Delivery d = std::move(deliveries_.front());
        deliveries_.pop_front();
        u32 id = static_cast<u32>(tasks_.size());
        tasks_.push_back(
            std::make_unique<Task>(pool_, id, std::move(d.name), std::move(d.fn)));
        waits_.emplace_back(std::nullopt);
        priority_.push_back(id);
        ++live_tasks_;
    }
}

void Scheduler::fire_injections() {
    while (injection_) {
        auto t = injection_->next_time_ns();
        if (!t || *t > clock_.now_ns())
            return;
        injection_->fire();
    }
}

bool Scheduler::wake_ready_waiters() {
    // Registration order; a satisfied predicate wins over a deadline that
    // expired at the same instant.
    struct Hit {
        u64 order;
        u32 id;
        WaitStatus status;
    };
    std::vector<Hit> hits;
    for (u32 id = 0; id < waits_.size(); ++id) {
        auto& rec = waits_[id];
        if (!rec || rec->waking)
            continue;
        if (rec->pred && rec->pred())
            hits.push_back({rec->order, id, WaitStatus::Woken});
        else if (rec->has_deadline && rec->deadline_ns <= clock_.now_ns())
            hits.push_back({rec->order, id, WaitStatus::TimedOut});
    }
    std::sort(hits.begin(), hits.end(),
              [](const Hit& a, const Hit& b) { return a.order < b.order; });
    for (const Hit& h : hits) {
        waits_[h.id]->status = h.status;
        waits_[h.id]->waking = true;
        runnable_.push_back(h.id);
    }
    return !hits.empty();
}

std::optional<u64> Scheduler::earliest_wake_time() {
    std::optional<u64> t;
    auto consider = [&t](u64 v) {
        if (!t || v < *t)
            t = v;
    };
    for (const auto& rec : waits_)
        if (rec && !rec->waking && rec->has_deadline)
            consider(rec->deadline_ns);
    for (const auto& w : delayed_)
        consider(w.due_ns);
    if (injection_) {
        auto nt = injection_->next_time_ns();
        if (nt)
            consider(*nt);
    }
    return t;
}

void Scheduler::unwind_all() {
    for (auto& task : tasks_) {
        while (!task->finished()) {
            if (waits_[task->id()])
                waits_[task->id()].reset();
            run_task(task->id(), ResumeMode::Abort);
        }
    }
    runnable_.clear();
    priority_.clear();
    deliveries_.clear();
    delayed_.clear();
}

Scheduler::RunResult Scheduler::run(u64 virtual_budget_ns, u64 host_budget_ns) {
    using clock = std::chrono::steady_clock;
    auto host_start = clock::now();
    u64 steps = 0;

    for (;;) {
        if (abort_requested_) {
            unwind_all();
            RunResult r;
            r.kind = RunResult::Kind::Aborted;
            return r;
        }
        if (env_error_seen_) {
            unwind_all();
            RunResult r;
            r.kind = RunResult::Kind::EnvError;
            r.env_error = env_error_msg_;
            return r;
        }
        if ((++steps & 63) == 0) {
            u64 host_ns = static_cast<u64>(
                std::chrono::duration_cast<std::chrono::nanoseconds>(
                    clock::now() - host_start)
                    .count());
            if (host_ns > host_budget_ns) {
                unwind_all();
                RunResult r;
                r.kind = RunResult::Kind::Timeout;
                return r;
            }
        }
        if (clock_.now_ns() >= virtual_budget_ns) {
            unwind_all();
            RunResult r;
            r.kind = RunResult::Kind::Timeout;
            return r;
        }

        fire_injections();
        drain_due_work();
        drain_deliveries();
        wake_ready_waiters();

        if (!priority_.empty()) {
            u32 id = priority_.front();
            priority_.pop_front();
            run_task(id, ResumeMode::Normal);
            continue;
        }
        if (!runnable_.empty()) {
            u32 id = runnable_.front();
            runnable_.pop_front();
            run_task(id, ResumeMode::Normal);
            continue;
        }
        if (live_tasks_ == 0)
            return RunResult{};

        // Everyone is blocked; jump virtual time to the next wake source.
        auto t = earliest_wake_time();
        if (!t) {
            // Nothing can ever wake these tasks again: deadlock. Charge the
            // stall against the whole iteration budget.
            SiteId site = 0;
            u64 best_order = ~0ull;
            for (const auto& rec : waits_) {
                if (rec && rec->registered && rec->order < best_order) {
                    best_order = rec->order;
                    site = rec->site;
                }
            }
            clock_.advance_to(virtual_budget_ns);
            unwind_all();
            RunResult r;
            r.kind = RunResult::Kind::Timeout;
            r.deadlock = true;
            r.deadlock_site = site;
            return r;
        }
        if (*t >= virtual_budget_ns) {
            clock_.advance_to(virtual_budget_ns);
            unwind_all();
            RunResult r;
            r.kind = RunResult::Kind::Timeout;
            return r;
        }
        clock_.advance_to(*t);
    }
}

bool Scheduler::waiters_empty() const {
    for (const auto& rec : waits_)
        if (rec && rec->registered)
            return false;
    return true;
}

}  // namespace vdf
