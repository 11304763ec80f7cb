#include "core/engine.hpp"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vdf {

namespace {

u64 seconds_to_ns(double s) {
    return static_cast<u64>(s * 1e9);
}

}  // namespace

std::string format_stats_file(const ExecStats& stats, u64 corpus_entries) {
    std::ostringstream os;
    char buf[64];
    os << "executions=" << stats.executions << "\n";
    std::snprintf(buf, sizeof(buf), "%.9f", stats.elapsed_ns * 1e-9);
    os << "elapsed_s=" << buf << "\n";
    std::snprintf(buf, sizeof(buf), "%.2f", stats.execs_per_s);
    os << "execs_per_s=" << buf << "\n";
    os << "edges=" << stats.covered_edges << "\n";
    os << "corpus=" << corpus_entries << "\n";
    os << "unique_bugs=" << stats.unique_bugs << "\n";
    for (const auto& t : stats.ttb) {
        std::snprintf(buf, sizeof(buf), "%.9f", t.first_ns * 1e-9);
        os << "ttb class=" << bug_class_name(t.bug_class) << " site=" << t.site
           << " seconds=" << buf << " iter=" << t.iteration << "\n";
    }
    return os.str();
}

Engine::Engine(CampaignConfig cfg)
    : cfg_(std::move(cfg)),
      entry_(find_driver(cfg_.driver)),
      env_(pool_, sink_),
      corpus_(cfg_.max_entry_size),
      empty_corpus_(cfg_.max_entry_size),
      mutator_(mix64(cfg_.seed, 0x6D757461)) {
    if (!entry_)
        throw std::invalid_argument("unknown driver: " + cfg_.driver);
    device_cfg_ =
        cfg_.device_override ? *cfg_.device_override : entry_->info.default_device;
    auto errs = device_cfg_.validate();
    if (!errs.empty())
        throw std::invalid_argument("device config: " + errs.front());
    device_ = create_device(device_cfg_, env_.mem().shared(), env_.sched());
}

IterationResult Engine::run_iteration(std::vector<u8> candidate,
                                      u64 iteration) {
    using clock = std::chrono::steady_clock;
    auto host_start = clock::now();

    IterationResult res;
    InputStream stream(std::move(candidate), mix64(cfg_.seed, iteration),
                       cfg_.max_input_size);
    cov_.begin_iteration();
    sink_.begin_iteration(&env_.sched());
    env_.begin_iteration(&stream, &cov_, device_.get(), cfg_.delay_reduction,
                         cfg_.toggles);
    device_->begin_iteration(&stream);

    // The driver is re-loaded from scratch every iteration; the environment
    // reset above swept all of its previous state.
    std::unique_ptr<ModelDriver> driver = entry_->make();
    bool matched = driver->info().matches(device_cfg_);

    TargetedInjector targeted(*device_);
    std::optional<RandomInjector> random;
    switch (cfg_.irq.kind) {
    case IrqPolicy::Kind::Targeted:
        env_.sched().set_waiter_callback(
            [&targeted](const WaiterInfo& w) { targeted.on_waiter_registered(w); });
        break;
    case IrqPolicy::Kind::Random:
        random.emplace(*device_, mix64(cfg_.seed ^ 0x69726A, iteration),
                       cfg_.irq.min_ns, cfg_.irq.max_ns);
        env_.sched().set_injection_source(&*random);
        break;
    case IrqPolicy::Kind::None:
        break;
    }

    if (matched) {
        ModelDriver* drv = driver.get();
        Env* env = &env_;
        device_->bind_irq(
            [drv, env](u32 line) { drv->irq_handler(*env, line); });
        HarnessKind kind = cfg_.harness;
        u32 ops = cfg_.harness_ops;
        env_.sched().spawn(
            [env, drv, kind, ops] { run_harness_script(*env, *drv, kind, ops); },
            "harness");
    }

    u64 budget_ns = seconds_to_ns(cfg_.iteration_timeout_seconds);
    auto run = env_.sched().run(budget_ns, budget_ns);
    device_->unbind_irq();

    switch (run.kind) {
    case Scheduler::RunResult::Kind::Completed:
        res.status = IterationStatus::Clean;
        break;
    case Scheduler::RunResult::Kind::Aborted:
        res.status = IterationStatus::Violation;
        break;
    case Scheduler::RunResult::Kind::Timeout:
        res.status = IterationStatus::Timeout;
        if (run.deadlock) {
            res.deadlock = true;
            ViolationEvent ev;
            ev.kind = EventKind::AllBlockedNoWake;
            ev.site = run.deadlock_site;
            ev.detail =
                "every task blocked with no wake source; the iteration can "
                "never make progress";
            sink_.on_violation(ev);
        }
        break;
    case Scheduler::RunResult::Kind::EnvError:
        res.status = IterationStatus::Clean;
        res.env_error = run.env_error;
        break;
    }

    assert(env_.sched().waiters_empty());

    res.reports.reserve(sink_.events.size());
    for (const auto& ev : sink_.events) {
        BugReport r;
        r.bug_class = classify_event(ev.kind);
        r.severity = severity_of(r.bug_class);
        r.site = ev.site;
        r.kind = ev.kind;
        r.detail = ev.detail;
        r.driver = entry_->info.name;
        res.reports.push_back(std::move(r));
    }
    res.touched_edges = cov_.touched();
    res.consumed = stream.consumed_prefix();
    res.bytes_consumed = stream.cursor();
    res.underrun = stream.extended();
    res.virtual_ns = env_.clock().now_ns();
    res.host_ns = static_cast<u64>(
        std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() -
                                                             host_start)
            .count());
    return res;
}

void Engine::emit_stats_line(u64 executions, u64 corpus, u64 bugs) {
    if (!stats_cb_)
        return;
    char buf[160];
    double execs_per_s =
        elapsed_ns_ ? executions / (elapsed_ns_ * 1e-9) : 0.0;
    std::snprintf(buf, sizeof(buf),
                  "iter=%llu execs_per_s=%.2f edges=%llu corpus=%llu bugs=%llu",
                  static_cast<unsigned long long>(executions), execs_per_s,
                  static_cast<unsigned long long>(campaign_cov_.covered_edges()),
                  static_cast<unsigned long long>(corpus),
                  static_cast<unsigned long long>(bugs));
    stats_cb_(buf);
}

CampaignResult Engine::run_campaign() {
    CampaignResult out;
    std::vector<TtbEntry> ttb;

    std::deque<std::vector<u8>> seeds;
    for (auto& s : Corpus::load_dir(cfg_.corpus_dir))
        seeds.push_back(std::move(s));

    u64 budget_ns = seconds_to_ns(cfg_.budget_seconds);
    u64 executions = 0;
    bool stop = false;

    while (!stop && executions < cfg_.max_iterations &&
           elapsed_ns_ < budget_ns) {
        u64 iter = executions;
        std::vector<u8> cand;
        if (!seeds.empty()) {
            cand = std::move(seeds.front());
            seeds.pop_front();
        } else {
            cand = mutator_.next_candidate(cfg_.coverage_guidance ? corpus_
                                                                  : empty_corpus_);
        }

        IterationResult res = run_iteration(std::move(cand), iter);
        ++executions;
        elapsed_ns_ += res.virtual_ns + cfg_.exec_cost_ns;

        if (res.env_error)
            ++out.env_errors;
        if (res.status == IterationStatus::Timeout)
            ++out.timeouts;

        auto fresh = campaign_cov_.absorb(res.touched_edges);
        if (!fresh.empty() && cfg_.coverage_guidance) {
            corpus_.admit(res.consumed, coverage_fingerprint(res.touched_edges),
                          iter);
            corpus_.persist_entry(cfg_.corpus_dir,
                                  corpus_.entry(corpus_.size() - 1));
        }

        for (auto& r : res.reports) {
            if (dedup_.is_new(r.bug_class, r.site)) {
                r.iteration = iter;
                r.trigger = res.consumed;
                ttb.push_back({r.bug_class, r.site, elapsed_ns_, iter});
                out.report_lines.push_back(format_report_line(r));
                out.reports.push_back(std::move(r));
            } else {
                ++out.duplicate_bugs;
            }
        }
        if (cfg_.stop_on_first_bug && !res.reports.empty()) {
            stop = true;
            out.stopped_on_bug = true;
        }
        if (executions % cfg_.stats_interval == 0)
            emit_stats_line(executions, corpus_.size(), dedup_.unique());
    }

    emit_stats_line(executions, corpus_.size(), dedup_.unique());

    std::sort(ttb.begin(), ttb.end(), [](const TtbEntry& a, const TtbEntry& b) {
        return std::make_pair(static_cast<u8>(a.bug_class), a.site) <
               std::make_pair(static_cast<u8>(b.bug_class), b.site);
    });
    out.stats.executions = executions;
    out.stats.elapsed_ns = elapsed_ns_;
    out.stats.execs_per_s =
        elapsed_ns_ ? executions / (elapsed_ns_ * 1e-9) : 0.0;
    out.stats.covered_edges = campaign_cov_.covered_edges();
    out.stats.unique_bugs = dedup_.unique();
    out.stats.ttb = std::move(ttb);
    out.corpus_entries = corpus_.size();

    write_outputs(out);
    return out;
}

void Engine::write_outputs(const CampaignResult& result) {
    if (cfg_.out_dir.empty())
        return;
    namespace fs = std::filesystem;
    fs::create_directories(cfg_.out_dir);
    {
        std::ofstream f(fs::path(cfg_.out_dir) / "reports.txt",
                        std::ios::trunc);
        for (const auto& line : result.report_lines)
            f << line << "\n";
    }
    {
        std::ofstream f(fs::path(cfg_.out_dir) / "stats.txt", std::ios::trunc);
        f << format_stats_file(result.stats, result.corpus_entries);
    }
    {
        std::ofstream f(fs::path(cfg_.out_dir) / "campaign.meta",
                        std::ios::trunc);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(config_hash(cfg_)));
        f << "config_hash=" << buf << "\n" << serialize_config(cfg_);
    }
    fs::create_directories(fs::path(cfg_.out_dir) / "triggers");
    for (const auto& r : result.reports) {
        char name[96];
        std::snprintf(name, sizeof(name), "%s_%u.bin",
                      bug_class_name(r.bug_class), r.site);
        std::ofstream f(fs::path(cfg_.out_dir) / "triggers" / name,
                        std::ios::binary | std::ios::trunc);
        f.write(reinterpret_cast<const char*>(r.trigger.data()),
                static_cast<std::streamsize>(r.trigger.size()));
    }
}

IterationResult Engine::replay(std::vector<u8> input, u64 iteration_hint) {
    return run_iteration(std::move(input), iteration_hint);
}

}  // namespace vdf
