#pragma once

#include <deque>
#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "core/config.hpp"
#include "core/corpus.hpp"
#include "core/coverage.hpp"
#include "core/env.hpp"
#include "core/harness.hpp"
#include "core/mutator.hpp"
#include "core/report.hpp"
#include "drivers/catalog.hpp"

namespace vdf {

enum class IterationStatus : u8 { Clean, Violation, Timeout };

struct IterationResult {
    IterationStatus status = IterationStatus::Clean;
    std::vector<BugReport> reports;  // classified; iteration/trigger stamped
                                     // by the campaign loop
    std::vector<u32> touched_edges;
    std::vector<u8> consumed;  // bytes that influenced execution
    u64 bytes_consumed = 0;
    u64 virtual_ns = 0;
    u64 host_ns = 0;
    bool underrun = false;  // generator had to extend the input
    bool deadlock = false;
    std::optional<std::string> env_error;
};

struct TtbEntry {
    BugClass bug_class = BugClass::Miscellaneous;
    SiteId site = 0;
    u64 first_ns = 0;  // campaign time at first trigger
    u64 iteration = 0;
};

struct ExecStats {
    u64 executions = 0;
    u64 elapsed_ns = 0;
    double execs_per_s = 0.0;
    u64 covered_edges = 0;
    u64 unique_bugs = 0;
    std::vector<TtbEntry> ttb;  // sorted by (class, site)
};

struct CampaignResult {
    ExecStats stats;
    std::vector<BugReport> reports;  // deduplicated
    std::vector<std::string> report_lines;
    u64 corpus_entries = 0;
    u64 duplicate_bugs = 0;
    u64 timeouts = 0;
    u64 env_errors = 0;
    bool stopped_on_bug = false;
};

std::string format_stats_file(const ExecStats& stats, u64 corpus_entries);

// Deduplication by (bug class, site).
class Deduper {
public:
    bool is_new(BugClass cls, SiteId site) {
        return seen_.insert({static_cast<u8>(cls), site}).second;
    }
    size_t unique() const { return seen_.size(); }

private:
    std::set<std::pair<u8, SiteId>> seen_;
};

// The campaign driver: mutate, execute, collect coverage, admit, classify,
// deduplicate. Campaign time is deterministic: simulated nanoseconds plus a
// fixed per-execution charge (exec_cost_ns), so throughput numbers, budgets
// and time-to-bug survive replays bit-for-bit. Host wall-clock only backs
// the per-iteration watchdog.
class Engine {
public:
    using StatsFn = std::function<void(const std::string&)>;

    explicit Engine(CampaignConfig cfg);

    void set_stats_callback(StatsFn fn) { stats_cb_ = std::move(fn); }

    CampaignResult run_campaign();
    // Re-run a single stored input. iteration_hint reconstructs the stream
    // seed of the originating iteration; inputs that carry their extensions
    // replay exactly regardless.
    IterationResult replay(std::vector<u8> input, u64 iteration_hint = 0);

    const CampaignConfig& config() const { return cfg_; }
    const DeviceConfig& device_config() const { return device_cfg_; }

private:
    struct CampaignSink final : ViolationSink {
        Scheduler* sched = nullptr;
        std::vector<ViolationEvent> events;
        bool hard_seen = false;

        bool on_violation(const ViolationEvent& ev) override {
            events.push_back(ev);
            if (!event_ends_iteration(ev.kind))
                return false;
            hard_seen = true;
            if (sched)
                sched->request_abort();
            return true;
        }

        void begin_iteration(Scheduler* s) {
            sched = s;
            events.clear();
            hard_seen = false;
        }
    };

    IterationResult run_iteration(std::vector<u8> candidate, u64 iteration);
    void emit_stats_line(u64 executions, u64 corpus, u64 bugs);
    void write_outputs(const CampaignResult& result);

    CampaignConfig cfg_;
    const CatalogEntry* entry_;
    DeviceConfig device_cfg_;
    StackPool pool_;
    CampaignSink sink_;
    Env env_;
    std::unique_ptr<DeviceInstance> device_;
    CoverageMap cov_;
    CampaignCoverage campaign_cov_;
    Corpus corpus_;
    Corpus empty_corpus_;  // what the mutator sees with guidance off
    Mutator mutator_;
    Deduper dedup_;
    u64 elapsed_ns_ = 0;
    StatsFn stats_cb_;
};

}  // namespace vdf
