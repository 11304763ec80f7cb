#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "core/engine.hpp"
#include "core/experiment.hpp"
#include "env_fixture.hpp"

using namespace vdf;

namespace {

CampaignConfig echo_config() {
    CampaignConfig cfg;
    cfg.driver = "echo";
    cfg.harness = HarnessKind::Extended;
    cfg.harness_ops = 2;
    cfg.max_iterations = 200;
    cfg.budget_seconds = 10.0;
    return cfg;
}

}  // namespace

TEST_CASE("zero iterations means zero executions and empty stats") {
    CampaignConfig cfg = echo_config();
    cfg.max_iterations = 0;
    Engine engine(cfg);
    auto result = engine.run_campaign();
    CHECK(result.stats.executions == 0);
    CHECK(result.stats.elapsed_ns == 0);
    CHECK(result.stats.execs_per_s == 0.0);
    CHECK(result.stats.covered_edges == 0);
    CHECK(result.reports.empty());
}

TEST_CASE("a benign driver with a benign input is clean") {
    CampaignConfig cfg = echo_config();
    cfg.harness = HarnessKind::Default;
    Engine engine(cfg);
    auto res = engine.replay(std::vector<u8>(64, 0x00));
    CHECK(res.status == IterationStatus::Clean);
    CHECK(res.reports.empty());
}

TEST_CASE("campaigns are deterministic: same config, same everything") {
    auto run_once = [] {
        CampaignConfig cfg = echo_config();
        cfg.max_iterations = 500;
        Engine engine(cfg);
        std::vector<std::string> lines;
        engine.set_stats_callback(
            [&lines](const std::string& l) { lines.push_back(l); });
        auto result = engine.run_campaign();
        return std::make_tuple(result.stats.executions,
                               result.stats.elapsed_ns,
                               result.stats.covered_edges,
                               result.report_lines,
                               format_stats_file(result.stats,
                                                 result.corpus_entries),
                               lines);
    };
    CHECK(run_once() == run_once());
}

TEST_CASE("the campaign elapsed time charges exec cost per iteration") {
    CampaignConfig cfg = echo_config();
    cfg.max_iterations = 10;
    cfg.exec_cost_ns = 12345;
    Engine engine(cfg);
    auto result = engine.run_campaign();
    CHECK(result.stats.executions == 10);
    // echo never advances virtual time, so elapsed is exactly the charge.
    CHECK(result.stats.elapsed_ns == 10 * 12345ull);
}

TEST_CASE("stats stream lines carry the documented fields") {
    CampaignConfig cfg = echo_config();
    cfg.max_iterations = 30;
    cfg.stats_interval = 10;
    Engine engine(cfg);
    std::vector<std::string> lines;
    engine.set_stats_callback(
        [&lines](const std::string& l) { lines.push_back(l); });
    engine.run_campaign();
    REQUIRE(lines.size() == 4);  // 3 periodic + 1 final
    for (const auto& l : lines) {
        CHECK(l.find("iter=") == 0);
        CHECK(l.find("execs_per_s=") != std::string::npos);
        CHECK(l.find("edges=") != std::string::npos);
        CHECK(l.find("corpus=") != std::string::npos);
        CHECK(l.find("bugs=") != std::string::npos);
    }
}

TEST_CASE("campaign outputs are written and replayable") {
    namespace fs = std::filesystem;
    auto out = fs::temp_directory_path() / "vdf_engine_out";
    fs::remove_all(out);

    CampaignConfig cfg = archetype_fixture_config(BugArchetype::AssertionBug);
    cfg.seed = 1;
    cfg.out_dir = out.string();
    cfg.max_iterations = 100000;
    Engine engine(cfg);
    auto result = engine.run_campaign();
    REQUIRE(result.stopped_on_bug);
    REQUIRE(result.reports.size() == 1);
    CHECK(fs::exists(out / "reports.txt"));
    CHECK(fs::exists(out / "stats.txt"));
    CHECK(fs::exists(out / "campaign.meta"));

    // The stored trigger reproduces the same dedup key under replay.
    std::ifstream f(out / "reports.txt");
    std::string line;
    REQUIRE(std::getline(f, line));
    BugReport parsed;
    REQUIRE(parse_report_line(line, parsed));
    Engine replayer(cfg);
    auto res = replayer.replay(parsed.trigger, parsed.iteration);
    REQUIRE(!res.reports.empty());
    CHECK(res.reports.front().dedup_key() == parsed.dedup_key());
    fs::remove_all(out);
}

TEST_CASE("replay flags inputs that underrun into generated data") {
    CampaignConfig cfg = echo_config();
    Engine engine(cfg);
    // Extended harness consumes op/len/payload bytes; a 1-byte input cannot
    // cover that.
    auto res = engine.replay({0x01});
    CHECK(res.underrun);
    auto res2 = engine.replay(res.consumed);  // grown transcript replays whole
    CHECK(!res2.underrun);
    CHECK(res2.touched_edges == res.touched_edges);
}

TEST_CASE("corpus entries persist and seed later campaigns") {
    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path() / "vdf_engine_corpus";
    fs::remove_all(dir);

    CampaignConfig cfg = echo_config();
    cfg.corpus_dir = dir.string();
    cfg.max_iterations = 50;
    Engine first(cfg);
    auto r1 = first.run_campaign();
    CHECK(r1.corpus_entries > 0);

    size_t files = 0;
    for (auto& e : fs::directory_iterator(dir))
        files += e.is_regular_file() ? 1 : 0;
    CHECK(files == r1.corpus_entries);

    Engine second(cfg);
    auto r2 = second.run_campaign();
    CHECK(r2.stats.covered_edges >= r1.stats.covered_edges);
    fs::remove_all(dir);
}

TEST_CASE("coverage guidance cracks the magic gate; blind search does not") {
    // Deterministic smoke version of the acceptance run, small budget: the
    // guided engine must make byte-level progress quickly.
    CampaignConfig cfg;
    cfg.driver = "magic-gate";
    cfg.seed = 1;
    cfg.max_iterations = 60000;
    cfg.budget_seconds = 1e9;
    cfg.stop_on_first_bug = true;
    Engine guided(cfg);
    auto r = guided.run_campaign();
    CHECK(r.stopped_on_bug);
    REQUIRE(!r.reports.empty());
    CHECK(r.reports.front().bug_class == BugClass::AssertionFailure);

    cfg.coverage_guidance = false;
    cfg.max_iterations = 20000;
    Engine blind(cfg);
    auto rb = blind.run_campaign();
    CHECK(!rb.stopped_on_bug);
}

TEST_CASE("targeted injection alternates the lines of a 2-line device") {
    vdf_test::EnvFixture fx(vdf_test::passthrough_pci_config(2));
    std::vector<u32> delivered;
    fx.device->bind_irq([&](u32 line) { delivered.push_back(line); });
    TargetedInjector injector(*fx.device);
    fx.env.sched().set_waiter_callback(
        [&](const WaiterInfo& w) { injector.on_waiter_registered(w); });
    fx.run([&] {
        for (int i = 0; i < 4; ++i)
            fx.env.wait_event([] { return false; }, u64{100}, 1, "gate");
    });
    CHECK(delivered == std::vector<u32>{0, 1, 0, 1});
}

TEST_CASE("targeted injection raises exactly once per registration") {
    vdf_test::EnvFixture fx(vdf_test::passthrough_pci_config(1));
    fx.device->bind_irq([](u32) {});
    TargetedInjector injector(*fx.device);
    fx.env.sched().set_waiter_callback(
        [&](const WaiterInfo& w) { injector.on_waiter_registered(w); });
    fx.run([&] {
        for (int i = 0; i < 5; ++i)
            fx.env.wait_event([] { return false; }, u64{50}, 1, "gate");
    });
    CHECK(fx.device->raises() == 5);
    CHECK(fx.env.sched().waiter_registrations() == 5);
}

TEST_CASE("random injection fires only when virtual time advances") {
    vdf_test::EnvFixture fx(vdf_test::passthrough_pci_config(1));
    fx.device->bind_irq([](u32) {});
    RandomInjector injector(*fx.device, 7, 100, 100);  // every 100 ns
    fx.env.sched().set_injection_source(&injector);
    fx.run([&] {
        // No waits, no delays: virtual time never moves, no injections.
        for (int i = 0; i < 10; ++i)
            fx.env.yield();
        CHECK(fx.device->raises() == 0);
        // A 250 ns wait window passes injection instants 100 and 200.
        fx.env.wait_event([] { return false; }, u64{250}, 1, "window");
    });
    CHECK(fx.device->raises() == 2);
}

TEST_CASE("degenerate random interval injects at every nanosecond step") {
    vdf_test::EnvFixture fx(vdf_test::passthrough_pci_config(1));
    fx.device->bind_irq([](u32) {});
    RandomInjector injector(*fx.device, 7, 1, 1);
    fx.env.sched().set_injection_source(&injector);
    fx.run([&] { fx.env.wait_event([] { return false; }, u64{5}, 1, "w"); });
    CHECK(fx.device->raises() == 5);
}

TEST_CASE("random schedules are deterministic per seed") {
    auto run_once = [](u64 seed) {
        vdf_test::EnvFixture fx(vdf_test::passthrough_pci_config(1));
        std::vector<u64> times;
        fx.device->bind_irq([&](u32) { times.push_back(fx.env.now_ns()); });
        RandomInjector injector(*fx.device, seed, 1, 1000);
        fx.env.sched().set_injection_source(&injector);
        fx.run([&] {
            fx.env.wait_event([] { return false; }, u64{3000}, 1, "w");
        });
        return times;
    };
    CHECK(run_once(3) == run_once(3));
    CHECK(run_once(3) != run_once(4));
}

TEST_CASE("deadlock iterations surface as timeout with a report") {
    CampaignConfig cfg = archetype_fixture_config(BugArchetype::DeadlockWait);
    Engine engine(cfg);
    auto res = engine.replay({0x00, 0x00});
    CHECK(res.status == IterationStatus::Timeout);
    CHECK(res.deadlock);
    REQUIRE(!res.reports.empty());
    CHECK(res.reports.front().bug_class == BugClass::Deadlock);
    // The stalled iteration consumed its whole simulated budget.
    CHECK(res.virtual_ns == static_cast<u64>(cfg.iteration_timeout_seconds * 1e9));
}
