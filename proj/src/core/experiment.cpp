#include "core/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace vdf {

namespace {

double median(std::vector<double> v) {
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

double mean(const std::vector<double>& v) {
    if (v.empty())
        return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), f, v);
    return buf;
}

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size())
            widths.resize(row.size(), 0);
        for (size_t i = 0; i < row.size(); ++i)
            widths[i] = std::max(widths[i], row[i].size());
    }
    std::ostringstream os;
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            os << row[i];
            if (i + 1 < row.size())
                os << std::string(widths[i] - row[i].size() + 2, ' ');
        }
        os << "\n";
    }
    return os.str();
}

// Campaign time at the first report, in seconds; the budget cap when the
// campaign found nothing.
double first_bug_seconds(const CampaignResult& r, double budget_s) {
    if (r.stats.ttb.empty())
        return budget_s;
    u64 first = r.stats.ttb.front().first_ns;
    for (const auto& t : r.stats.ttb)
        first = std::min(first, t.first_ns);
    return first * 1e-9;
}

}  // namespace

CampaignConfig archetype_fixture_config(BugArchetype a) {
    CampaignConfig cfg;
    cfg.max_iterations = 2000000;
    cfg.budget_seconds = 30.0;
    cfg.stop_on_first_bug = true;
    cfg.harness = HarnessKind::Extended;
    cfg.harness_ops = 2;
    switch (a) {
    case BugArchetype::SwiotlbLenOverflow:
        cfg.driver = "vring-consumer";
        break;
    case BugArchetype::SharedPointerDeref:
        cfg.driver = "netdesc";
        break;
    case BugArchetype::ProbeErrUaf:
        cfg.driver = "probe-err";
        cfg.harness = HarnessKind::Default;
        break;
    case BugArchetype::UnvalidatedIndex:
        cfg.driver = "idx-lookup";
        break;
    case BugArchetype::DeadlockWait:
        cfg.driver = "blocker";
        cfg.harness_ops = 1;
        cfg.irq.kind = IrqPolicy::Kind::None;
        break;
    case BugArchetype::UnboundedAlloc:
        cfg.driver = "hogger";
        break;
    case BugArchetype::AssertionBug:
        cfg.driver = "asserter";
        cfg.harness_ops = 4;
        break;
    case BugArchetype::DivByZero:
        cfg.driver = "divider";
        cfg.harness_ops = 4;
        break;
    }
    return cfg;
}

ExperimentResult run_experiment_delay(int runs, u64 seed) {
    ExperimentResult out;
    out.name = "delay";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"run", "seed", "execs_per_s(on)", "execs_per_s(off)", "ratio"});
    std::ostringstream csv;
    csv << "run,seed,execs_per_s_reduction_on,execs_per_s_reduction_off,ratio\n";
    std::vector<double> ratios;

    for (int r = 0; r < runs; ++r) {
        CampaignConfig cfg;
        cfg.driver = "laggard";
        cfg.harness = HarnessKind::Extended;
        cfg.harness_ops = 4;
        cfg.budget_seconds = 60.0;
        cfg.max_iterations = ~0ull >> 1;
        cfg.seed = seed + static_cast<u64>(r);

        cfg.delay_reduction = true;
        double on = Engine(cfg).run_campaign().stats.execs_per_s;
        cfg.delay_reduction = false;
        double off = Engine(cfg).run_campaign().stats.execs_per_s;
        double ratio = off > 0 ? on / off : 0.0;
        ratios.push_back(ratio);
        rows.push_back({std::to_string(r), std::to_string(cfg.seed),
                        fmt("%.2f", on), fmt("%.2f", off), fmt("%.2f", ratio)});
        csv << r << "," << cfg.seed << "," << fmt("%.2f", on) << ","
            << fmt("%.2f", off) << "," << fmt("%.2f", ratio) << "\n";
    }
    rows.push_back({"median", "", "", "", fmt("%.2f", median(ratios))});
    rows.push_back({"mean", "", "", "", fmt("%.2f", mean(ratios))});
    out.delay_ratio_median = median(ratios);
    out.table = render_table(rows);
    out.csv = csv.str();
    return out;
}

ExperimentResult run_experiment_irq(int runs, u64 seed) {
    ExperimentResult out;
    out.name = "irq";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"run", "seed", "ttb_targeted_s", "ttb_random_s"});
    std::ostringstream csv;
    csv << "run,seed,ttb_targeted_s,ttb_random_s\n";
    std::vector<double> targeted, random;

    for (int r = 0; r < runs; ++r) {
        CampaignConfig cfg;
        cfg.driver = "multi-gate";
        cfg.harness = HarnessKind::Default;
        cfg.stop_on_first_bug = true;
        cfg.budget_seconds = 120.0;
        cfg.max_iterations = 2000000;
        cfg.seed = seed + static_cast<u64>(r);

        cfg.irq.kind = IrqPolicy::Kind::Targeted;
        double t = first_bug_seconds(Engine(cfg).run_campaign(),
                                     cfg.budget_seconds);
        cfg.irq.kind = IrqPolicy::Kind::Random;
        cfg.irq.min_ns = 1;
        cfg.irq.max_ns = 1000;
        double u = first_bug_seconds(Engine(cfg).run_campaign(),
                                     cfg.budget_seconds);
        targeted.push_back(t);
        random.push_back(u);
        rows.push_back({std::to_string(r), std::to_string(cfg.seed),
                        fmt("%.9f", t), fmt("%.9f", u)});
        csv << r << "," << cfg.seed << "," << fmt("%.9f", t) << ","
            << fmt("%.9f", u) << "\n";
    }
    out.ttb_targeted_median_s = median(targeted);
    out.ttb_random_median_s = median(random);
    rows.push_back({"median", "", fmt("%.9f", out.ttb_targeted_median_s),
                    fmt("%.9f", out.ttb_random_median_s)});
    rows.push_back({"mean", "", fmt("%.9f", mean(targeted)),
                    fmt("%.9f", mean(random))});
    out.table = render_table(rows);
    out.csv = csv.str();
    return out;
}

ExperimentResult run_experiment_ttb(int runs, u64 seed) {
    ExperimentResult out;
    out.name = "ttb";
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"driver", "runs", "median_ttb_s", "mean_ttb_s"});
    std::ostringstream csv;
    csv << "driver,run,seed,ttb_s\n";

    for (int i = 0; i < kArchetypeCount; ++i) {
        auto a = static_cast<BugArchetype>(i);
        CampaignConfig base = archetype_fixture_config(a);
        std::vector<double> ttbs;
        for (int r = 0; r < runs; ++r) {
            CampaignConfig cfg = base;
            cfg.seed = seed + static_cast<u64>(r);
            double t = first_bug_seconds(Engine(cfg).run_campaign(),
                                         cfg.budget_seconds);
            ttbs.push_back(t);
            csv << base.driver << "," << r << "," << cfg.seed << ","
                << fmt("%.9f", t) << "\n";
        }
        out.ttb_median_s_by_driver[base.driver] = median(ttbs);
        rows.push_back({base.driver, std::to_string(runs),
                        fmt("%.9f", median(ttbs)), fmt("%.9f", mean(ttbs))});
    }
    out.table = render_table(rows);
    out.csv = csv.str();
    return out;
}

bool run_experiment(const std::string& name, int runs, u64 seed,
                    ExperimentResult& out) {
    if (name == "delay") {
        out = run_experiment_delay(runs, seed);
        return true;
    }
    if (name == "irq") {
        out = run_experiment_irq(runs, seed);
        return true;
    }
    if (name == "ttb") {
        out = run_experiment_ttb(runs, seed);
        return true;
    }
    return false;
}

}  // namespace vdf
