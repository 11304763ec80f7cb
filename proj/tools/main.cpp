// vdifuzz command-line front end. Talks to the core exclusively through the
// C API in vdifuzz.h.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vdifuzz.h"

namespace {

constexpr int kExitClean = 0;
constexpr int kExitBugs = 1;
constexpr int kExitUsage = 2;

struct ConfigHolder {
    vdf_config* cfg = vdf_config_new();
    ~ConfigHolder() { vdf_config_free(cfg); }
};

struct ResultHolder {
    vdf_result* res = nullptr;
    ~ResultHolder() { vdf_result_free(res); }
};

struct CommonOpts {
    std::string config_file;
    std::string seed, driver, max_iterations, budget_seconds, corpus, out;
    std::string delay_reduction;
    std::vector<std::string> irq;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_file, "campaign config file");
    cmd->add_option("--seed", o.seed, "campaign seed (u64)");
    cmd->add_option("--driver", o.driver, "model driver name");
    cmd->add_option("--irq", o.irq,
                    "interrupt policy: targeted | none | random MIN MAX")
        ->expected(1, 3);
    cmd->add_option("--delay-reduction", o.delay_reduction, "on | off");
    cmd->add_option("--max-iterations", o.max_iterations, "iteration cap");
    cmd->add_option("--budget-seconds", o.budget_seconds,
                    "campaign time budget (deterministic seconds)");
    cmd->add_option("--corpus", o.corpus, "corpus directory");
    cmd->add_option("--out", o.out, "output directory");
}

bool apply_common(const CommonOpts& o, vdf_config* cfg) {
    auto fail = [](const char* what) {
        std::cerr << "error: " << what << ": " << vdf_last_error() << "\n";
        return false;
    };
    if (!o.config_file.empty() &&
        vdf_config_load_file(cfg, o.config_file.c_str()) != VDF_OK)
        return fail("config");
    auto set = [&](const char* key, const std::string& v) {
        return v.empty() || vdf_config_set(cfg, "", key, v.c_str()) == VDF_OK;
    };
    if (!set("seed", o.seed)) return fail("--seed");
    if (!set("driver", o.driver)) return fail("--driver");
    if (!set("max_iterations", o.max_iterations)) return fail("--max-iterations");
    if (!set("budget_seconds", o.budget_seconds)) return fail("--budget-seconds");
    if (!set("corpus_dir", o.corpus)) return fail("--corpus");
    if (!set("out_dir", o.out)) return fail("--out");
    if (!set("delay_reduction", o.delay_reduction)) return fail("--delay-reduction");
    if (!o.irq.empty()) {
        std::string joined;
        for (size_t i = 0; i < o.irq.size(); ++i)
            joined += (i ? " " : "") + o.irq[i];
        if (vdf_config_set(cfg, "", "irq", joined.c_str()) != VDF_OK)
            return fail("--irq");
    }
    return true;
}

bool validate_or_report(vdf_config* cfg) {
    char* errs = vdf_config_validate(cfg);
    if (!errs)
        return true;
    std::cerr << "invalid configuration:\n" << errs << "\n";
    vdf_string_free(errs);
    return false;
}

int cmd_fuzz(const CommonOpts& opts) {
    ConfigHolder c;
    if (!apply_common(opts, c.cfg) || !validate_or_report(c.cfg))
        return kExitUsage;
    ResultHolder r;
    auto status = vdf_campaign_run(
        c.cfg,
        [](const char* line, void*) { std::cout << line << "\n"; }, nullptr,
        &r.res);
    if (status != VDF_OK) {
        std::cerr << "campaign failed: " << vdf_last_error() << "\n";
        return status == VDF_ERR_CONFIG ? kExitUsage : kExitUsage;
    }
    char* stats = vdf_result_stats_text(r.res);
    std::cout << stats;
    vdf_string_free(stats);
    size_t n = vdf_result_report_count(r.res);
    for (size_t i = 0; i < n; ++i)
        std::cout << vdf_result_report_line(r.res, i) << "\n";
    return n ? kExitBugs : kExitClean;
}

int cmd_replay(const CommonOpts& opts, const std::string& input,
               uint64_t iteration) {
    ConfigHolder c;
    if (!apply_common(opts, c.cfg) || !validate_or_report(c.cfg))
        return kExitUsage;

    // A campaign.meta next to the input records the originating config.
    namespace fs = std::filesystem;
    fs::path meta = fs::path(input).parent_path() / "campaign.meta";
    if (meta.filename() == "campaign.meta" && fs::exists(meta)) {
        std::ifstream f(meta);
        std::string first;
        std::getline(f, first);
        char buf[32];
        std::snprintf(buf, sizeof(buf), "config_hash=%016llx",
                      static_cast<unsigned long long>(vdf_config_hash(c.cfg)));
        if (first != buf)
            std::cerr << "warning: config hash differs from the campaign that "
                         "stored this input; replaying anyway\n";
    }

    ResultHolder r;
    if (vdf_replay_file(c.cfg, input.c_str(), iteration, &r.res) != VDF_OK) {
        std::cerr << "replay failed: " << vdf_last_error() << "\n";
        return kExitUsage;
    }
    if (vdf_result_underrun(r.res))
        std::cout << "note: input underruns stream; generated extension was "
                     "used and results may differ from the original run\n";
    size_t n = vdf_result_report_count(r.res);
    for (size_t i = 0; i < n; ++i)
        std::cout << vdf_result_report_line(r.res, i) << "\n";
    std::cout << (n ? "result: violation\n" : "result: clean\n");
    return n ? kExitBugs : kExitClean;
}

// Minimal parser for the documented report line format.
std::map<std::string, std::string> parse_line_fields(const std::string& line) {
    std::map<std::string, std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) {
        auto eq = tok.find('=');
        if (eq != std::string::npos)
            out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return out;
}

int cmd_triage(const std::string& report_file) {
    std::ifstream f(report_file);
    if (!f) {
        std::cerr << "cannot open " << report_file << "\n";
        return kExitUsage;
    }
    struct Group {
        size_t count = 0;
        std::string severity, driver, first_iter;
    };
    std::map<std::pair<std::string, std::string>, Group> groups;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty())
            continue;
        auto fields = parse_line_fields(line);
        auto key = std::make_pair(fields["class"], fields["site"]);
        auto& g = groups[key];
        if (g.count == 0) {
            g.severity = fields["severity"];
            g.driver = fields["driver"];
            g.first_iter = fields["iter"];
        }
        ++g.count;
    }
    std::cout << "dedup_key                              severity  driver  "
                 "count  first_iter\n";
    for (const auto& [key, g] : groups) {
        std::printf("%-24s site=%-10s %-9s %-7s %-6zu %s\n", key.first.c_str(),
                    key.second.c_str(), g.severity.c_str(), g.driver.c_str(),
                    g.count, g.first_iter.c_str());
    }
    std::cout << groups.size() << " deduplicated bug(s)\n";
    return kExitClean;
}

int cmd_stats(const std::string& path) {
    namespace fs = std::filesystem;
    fs::path p = path;
    if (fs::is_directory(p))
        p /= "stats.txt";
    std::ifstream f(p);
    if (!f) {
        std::cerr << "cannot open " << p.string() << "\n";
        return kExitUsage;
    }
    std::cout << f.rdbuf();
    return kExitClean;
}

int cmd_experiment(const std::string& name, int runs, uint64_t seed,
                   const std::string& out_dir) {
    char* table = nullptr;
    char* csv = nullptr;
    if (vdf_experiment_run(name.c_str(), runs, seed, &table, &csv) != VDF_OK) {
        std::cerr << "experiment failed: " << vdf_last_error() << "\n";
        return kExitUsage;
    }
    std::cout << table;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        auto csv_path =
            std::filesystem::path(out_dir) / ("experiment_" + name + ".csv");
        std::ofstream f(csv_path, std::ios::trunc);
        f << csv;
        std::cout << "csv written to " << csv_path.string() << "\n";
    }
    vdf_string_free(table);
    vdf_string_free(csv);
    return kExitClean;
}

int cmd_list_drivers() {
    int n = vdf_driver_count();
    for (int i = 0; i < n; ++i)
        std::cout << vdf_driver_name(i) << "\n";
    return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vdifuzz: virtual-device-interface fuzzer"};
    app.require_subcommand(1);

    CommonOpts fuzz_opts;
    auto* fuzz = app.add_subcommand("fuzz", "run a fuzzing campaign");
    add_common(fuzz, fuzz_opts);

    CommonOpts replay_opts;
    std::string replay_input;
    uint64_t replay_iteration = 0;
    auto* replay = app.add_subcommand("replay", "re-run one stored input");
    add_common(replay, replay_opts);
    replay->add_option("input", replay_input, "input .bin file")->required();
    replay->add_option("--iteration", replay_iteration,
                       "iteration index the input was recorded at");

    std::string triage_file;
    auto* triage =
        app.add_subcommand("triage", "group a report file by dedup key");
    triage->add_option("reports", triage_file, "reports.txt")->required();

    std::string stats_path;
    auto* stats =
        app.add_subcommand("stats", "print campaign stats from an out dir");
    stats->add_option("path", stats_path, "out dir or stats.txt")->required();

    std::string exp_name, exp_out;
    int exp_runs = 30;
    uint64_t exp_seed = 1;
    auto* exp = app.add_subcommand("experiment",
                                   "run a paired-configuration experiment");
    exp->add_option("name", exp_name, "delay | irq | ttb")->required();
    exp->add_option("--runs", exp_runs, "repetitions");
    exp->add_option("--seed", exp_seed, "base seed");
    exp->add_option("--out", exp_out, "directory for the CSV");

    auto* list = app.add_subcommand("list-drivers", "print the driver catalog");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitClean : kExitUsage;
    }

    if (fuzz->parsed())
        return cmd_fuzz(fuzz_opts);
    if (replay->parsed())
        return cmd_replay(replay_opts, replay_input, replay_iteration);
    if (triage->parsed())
        return cmd_triage(triage_file);
    if (stats->parsed())
        return cmd_stats(stats_path);
    if (exp->parsed())
        return cmd_experiment(exp_name, exp_runs, exp_seed, exp_out);
    if (list->parsed())
        return cmd_list_drivers();
    return kExitUsage;
}
