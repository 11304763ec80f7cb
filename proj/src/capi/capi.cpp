#include "vdifuzz.h"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "core/config.hpp"
#include "core/engine.hpp"
#include "core/experiment.hpp"
#include "drivers/catalog.hpp"

using namespace vdf;

struct vdf_config {
    CampaignConfig cfg;
};

struct vdf_result {
    bool is_replay = false;
    CampaignResult campaign;
    std::vector<std::string> replay_lines;
    IterationResult replay;
};

namespace {

thread_local std::string g_last_error;

void set_error(std::string msg) {
    g_last_error = std::move(msg);
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* vdf_version(void) {
    return "0.1.0";
}

const char* vdf_last_error(void) {
    return g_last_error.c_str();
}

void vdf_string_free(char* s) {
    std::free(s);
}

vdf_config* vdf_config_new(void) {
    return new vdf_config{};
}

void vdf_config_free(vdf_config* cfg) {
    delete cfg;
}

vdf_status vdf_config_load_file(vdf_config* cfg, const char* path) {
    if (!cfg || !path) {
        set_error("null argument");
        return VDF_ERR_ARG;
    }
    std::ifstream probe(path);
    if (!probe) {
        set_error(std::string("cannot open config file: ") + path);
        return VDF_ERR_IO;
    }
    std::vector<std::string> errors;
    CampaignConfig parsed;
    if (!load_config_file(path, parsed, errors)) {
        std::ostringstream os;
        for (size_t i = 0; i < errors.size(); ++i)
            os << (i ? "\n" : "") << errors[i];
        set_error(os.str());
        return VDF_ERR_CONFIG;
    }
    cfg->cfg = std::move(parsed);
    return VDF_OK;
}

vdf_status vdf_config_set(vdf_config* cfg, const char* section,
                          const char* key, const char* value) {
    if (!cfg || !section || !key || !value) {
        set_error("null argument");
        return VDF_ERR_ARG;
    }
    std::string err;
    if (!apply_config_kv(cfg->cfg, section, key, value, err)) {
        set_error(err);
        return VDF_ERR_CONFIG;
    }
    return VDF_OK;
}

char* vdf_config_serialize(const vdf_config* cfg) {
    return cfg ? dup_string(serialize_config(cfg->cfg)) : nullptr;
}

char* vdf_config_validate(const vdf_config* cfg) {
    if (!cfg)
        return dup_string("null config");
    auto errs = validate_config(cfg->cfg);
    if (errs.empty())
        return nullptr;
    std::ostringstream os;
    for (size_t i = 0; i < errs.size(); ++i)
        os << (i ? "\n" : "") << errs[i];
    return dup_string(os.str());
}

uint64_t vdf_config_hash(const vdf_config* cfg) {
    return cfg ? config_hash(cfg->cfg) : 0;
}

int vdf_driver_count(void) {
    return static_cast<int>(driver_catalog().size());
}

const char* vdf_driver_name(int index) {
    const auto& cat = driver_catalog();
    if (index < 0 || static_cast<size_t>(index) >= cat.size())
        return nullptr;
    return cat[static_cast<size_t>(index)].info.name.c_str();
}

vdf_status vdf_campaign_run(const vdf_config* cfg, vdf_stats_fn stats_cb,
                            void* user, vdf_result** out) {
    if (!cfg || !out) {
        set_error("null argument");
        return VDF_ERR_ARG;
    }
    auto errs = validate_config(cfg->cfg);
    if (!errs.empty()) {
        std::ostringstream os;
        for (size_t i = 0; i < errs.size(); ++i)
            os << (i ? "\n" : "") << errs[i];
        set_error(os.str());
        return VDF_ERR_CONFIG;
    }
    try {
        Engine engine(cfg->cfg);
        if (stats_cb)
            engine.set_stats_callback(
                [stats_cb, user](const std::string& line) {
                    stats_cb(line.c_str(), user);
                });
        auto* res = new vdf_result{};
        res->campaign = engine.run_campaign();
        *out = res;
        return VDF_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return VDF_ERR_RUNTIME;
    }
}

vdf_status vdf_replay(const vdf_config* cfg, const uint8_t* input, size_t len,
                      uint64_t iteration_hint, vdf_result** out) {
    if (!cfg || !out || (len && !input)) {
        set_error("null argument");
        return VDF_ERR_ARG;
    }
    auto errs = validate_config(cfg->cfg);
    if (!errs.empty()) {
        std::ostringstream os;
        for (size_t i = 0; i < errs.size(); ++i)
            os << (i ? "\n" : "") << errs[i];
        set_error(os.str());
        return VDF_ERR_CONFIG;
    }
    try {
        Engine engine(cfg->cfg);
        auto* res = new vdf_result{};
        res->is_replay = true;
        res->replay =
            engine.replay(std::vector<u8>(input, input + len), iteration_hint);
        for (auto& r : res->replay.reports) {
            BugReport line = r;
            line.iteration = iteration_hint;
            line.trigger = res->replay.consumed;
            res->replay_lines.push_back(format_report_line(line));
        }
        *out = res;
        return VDF_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return VDF_ERR_RUNTIME;
    }
}

vdf_status vdf_replay_file(const vdf_config* cfg, const char* path,
                           uint64_t iteration_hint, vdf_result** out) {
    if (!path) {
        set_error("null path");
        return VDF_ERR_ARG;
    }
    std::ifstream f(path, std::ios::binary);
    if (!f) {
        set_error(std::string("cannot open input: ") + path);
        return VDF_ERR_IO;
    }
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                               std::istreambuf_iterator<char>());
    return vdf_replay(cfg, bytes.data(), bytes.size(), iteration_hint, out);
}

void vdf_result_free(vdf_result* res) {
    delete res;
}

uint64_t vdf_result_executions(const vdf_result* res) {
    if (!res)
        return 0;
    return res->is_replay ? 1 : res->campaign.stats.executions;
}

double vdf_result_elapsed_seconds(const vdf_result* res) {
    if (!res)
        return 0;
    return res->is_replay ? res->replay.virtual_ns * 1e-9
                          : res->campaign.stats.elapsed_ns * 1e-9;
}

double vdf_result_execs_per_second(const vdf_result* res) {
    return res && !res->is_replay ? res->campaign.stats.execs_per_s : 0.0;
}

uint64_t vdf_result_covered_edges(const vdf_result* res) {
    if (!res)
        return 0;
    return res->is_replay ? res->replay.touched_edges.size()
                          : res->campaign.stats.covered_edges;
}

uint64_t vdf_result_unique_bugs(const vdf_result* res) {
    if (!res)
        return 0;
    return res->is_replay ? res->replay.reports.size()
                          : res->campaign.stats.unique_bugs;
}

uint64_t vdf_result_corpus_entries(const vdf_result* res) {
    return res && !res->is_replay ? res->campaign.corpus_entries : 0;
}

int vdf_result_underrun(const vdf_result* res) {
    return res && res->is_replay && res->replay.underrun ? 1 : 0;
}

size_t vdf_result_report_count(const vdf_result* res) {
    if (!res)
        return 0;
    return res->is_replay ? res->replay_lines.size()
                          : res->campaign.report_lines.size();
}

const char* vdf_result_report_line(const vdf_result* res, size_t index) {
    if (!res)
        return nullptr;
    const auto& lines =
        res->is_replay ? res->replay_lines : res->campaign.report_lines;
    return index < lines.size() ? lines[index].c_str() : nullptr;
}

char* vdf_result_stats_text(const vdf_result* res) {
    if (!res)
        return nullptr;
    if (res->is_replay) {
        ExecStats s;
        s.executions = 1;
        s.elapsed_ns = res->replay.virtual_ns;
        s.covered_edges = res->replay.touched_edges.size();
        s.unique_bugs = res->replay.reports.size();
        return dup_string(format_stats_file(s, 0));
    }
    return dup_string(
        format_stats_file(res->campaign.stats, res->campaign.corpus_entries));
}

vdf_status vdf_experiment_run(const char* name, int runs, uint64_t seed,
                              char** table_out, char** csv_out) {
    if (!name || runs <= 0) {
        set_error("name required and runs must be positive");
        return VDF_ERR_ARG;
    }
    try {
        ExperimentResult res;
        if (!run_experiment(name, runs, seed, res)) {
            set_error(std::string("unknown experiment: ") + name +
                      " (expected delay, irq or ttb)");
            return VDF_ERR_ARG;
        }
        if (table_out)
            *table_out = dup_string(res.table);
        if (csv_out)
            *csv_out = dup_string(res.csv);
        return VDF_OK;
    } catch (const std::exception& e) {
        set_error(e.what());
        return VDF_ERR_RUNTIME;
    }
}

}  // extern "C"
