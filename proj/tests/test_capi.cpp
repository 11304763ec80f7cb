#include "doctest.h"

#include <cstring>
#include <string>

#include "vdifuzz.h"

namespace {

struct Cfg {
    vdf_config* c = vdf_config_new();
    ~Cfg() { vdf_config_free(c); }
};

}  // namespace

TEST_CASE("config keys set and serialize round-trip") {
    Cfg cfg;
    CHECK(vdf_config_set(cfg.c, "", "driver", "echo") == VDF_OK);
    CHECK(vdf_config_set(cfg.c, "", "seed", "7") == VDF_OK);
    CHECK(vdf_config_set(cfg.c, "harness", "kind", "extended") == VDF_OK);
    CHECK(vdf_config_set(cfg.c, "", "bogus", "1") == VDF_ERR_CONFIG);
    CHECK(std::string(vdf_last_error()).find("bogus") != std::string::npos);

    char* text = vdf_config_serialize(cfg.c);
    REQUIRE(text);
    CHECK(std::string(text).find("driver = echo") != std::string::npos);
    vdf_string_free(text);

    char* errs = vdf_config_validate(cfg.c);
    CHECK(errs == nullptr);
}

TEST_CASE("validation failures come back as messages") {
    Cfg cfg;
    CHECK(vdf_config_set(cfg.c, "", "driver", "missing-driver") == VDF_OK);
    char* errs = vdf_config_validate(cfg.c);
    REQUIRE(errs);
    CHECK(std::string(errs).find("missing-driver") != std::string::npos);
    vdf_string_free(errs);
}

TEST_CASE("the driver catalog is visible through the API") {
    int n = vdf_driver_count();
    CHECK(n >= 20);
    bool found = false;
    for (int i = 0; i < n; ++i)
        if (std::string(vdf_driver_name(i)) == "vring-consumer")
            found = true;
    CHECK(found);
    CHECK(vdf_driver_name(n) == nullptr);
}

TEST_CASE("a small campaign runs and reports through the API") {
    Cfg cfg;
    REQUIRE(vdf_config_set(cfg.c, "", "driver", "echo") == VDF_OK);
    REQUIRE(vdf_config_set(cfg.c, "", "max_iterations", "50") == VDF_OK);
    int stats_lines = 0;
    vdf_result* res = nullptr;
    auto cb = [](const char*, void* user) { ++*static_cast<int*>(user); };
    REQUIRE(vdf_campaign_run(cfg.c, cb, &stats_lines, &res) == VDF_OK);
    CHECK(vdf_result_executions(res) == 50);
    CHECK(vdf_result_unique_bugs(res) == 0);
    CHECK(vdf_result_covered_edges(res) > 0);
    CHECK(stats_lines >= 1);
    char* stats = vdf_result_stats_text(res);
    CHECK(std::string(stats).find("executions=50") != std::string::npos);
    vdf_string_free(stats);
    vdf_result_free(res);
}

TEST_CASE("replay surfaces reports and the underrun flag") {
    Cfg cfg;
    REQUIRE(vdf_config_set(cfg.c, "", "driver", "asserter") == VDF_OK);
    REQUIRE(vdf_config_set(cfg.c, "harness", "kind", "extended") == VDF_OK);
    const uint8_t witness[] = {0x00, 0x00, 0xEE};
    vdf_result* res = nullptr;
    REQUIRE(vdf_replay(cfg.c, witness, sizeof(witness), 0, &res) == VDF_OK);
    REQUIRE(vdf_result_report_count(res) == 1);
    std::string line = vdf_result_report_line(res, 0);
    CHECK(line.find("class=assertion-failure") == 0);
    CHECK(vdf_result_report_line(res, 1) == nullptr);
    vdf_result_free(res);

    vdf_result* short_res = nullptr;
    const uint8_t one = 0x00;
    REQUIRE(vdf_replay(cfg.c, &one, 1, 0, &short_res) == VDF_OK);
    CHECK(vdf_result_underrun(short_res) == 1);
    vdf_result_free(short_res);
}

TEST_CASE("invalid campaign configs are rejected up front") {
    Cfg cfg;
    vdf_result* res = nullptr;
    CHECK(vdf_campaign_run(cfg.c, nullptr, nullptr, &res) == VDF_ERR_CONFIG);
    CHECK(res == nullptr);
}

TEST_CASE("unknown experiments are argument errors") {
    char* table = nullptr;
    CHECK(vdf_experiment_run("nope", 1, 1, &table, nullptr) == VDF_ERR_ARG);
    CHECK(vdf_experiment_run("ttb", 0, 1, &table, nullptr) == VDF_ERR_ARG);
}
