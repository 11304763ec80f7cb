/*
 * vdifuzz — coverage-guided fuzzer for the virtual-device interface of
 * model drivers running in a simulated guest-kernel environment.
 *
 * C API over the core library: opaque handles, integer status codes,
 * thread-local error messages. All strings returned as char* are owned by
 * the caller and released with vdf_string_free(); const char* returns are
 * owned by the library object they came from.
 */
#ifndef VDIFUZZ_H
#define VDIFUZZ_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    VDF_OK = 0,
    VDF_ERR_CONFIG = 1,  /* config parse or validation failure */
    VDF_ERR_IO = 2,      /* file access failure */
    VDF_ERR_RUNTIME = 3, /* campaign execution failure */
    VDF_ERR_ARG = 4      /* invalid argument to an API call */
} vdf_status;

typedef struct vdf_config vdf_config;
typedef struct vdf_result vdf_result;

const char* vdf_version(void);

/* Message for the last failing call on this thread; never NULL. */
const char* vdf_last_error(void);

void vdf_string_free(char* s);

/* ---- configuration ---------------------------------------------------- */

vdf_config* vdf_config_new(void);
void vdf_config_free(vdf_config* cfg);

/* Line-based `key = value` file with [engine]/[harness]/[device]/[bugs]
 * sections. On VDF_ERR_CONFIG the error message lists every problem. */
vdf_status vdf_config_load_file(vdf_config* cfg, const char* path);

/* Set one key; section is "" for top-level keys ("driver", "seed", "irq",
 * ...). */
vdf_status vdf_config_set(vdf_config* cfg, const char* section,
                          const char* key, const char* value);

/* Canonical serialized form; parsing it back yields an equal config. */
char* vdf_config_serialize(const vdf_config* cfg);

/* NULL when the config is valid, otherwise newline-separated messages. */
char* vdf_config_validate(const vdf_config* cfg);

uint64_t vdf_config_hash(const vdf_config* cfg);

/* ---- driver catalog ---------------------------------------------------- */

int vdf_driver_count(void);
const char* vdf_driver_name(int index);

/* ---- campaigns ---------------------------------------------------------- */

typedef void (*vdf_stats_fn)(const char* line, void* user);

/* Runs a full campaign. stats_cb (optional) receives the progress stream:
 * `iter=<n> execs_per_s=<f> edges=<n> corpus=<n> bugs=<n>`. */
vdf_status vdf_campaign_run(const vdf_config* cfg, vdf_stats_fn stats_cb,
                            void* user, vdf_result** out);

/* Re-executes one stored input under the given config. iteration_hint
 * reconstructs the originating iteration's generator seed. */
vdf_status vdf_replay(const vdf_config* cfg, const uint8_t* input, size_t len,
                      uint64_t iteration_hint, vdf_result** out);
vdf_status vdf_replay_file(const vdf_config* cfg, const char* path,
                           uint64_t iteration_hint, vdf_result** out);

/* ---- results ------------------------------------------------------------ */

void vdf_result_free(vdf_result* res);

uint64_t vdf_result_executions(const vdf_result* res);
double vdf_result_elapsed_seconds(const vdf_result* res);
double vdf_result_execs_per_second(const vdf_result* res);
uint64_t vdf_result_covered_edges(const vdf_result* res);
uint64_t vdf_result_unique_bugs(const vdf_result* res);
uint64_t vdf_result_corpus_entries(const vdf_result* res);

/* Replay only: 1 when the input ran out and the stream was extended with
 * generated data (the replay may diverge from the original run). */
int vdf_result_underrun(const vdf_result* res);

size_t vdf_result_report_count(const vdf_result* res);
/* `class=<name> severity=<h|l> driver=<name> site=<n> iter=<n> input=<hex>`;
 * NULL when index is out of range. */
const char* vdf_result_report_line(const vdf_result* res, size_t index);

/* The stats file body (also written to <out_dir>/stats.txt by campaigns). */
char* vdf_result_stats_text(const vdf_result* res);

/* ---- experiments -------------------------------------------------------- */

/* name is one of "delay", "irq", "ttb". Both outputs are optional. */
vdf_status vdf_experiment_run(const char* name, int runs, uint64_t seed,
                              char** table_out, char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* VDIFUZZ_H */
