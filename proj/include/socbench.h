#ifndef SOCBENCH_H
#define SOCBENCH_H

/*
 * C interface to libsocbench.
 *
 * Structured values cross the boundary as UTF-8 JSON strings. Every char**
 * out-parameter receives a heap string owned by the caller and released with
 * socb_free(). On failure a function returns a non-zero socb_status and
 * socb_last_error() describes it (thread-local, valid until the next call on
 * the same thread).
 */

#include <stddef.h>
#include <stdint.h>

#if defined(SOCBENCH_BUILDING)
#define SOCB_API __attribute__((visibility("default")))
#else
#define SOCB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum socb_status {
    SOCB_OK = 0,
    SOCB_INVALID_ARGUMENT,
    SOCB_MALFORMED_HEADER,
    SOCB_TRUNCATED_PACKET,
    SOCB_MALFORMED_RECORD,
    SOCB_READ_ONLY_CAPTURE,
    SOCB_OVERLAPPING_MAP,
    SOCB_EMPTY_CAPTURE,
    SOCB_NON_POSITIVE_SPEED,
    SOCB_MIXED_LINK_TYPE,
    SOCB_MALFORMED_CAPTURE,
    SOCB_ROLE_ADDRESS_ABSENT,
    SOCB_NOT_FOUND,
    SOCB_NO_TRACE_FOR_PHASE,
    SOCB_TRACE_IN_USE,
    SOCB_UNKNOWN_TRACE,
    SOCB_CONFLICTING_ROLES,
    SOCB_SCHEMA_VIOLATION,
    SOCB_SINK_UNAVAILABLE,
    SOCB_PAST_SCHEDULE,
    SOCB_CAPTURE_PERMISSION_DENIED,
    SOCB_ALREADY_FINISHED,
    SOCB_EMPTY_FILE,
    SOCB_UNMATCHED_INCIDENT,
    SOCB_UNKNOWN_CONDITION,
    SOCB_EMPTY_SAMPLE,
    SOCB_ARITY_MISMATCH,
    SOCB_IO_ERROR,
    SOCB_BIND_FAILURE,
    SOCB_INTERNAL = 99
} socb_status;

typedef struct socb_workspace socb_workspace;
typedef struct socb_injector socb_injector;
typedef struct socb_server socb_server;

SOCB_API const char* socb_version(void);
SOCB_API const char* socb_last_error(void);
/* "NotFound", "PastSchedule", ... */
SOCB_API const char* socb_status_name(socb_status status);
SOCB_API void socb_free(char* p);

/* ---- workspace: trace library, scenarios, assemblies under one root ---- */

SOCB_API socb_status socb_workspace_open(const char* root, socb_workspace** out);
SOCB_API void socb_workspace_close(socb_workspace* ws);

/* metadata_json: {name, phase, technique, roles, expected_answers}.
 * out: {"trace": {...}, "warnings": [...]}. */
SOCB_API socb_status socb_trace_add(socb_workspace* ws, const uint8_t* pcap, size_t len,
                                    const char* metadata_json, char** out_json);
SOCB_API socb_status socb_trace_add_file(socb_workspace* ws, const char* pcap_path,
                                         const char* metadata_json, char** out_json);
/* phase and query may be NULL. */
SOCB_API socb_status socb_trace_list(socb_workspace* ws, const char* phase, const char* query,
                                     char** out_json);
SOCB_API socb_status socb_trace_get(socb_workspace* ws, const char* id, char** out_json);
/* seed is used only when has_seed is non-zero. */
SOCB_API socb_status socb_trace_pick_random(socb_workspace* ws, const char* phase, int has_seed,
                                            uint64_t seed, char** out_json);
SOCB_API socb_status socb_trace_remove(socb_workspace* ws, const char* id);
/* out: background key usable as a scenario background_ref. */
SOCB_API socb_status socb_background_add_file(socb_workspace* ws, const char* pcap_path,
                                              char** out_key);

/* out: {"scenario": {...}, "warnings": [...]}; assigns an id when absent. */
SOCB_API socb_status socb_scenario_save(socb_workspace* ws, const char* scenario_json,
                                        char** out_json);
SOCB_API socb_status socb_scenario_get(socb_workspace* ws, const char* id, char** out_json);
SOCB_API socb_status socb_scenario_list(socb_workspace* ws, char** out_json);
SOCB_API socb_status socb_scenario_remove(socb_workspace* ws, const char* id);
/* out: warning list. */
SOCB_API socb_status socb_scenario_validate(socb_workspace* ws, const char* id, char** out_json);
/* Assembles and stores the result under the scenario id; pcap_path and
 * truth_path (either may be NULL) receive copies. out: {"assembly",
 * "packet_count", "ground_truth"}. */
SOCB_API socb_status socb_scenario_assemble(socb_workspace* ws, const char* id,
                                            const char* pcap_path, const char* truth_path,
                                            char** out_json);

/* ---- injection ---- */

SOCB_API socb_status socb_injector_create(socb_injector** out);
/* Cancels unfinished sessions and joins their emitters. */
SOCB_API void socb_injector_destroy(socb_injector* inj);

/* request_json: {"scenario_id" | "assembly", "sink": {"type": "file"|"interface",
 * "target"}, "scheduled_start"?, "background_ref"?, "paced"?}. An assembly
 * key is looked up first, then a scenario id (assembled on the fly). */
SOCB_API socb_status socb_inject_start(socb_injector* inj, socb_workspace* ws,
                                       const char* request_json, char** out_json);

/* wall_ns: send time, nanoseconds since the Unix epoch. Runs on the
 * session's emitter thread. */
typedef void (*socb_frame_fn)(void* user, int64_t wall_ns, const uint8_t* frame, size_t len);

/* Same request shape without "sink". */
SOCB_API socb_status socb_inject_start_callback(socb_injector* inj, socb_workspace* ws,
                                                const char* request_json, socb_frame_fn fn,
                                                void* user, char** out_json);
SOCB_API socb_status socb_inject_status(socb_injector* inj, const char* session_id, char** out_json);
SOCB_API socb_status socb_inject_cancel(socb_injector* inj, const char* session_id, char** out_json);
SOCB_API socb_status socb_inject_wait(socb_injector* inj, const char* session_id,
                                      int64_t timeout_ms, char** out_json);

/* ---- reports ---- */

/* options_json: {"truths"?: [ground truth], "truth_refs"?: [assembly or
 * scenario id], "conditions"?: [reference, treatment]}; ws may be NULL when
 * no truth_refs are given. out: {reports, cleaning_log, graded, summaries,
 * scores_csv}. */
SOCB_API socb_status socb_evaluate(socb_workspace* ws, const char* csv, size_t len,
                                   const char* options_json, char** out_json);

/* ---- statistics ---- */

/* alternative: "two_sided" (NULL), "less" or "greater". */
SOCB_API socb_status socb_stats_fisher(uint64_t a, uint64_t b, uint64_t c, uint64_t d,
                                       const char* alternative, char** out_json);
SOCB_API socb_status socb_stats_wilcoxon(const double* x, size_t nx, const double* y, size_t ny,
                                         const char* alternative, int continuity_correction,
                                         char** out_json);
/* summaries_json: [reference, treatment] condition summaries. out_table may be NULL. */
SOCB_API socb_status socb_stats_compare(const char* summaries_json, double alpha, char** out_json,
                                        char** out_table);

/* ---- HTTP service ---- */

/* config_json: {"host", "port", "root", "auth_token"?, "max_upload_bytes"?,
 * "cancel_injections_on_shutdown"?}. */
SOCB_API socb_status socb_server_create(const char* config_json, socb_server** out);
SOCB_API socb_status socb_server_start(socb_server* server, int* bound_port);
/* Blocks until socb_server_stop() is called from another thread. */
SOCB_API socb_status socb_server_wait(socb_server* server);
SOCB_API void socb_server_stop(socb_server* server);
SOCB_API void socb_server_destroy(socb_server* server);

#ifdef __cplusplus
}
#endif

#endif
