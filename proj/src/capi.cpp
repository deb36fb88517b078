#include "socbench.h"

#include <cstdlib>
#include <cstring>
#include <new>

#include "socbench/api_service.hpp"
#include "socbench/comparison.hpp"
#include "socbench/error.hpp"
#include "socbench/injector.hpp"
#include "socbench/json_codec.hpp"
#include "socbench/stats.hpp"
#include "socbench/workspace.hpp"
#include "util.hpp"

using namespace socbench;

struct socb_workspace {
    explicit socb_workspace(const char* root) : ws(root) {}
    Workspace ws;
};

struct socb_injector {
    Injector injector;
};

struct socb_server {
    explicit socb_server(ServiceConfig config) : service(std::move(config)) {}
    ApiService service;
};

static_assert(static_cast<int>(ErrorCode::bind_failure) + 1 == SOCB_BIND_FAILURE,
              "socb_status must mirror ErrorCode");

namespace {

thread_local std::string t_last_error;

socb_status to_status(ErrorCode code) { return static_cast<socb_status>(static_cast<int>(code) + 1); }

template <typename F>
socb_status guarded(F&& f) {
    t_last_error.clear();
    try {
        f();
        return SOCB_OK;
    } catch (const Error& e) {
        t_last_error = e.what();
        return to_status(e.code());
    } catch (const Json::exception& e) {
        t_last_error = e.what();
        return SOCB_SCHEMA_VIOLATION;
    } catch (const std::bad_alloc&) {
        t_last_error = "out of memory";
        return SOCB_INTERNAL;
    } catch (const std::exception& e) {
        t_last_error = e.what();
        return SOCB_INTERNAL;
    } catch (...) {
        t_last_error = "unknown failure";
        return SOCB_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) fail(ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

char* dup(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void put(char** out, const Json& j) {
    if (out) *out = dup(j.dump());
}

Json parse(const char* text, const char* what) {
    need(text, what);
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::schema_violation, std::string(what) + " is not valid JSON");
    return j;
}

stats::Alternative alternative(const char* text) {
    return text ? stats::alternative_from_string(text) : stats::Alternative::two_sided;
}

}  // namespace

extern "C" {

const char* socb_version(void) { return "0.1.0"; }

const char* socb_last_error(void) { return t_last_error.c_str(); }

const char* socb_status_name(socb_status status) {
    if (status == SOCB_OK) return "Ok";
    if (status == SOCB_INTERNAL) return "Internal";
    if (status < SOCB_INVALID_ARGUMENT || status > SOCB_BIND_FAILURE) return "Unknown";
    return socbench::to_string(static_cast<ErrorCode>(status - 1)).data();
}

void socb_free(char* p) { std::free(p); }

socb_status socb_workspace_open(const char* root, socb_workspace** out) {
    return guarded([&] {
        need(root, "root");
        need(out, "out");
        *out = new socb_workspace(root);
    });
}

void socb_workspace_close(socb_workspace* ws) { delete ws; }

socb_status socb_trace_add(socb_workspace* ws, const uint8_t* pcap, size_t len, const char* metadata_json,
                           char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        need(pcap, "pcap");
        const TraceMetadata meta = trace_metadata_from_json(parse(metadata_json, "metadata"));
        const auto added = ws->ws.library().add_trace({pcap, len}, meta);
        put(out_json, Json{{"trace", to_json(added.trace)}, {"warnings", added.warnings}});
    });
}

socb_status socb_trace_add_file(socb_workspace* ws, const char* pcap_path, const char* metadata_json,
                                char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        need(pcap_path, "pcap_path");
        const auto bytes = util::read_file(pcap_path);
        const TraceMetadata meta = trace_metadata_from_json(parse(metadata_json, "metadata"));
        const auto added = ws->ws.library().add_trace(bytes, meta);
        put(out_json, Json{{"trace", to_json(added.trace)}, {"warnings", added.warnings}});
    });
}

socb_status socb_trace_list(socb_workspace* ws, const char* phase, const char* query, char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        std::optional<AttackPhase> p;
        if (phase && *phase) p = phase_from_string(phase);
        put(out_json, to_json_array(ws->ws.library().list_traces(p, query ? query : "")));
    });
}

socb_status socb_trace_get(socb_workspace* ws, const char* id, char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        need(id, "id");
        put(out_json, to_json(ws->ws.library().get_trace(id)));
    });
}

socb_status socb_trace_pick_random(socb_workspace* ws, const char* phase, int has_seed, uint64_t seed,
                                   char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        need(phase, "phase");
        std::optional<std::uint64_t> s;
        if (has_seed) s = seed;
        put(out_json, to_json(ws->ws.library().pick_random(phase_from_string(phase), s)));
    });
}

socb_status socb_trace_remove(socb_workspace* ws, const char* id) {
    return guarded([&] {
        need(ws, "workspace");
        need(id, "id");
        ws->ws.library().remove_trace(id);
    });
}

socb_status socb_background_add_file(socb_workspace* ws, const char* pcap_path, char** out_key) {
    return guarded([&] {
        need(ws, "workspace");
        need(pcap_path, "pcap_path");
        const std::string key = ws->ws.library().add_background(util::read_file(pcap_path));
        if (out_key) *out_key = dup(key);
    });
}

socb_status socb_scenario_save(socb_workspace* ws, const char* scenario_json, char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        AttackScenario s = scenario_from_json(parse(scenario_json, "scenario"));
        const auto warnings = validate_scenario(s, ws->ws.library());
        s.id = ws->ws.scenarios().save_scenario(s);
        put(out_json, Json{{"scenario", to_json(s)}, {"warnings", to_json_array(warnings)}});
    });
}

socb_status socb_scenario_get(socb_workspace* ws, const char* id, char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        need(id, "id");
        put(out_json, to_json(ws->ws.scenarios().load_scenario(id)));
    });
}

socb_status socb_scenario_list(socb_workspace* ws, char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        put(out_json, to_json_array(ws->ws.scenarios().list_scenarios()));
    });
}

socb_status socb_scenario_remove(socb_workspace* ws, const char* id) {
    return guarded([&] {
        need(ws, "workspace");
        need(id, "id");
        ws->ws.scenarios().remove_scenario(id);
    });
}

socb_status socb_scenario_validate(socb_workspace* ws, const char* id, char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        need(id, "id");
        put(out_json, to_json_array(validate_scenario(ws->ws.scenarios().load_scenario(id), ws->ws.library())));
    });
}

socb_status socb_scenario_assemble(socb_workspace* ws, const char* id, const char* pcap_path,
                                   const char* truth_path, char** out_json) {
    return guarded([&] {
        need(ws, "workspace");
        need(id, "id");
        const std::string key = ws->ws.assemble_and_store(id);
        const AssembledAttack attack = ws->ws.load_assembly(key);
        if (pcap_path) util::write_file_atomic(pcap_path, pcap::write_capture(attack.capture));
        const Json truth = to_json(attack.ground_truth);
        if (truth_path) util::write_file_atomic(truth_path, truth.dump(2));
        put(out_json, Json{{"assembly", key},
                           {"packet_count", attack.capture.packets.size()},
                           {"duration_s", attack.capture.duration_seconds()},
                           {"ground_truth", truth}});
    });
}

socb_status socb_injector_create(socb_injector** out) {
    return guarded([&] {
        need(out, "out");
        *out = new socb_injector();
    });
}

void socb_injector_destroy(socb_injector* inj) { delete inj; }

socb_status socb_inject_start(socb_injector* inj, socb_workspace* ws, const char* request_json,
                              char** out_json) {
    return guarded([&] {
        need(inj, "injector");
        need(ws, "workspace");
        auto prepared = ws->ws.prepare_injection(parse(request_json, "request"));
        if (prepared.request.sink.kind == SinkKind::callback)
            fail(ErrorCode::sink_unavailable, "use socb_inject_start_callback for callback sinks");
        put(out_json, to_json(inj->injector.start_injection(prepared.attack, std::move(prepared.request))));
    });
}

socb_status socb_inject_start_callback(socb_injector* inj, socb_workspace* ws, const char* request_json,
                                       socb_frame_fn fn, void* user, char** out_json) {
    return guarded([&] {
        need(inj, "injector");
        need(ws, "workspace");
        need(reinterpret_cast<const void*>(fn), "callback");
        Json body = parse(request_json, "request");
        body.erase("sink");
        auto prepared = ws->ws.prepare_injection(body);
        prepared.request.sink.kind = SinkKind::callback;
        prepared.request.sink.callback = [fn, user](std::chrono::system_clock::time_point t,
                                                    std::span<const std::uint8_t> frame) {
            const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t.time_since_epoch()).count();
            fn(user, static_cast<int64_t>(ns), frame.data(), frame.size());
        };
        put(out_json, to_json(inj->injector.start_injection(prepared.attack, std::move(prepared.request))));
    });
}

socb_status socb_inject_status(socb_injector* inj, const char* session_id, char** out_json) {
    return guarded([&] {
        need(inj, "injector");
        need(session_id, "session_id");
        put(out_json, to_json(inj->injector.status(session_id)));
    });
}

socb_status socb_inject_cancel(socb_injector* inj, const char* session_id, char** out_json) {
    return guarded([&] {
        need(inj, "injector");
        need(session_id, "session_id");
        put(out_json, to_json(inj->injector.cancel(session_id)));
    });
}

socb_status socb_inject_wait(socb_injector* inj, const char* session_id, int64_t timeout_ms, char** out_json) {
    return guarded([&] {
        need(inj, "injector");
        need(session_id, "session_id");
        put(out_json, to_json(inj->injector.wait(session_id, std::chrono::milliseconds(timeout_ms))));
    });
}

socb_status socb_evaluate(socb_workspace* ws, const char* csv, size_t len, const char* options_json,
                          char** out_json) {
    return guarded([&] {
        need(csv, "csv");
        const Json options = options_json ? parse(options_json, "options") : Json::object();
        const EvaluationOptions opts = evaluation_options_from_json(options, ws ? &ws->ws : nullptr);
        put(out_json, evaluate_reports(std::string_view(csv, len), opts));
    });
}

socb_status socb_stats_fisher(uint64_t a, uint64_t b, uint64_t c, uint64_t d, const char* alt, char** out_json) {
    return guarded([&] { put(out_json, to_json(stats::fisher_exact({a, b, c, d}, alternative(alt)))); });
}

socb_status socb_stats_wilcoxon(const double* x, size_t nx, const double* y, size_t ny, const char* alt,
                                int continuity_correction, char** out_json) {
    return guarded([&] {
        if (nx) need(x, "x");
        if (ny) need(y, "y");
        const auto r = stats::wilcoxon_rank_sum(std::span(x, nx), std::span(y, ny), alternative(alt),
                                                continuity_correction != 0);
        put(out_json, to_json(r));
    });
}

socb_status socb_stats_compare(const char* summaries_json, double alpha, char** out_json, char** out_table) {
    return guarded([&] {
        const Json doc = parse(summaries_json, "summaries");
        if (!doc.is_array()) fail(ErrorCode::schema_violation, "summaries must be an array");
        std::vector<ConditionSummary> summaries;
        for (const auto& s : doc) summaries.push_back(condition_summary_from_json(s));
        const auto report = stats::compare_conditions(summaries, alpha);
        put(out_json, to_json(report));
        if (out_table) *out_table = dup(stats::render_comparison_table(report));
    });
}

socb_status socb_server_create(const char* config_json, socb_server** out) {
    return guarded([&] {
        need(out, "out");
        ServiceConfig config;
        if (config_json) {
            const Json j = parse(config_json, "config");
            config.host = j.value("host", config.host);
            config.port = j.value("port", config.port);
            config.root = j.value("root", config.root.string());
            if (j.contains("auth_token") && j["auth_token"].is_string())
                config.auth_token = j["auth_token"].get<std::string>();
            config.max_upload_bytes = j.value("max_upload_bytes", config.max_upload_bytes);
            config.cancel_injections_on_shutdown =
                j.value("cancel_injections_on_shutdown", config.cancel_injections_on_shutdown);
        }
        *out = new socb_server(std::move(config));
    });
}

socb_status socb_server_start(socb_server* server, int* bound_port) {
    return guarded([&] {
        need(server, "server");
        const int port = server->service.start();
        if (bound_port) *bound_port = port;
    });
}

socb_status socb_server_wait(socb_server* server) {
    return guarded([&] {
        need(server, "server");
        server->service.wait();
    });
}

void socb_server_stop(socb_server* server) {
    if (server) server->service.stop();
}

void socb_server_destroy(socb_server* server) { delete server; }

}  // extern "C"
