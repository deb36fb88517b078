#include "socbench/api_service.hpp"

#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "httplib.h"
#include "socbench/comparison.hpp"
#include "socbench/injector.hpp"
#include "socbench/json_codec.hpp"
#include "socbench/stats.hpp"
#include "socbench/workspace.hpp"
#include "util.hpp"

namespace socbench {

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::not_found: return 404;
        case ErrorCode::trace_in_use:
        case ErrorCode::already_finished: return 409;
        case ErrorCode::capture_permission_denied: return 403;
        case ErrorCode::past_schedule:
        case ErrorCode::role_address_absent:
        case ErrorCode::unknown_trace:
        case ErrorCode::conflicting_roles:
        case ErrorCode::no_trace_for_phase:
        case ErrorCode::read_only_capture:
        case ErrorCode::unmatched_incident:
        case ErrorCode::unknown_condition:
        case ErrorCode::empty_capture:
        case ErrorCode::non_positive_speed:
        case ErrorCode::overlapping_map:
        case ErrorCode::mixed_link_type:
        case ErrorCode::sink_unavailable: return 422;
        case ErrorCode::io_error:
        case ErrorCode::bind_failure: return 500;
        default: return 400;
    }
}

namespace {

enum class JobKind { assemble, inject, evaluate };
enum class JobState { queued, running, completed, failed };

std::string_view to_string(JobKind k) {
    switch (k) {
        case JobKind::assemble: return "assemble";
        case JobKind::inject: return "inject";
        case JobKind::evaluate: return "evaluate";
    }
    return "assemble";
}

std::string_view to_string(JobState s) {
    switch (s) {
        case JobState::queued: return "queued";
        case JobState::running: return "running";
        case JobState::completed: return "completed";
        case JobState::failed: return "failed";
    }
    return "failed";
}

struct Job {
    std::string id;
    JobKind kind = JobKind::assemble;
    JobState state = JobState::queued;
    std::string created_at;
    std::string result_ref;
    std::string error;
    std::string error_message;
};

Json to_json(const Job& j) {
    Json out{{"id", j.id},
             {"kind", std::string(to_string(j.kind))},
             {"state", std::string(to_string(j.state))},
             {"created_at", j.created_at},
             {"result_ref", j.state == JobState::completed ? Json(j.result_ref) : Json(nullptr)}};
    if (j.state == JobState::failed) out["error"] = {{"error", j.error}, {"message", j.error_message}};
    return out;
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view name, const std::string& message) {
    send_json(res, status, Json{{"error", name}, {"message", message}});
}

Json parse_body(const httplib::Request& req) {
    Json j = Json::parse(req.body, nullptr, false);
    if (j.is_discarded()) fail(ErrorCode::schema_violation, "request body is not valid JSON");
    return j;
}

std::string form_value(const httplib::Request& req, const std::string& key) {
    if (!req.has_file(key)) fail(ErrorCode::schema_violation, "multipart field '" + key + "' is required");
    return req.get_file_value(key).content;
}

std::vector<std::string> csv_list(const std::string& text) {
    std::vector<std::string> out;
    for (const auto& part : util::split(text, ",;"))
        if (auto v = util::trim(part); !v.empty()) out.push_back(v);
    return out;
}

}  // namespace

struct ApiService::Impl {
    ServiceConfig config;
    Workspace workspace;
    Injector injector;
    httplib::Server server;
    std::thread listener;
    int bound_port = 0;

    std::mutex jobs_mutex;
    std::condition_variable jobs_cv;
    std::map<std::string, Job> jobs;
    std::deque<std::pair<std::string, std::function<std::string()>>> queue;
    bool stopping = false;
    std::uint64_t next_job = 1;
    std::thread worker;

    std::mutex stop_mutex;
    std::condition_variable stop_cv;
    bool stopped = false;
    std::once_flag shutdown_once;

    explicit Impl(ServiceConfig c) : config(std::move(c)), workspace(config.root) {
        routes();
        worker = std::thread([this] { work(); });
    }

    // -----------------------------------------------------------------------
    // Jobs

    std::string submit(JobKind kind, std::function<std::string()> task) {
        std::lock_guard lock(jobs_mutex);
        if (stopping) fail(ErrorCode::invalid_argument, "service is shutting down");
        Job job;
        job.id = "job-" + std::to_string(next_job++);
        job.kind = kind;
        job.created_at = util::now_iso8601();
        jobs.emplace(job.id, job);
        queue.emplace_back(job.id, std::move(task));
        jobs_cv.notify_all();
        return job.id;
    }

    void work() {
        std::unique_lock lock(jobs_mutex);
        for (;;) {
            jobs_cv.wait(lock, [&] { return stopping || !queue.empty(); });
            if (queue.empty()) return;
            auto [id, task] = std::move(queue.front());
            queue.pop_front();
            jobs[id].state = JobState::running;
            lock.unlock();
            std::string ref, error, message;
            try {
                ref = task();
            } catch (const Error& e) {
                error = std::string(socbench::to_string(e.code()));
                message = e.what();
            } catch (const std::exception& e) {
                error = "Internal";
                message = e.what();
            }
            lock.lock();
            Job& job = jobs[id];
            if (error.empty()) {
                job.state = JobState::completed;
                job.result_ref = ref;
            } else {
                job.state = JobState::failed;
                job.error = error;
                job.error_message = message;
            }
            jobs_cv.notify_all();
        }
    }

    Job job(const std::string& id) {
        std::lock_guard lock(jobs_mutex);
        auto it = jobs.find(id);
        if (it == jobs.end()) fail(ErrorCode::not_found, "no job '" + id + "'");
        return it->second;
    }

    // -----------------------------------------------------------------------
    // Routing

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

    static Handler guard(Handler h) {
        return [h = std::move(h)](const httplib::Request& req, httplib::Response& res) {
            try {
                h(req, res);
            } catch (const Error& e) {
                send_error(res, http_status(e.code()), socbench::to_string(e.code()), e.what());
            } catch (const Json::exception& e) {
                send_error(res, 400, "SchemaViolation", e.what());
            } catch (const std::exception& e) {
                send_error(res, 500, "Internal", e.what());
            }
        };
    }

    void routes() {
        server.set_payload_max_length(config.max_upload_bytes);
        server.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
            if (!config.auth_token || req.path == "/health") return httplib::Server::HandlerResponse::Unhandled;
            if (req.get_header_value("Authorization") == "Bearer " + *config.auth_token)
                return httplib::Server::HandlerResponse::Unhandled;
            send_error(res, 401, "Unauthorized", "missing or wrong bearer token");
            return httplib::Server::HandlerResponse::Handled;
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (!res.body.empty()) return;
            if (res.status == 404) send_error(res, 404, "NotFound", "no such endpoint");
            if (res.status == 413) send_error(res, 413, "PayloadTooLarge", "upload exceeds the configured limit");
        });

        server.Get("/health", guard([](const auto&, auto& res) { send_json(res, 200, Json{{"status", "ok"}}); }));

        // Traces
        server.Get("/traces", guard([this](const httplib::Request& req, httplib::Response& res) {
            std::optional<AttackPhase> phase;
            if (req.has_param("phase")) phase = phase_from_string(req.get_param_value("phase"));
            const auto traces = workspace.library().list_traces(phase, req.get_param_value("q"));
            send_json(res, 200, to_json_array(traces));
        }));
        server.Get("/traces/random", guard([this](const httplib::Request& req, httplib::Response& res) {
            std::optional<std::uint64_t> seed;
            if (req.has_param("seed")) seed = std::stoull(req.get_param_value("seed"));
            const auto phase = phase_from_string(req.get_param_value("phase"));
            send_json(res, 200, to_json(workspace.library().pick_random(phase, seed)));
        }));
        server.Post("/traces", guard([this](const httplib::Request& req, httplib::Response& res) {
            if (!req.is_multipart_form_data())
                fail(ErrorCode::schema_violation, "POST /traces expects multipart fields 'pcap' and 'metadata'");
            const std::string pcap_bytes = form_value(req, "pcap");
            const Json meta = Json::parse(form_value(req, "metadata"));
            const auto* data = reinterpret_cast<const std::uint8_t*>(pcap_bytes.data());
            auto added = workspace.library().add_trace({data, pcap_bytes.size()}, trace_metadata_from_json(meta));
            send_json(res, 201, Json{{"trace", to_json(added.trace)}, {"warnings", added.warnings}});
        }));
        server.Get(R"(/traces/([A-Za-z0-9_-]+))", guard([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, to_json(workspace.library().get_trace(req.matches[1].str())));
        }));
        server.Get(R"(/traces/([A-Za-z0-9_-]+)/pcap)",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       const auto t = workspace.library().get_trace(req.matches[1].str());
                       const auto bytes = util::read_file(workspace.library().root() / t.capture_ref);
                       res.set_content(std::string(bytes.begin(), bytes.end()), "application/vnd.tcpdump.pcap");
                   }));
        server.Delete(R"(/traces/([A-Za-z0-9_-]+))",
                      guard([this](const httplib::Request& req, httplib::Response& res) {
                          workspace.library().remove_trace(req.matches[1].str());
                          send_json(res, 200, Json{{"deleted", req.matches[1].str()}});
                      }));

        // Background captures
        server.Post("/background", guard([this](const httplib::Request& req, httplib::Response& res) {
            const std::string bytes = req.is_multipart_form_data() ? form_value(req, "pcap") : req.body;
            const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data());
            send_json(res, 201, Json{{"key", workspace.library().add_background({data, bytes.size()})}});
        }));

        // Scenarios
        server.Get("/scenarios", guard([this](const auto&, httplib::Response& res) {
            send_json(res, 200, to_json_array(workspace.scenarios().list_scenarios()));
        }));
        server.Post("/scenarios", guard([this](const httplib::Request& req, httplib::Response& res) {
            save_scenario(scenario_from_json(parse_body(req)), res, 201);
        }));
        server.Get(R"(/scenarios/([A-Za-z0-9_-]+))",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, 200, to_json(workspace.scenarios().load_scenario(req.matches[1].str())));
                   }));
        server.Put(R"(/scenarios/([A-Za-z0-9_-]+))",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       AttackScenario s = scenario_from_json(parse_body(req));
                       s.id = req.matches[1].str();
                       save_scenario(std::move(s), res, 200);
                   }));
        server.Delete(R"(/scenarios/([A-Za-z0-9_-]+))",
                      guard([this](const httplib::Request& req, httplib::Response& res) {
                          workspace.scenarios().remove_scenario(req.matches[1].str());
                          send_json(res, 200, Json{{"deleted", req.matches[1].str()}});
                      }));
        server.Post(R"(/scenarios/([A-Za-z0-9_-]+)/assemble)",
                    guard([this](const httplib::Request& req, httplib::Response& res) {
                        const std::string id = req.matches[1].str();
                        workspace.scenarios().load_scenario(id);  // NotFound before queueing
                        const std::string job_id =
                            submit(JobKind::assemble, [this, id] { return workspace.assemble_and_store(id); });
                        res.set_header("Location", "/jobs/" + job_id);
                        send_json(res, 202, to_json(job(job_id)));
                    }));

        // Jobs
        server.Get(R"(/jobs/([A-Za-z0-9_-]+))", guard([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 200, to_json(job(req.matches[1].str())));
        }));
        server.Get(R"(/assemblies/([A-Za-z0-9_-]+)/truth)",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, 200, to_json(workspace.load_assembly(req.matches[1].str()).ground_truth));
                   }));
        server.Get(R"(/assemblies/([A-Za-z0-9_-]+)/pcap)",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       const auto bytes = util::read_file(workspace.assembly_capture_path(req.matches[1].str()));
                       res.set_content(std::string(bytes.begin(), bytes.end()), "application/vnd.tcpdump.pcap");
                   }));

        // Injections
        server.Get("/injections", guard([this](const auto&, httplib::Response& res) {
            send_json(res, 200, to_json_array(injector.list()));
        }));
        server.Post("/injections", guard([this](const httplib::Request& req, httplib::Response& res) {
            send_json(res, 201, to_json(start_injection(parse_body(req))));
        }));
        server.Get(R"(/injections/([A-Za-z0-9_-]+))",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       send_json(res, 200, to_json(injector.status(req.matches[1].str())));
                   }));
        server.Delete(R"(/injections/([A-Za-z0-9_-]+))",
                      guard([this](const httplib::Request& req, httplib::Response& res) {
                          send_json(res, 200, to_json(injector.cancel(req.matches[1].str())));
                      }));

        // Reports and statistics
        server.Post("/reports/evaluate", guard([this](const httplib::Request& req, httplib::Response& res) {
            std::string csv;
            Json options = Json::object();
            if (req.is_multipart_form_data()) {
                csv = form_value(req, "reports");
                if (req.has_file("options")) options = Json::parse(req.get_file_value("options").content);
                if (req.has_file("truth_refs"))
                    options["truth_refs"] = csv_list(req.get_file_value("truth_refs").content);
                if (req.has_file("conditions"))
                    options["conditions"] = csv_list(req.get_file_value("conditions").content);
            } else {
                options = parse_body(req);
                if (!options.is_object() || !options.contains("csv") || !options["csv"].is_string())
                    fail(ErrorCode::schema_violation, "expected multipart 'reports' or a JSON body with 'csv'");
                csv = options["csv"].get<std::string>();
            }
            send_json(res, 200, evaluate_reports(csv, evaluation_options_from_json(options, &workspace)));
        }));
        server.Post("/stats/compare", guard([](const httplib::Request& req, httplib::Response& res) {
            const Json body = parse_body(req);
            if (!body.is_object() || !body.contains("summaries") || !body["summaries"].is_array())
                fail(ErrorCode::schema_violation, "expected {\"summaries\": [reference, treatment]}");
            std::vector<ConditionSummary> summaries;
            for (const auto& s : body["summaries"]) summaries.push_back(condition_summary_from_json(s));
            const auto report = stats::compare_conditions(summaries, body.value("alpha", 0.05));
            Json out = to_json(report);
            out["table"] = stats::render_comparison_table(report);
            send_json(res, 200, out);
        }));
        server.Post("/stats/fisher", guard([](const httplib::Request& req, httplib::Response& res) {
            const Json body = parse_body(req);
            const auto& t = body.at("table");
            if (!t.is_array() || t.size() != 4) fail(ErrorCode::schema_violation, "table must hold four counts");
            const stats::ContingencyTable table{t[0].get<std::uint64_t>(), t[1].get<std::uint64_t>(),
                                                t[2].get<std::uint64_t>(), t[3].get<std::uint64_t>()};
            const auto alt = stats::alternative_from_string(body.value("alternative", std::string("two_sided")));
            send_json(res, 200, to_json(stats::fisher_exact(table, alt)));
        }));
        server.Post("/stats/wilcoxon", guard([](const httplib::Request& req, httplib::Response& res) {
            const Json body = parse_body(req);
            const auto x = body.at("x").get<std::vector<double>>();
            const auto y = body.at("y").get<std::vector<double>>();
            const auto alt = stats::alternative_from_string(body.value("alternative", std::string("two_sided")));
            send_json(res, 200,
                      to_json(stats::wilcoxon_rank_sum(x, y, alt, body.value("continuity_correction", true))));
        }));
    }

    void save_scenario(AttackScenario s, httplib::Response& res, int status) {
        const auto warnings = validate_scenario(s, workspace.library());
        s.id = workspace.scenarios().save_scenario(s);
        send_json(res, status, Json{{"scenario", to_json(s)}, {"warnings", to_json_array(warnings)}});
    }

    InjectionSession start_injection(const Json& body) {
        auto prepared = workspace.prepare_injection(body);
        if (prepared.request.sink.kind == SinkKind::callback)
            fail(ErrorCode::sink_unavailable, "callback sinks are only available in-process");
        return injector.start_injection(prepared.attack, std::move(prepared.request));
    }

    void shutdown() {
        server.stop();
        if (listener.joinable()) listener.join();
        {
            std::lock_guard lock(jobs_mutex);
            stopping = true;
            jobs_cv.notify_all();
        }
        if (worker.joinable()) worker.join();
        if (!config.cancel_injections_on_shutdown)
            for (const auto& s : injector.list()) injector.wait(s.id, std::chrono::hours(24));
        injector.shutdown();
        std::lock_guard lock(stop_mutex);
        stopped = true;
        stop_cv.notify_all();
    }
};

ApiService::ApiService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

ApiService::~ApiService() { stop(); }

int ApiService::start() {
    auto& s = impl_->server;
    const auto& c = impl_->config;
    if (c.port == 0) {
        impl_->bound_port = s.bind_to_any_port(c.host);
        if (impl_->bound_port <= 0) fail(ErrorCode::bind_failure, "cannot bind " + c.host);
    } else {
        if (!s.bind_to_port(c.host, c.port))
            fail(ErrorCode::bind_failure, "cannot bind " + c.host + ":" + std::to_string(c.port));
        impl_->bound_port = c.port;
    }
    impl_->listener = std::thread([&s] { s.listen_after_bind(); });
    s.wait_until_ready();
    return impl_->bound_port;
}

void ApiService::wait() {
    std::unique_lock lock(impl_->stop_mutex);
    impl_->stop_cv.wait(lock, [&] { return impl_->stopped; });
}

void ApiService::stop() {
    if (impl_) std::call_once(impl_->shutdown_once, [this] { impl_->shutdown(); });
}

int ApiService::port() const { return impl_->bound_port; }

}  // namespace socbench
