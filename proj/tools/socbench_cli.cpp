// socbench command-line front end. Talks to the library only through the C API.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "socbench.h"

using Json = nlohmann::json;

namespace {

constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string root;
    bool json = false;
};

// Owns a string returned by the C API.
class CString {
public:
    CString() = default;
    ~CString() { socb_free(p_); }
    CString(const CString&) = delete;
    CString& operator=(const CString&) = delete;
    char** out() { return &p_; }
    std::string str() const { return p_ ? p_ : ""; }
    Json json() const { return Json::parse(str()); }

private:
    char* p_ = nullptr;
};

void check(socb_status st) {
    if (st != SOCB_OK) throw DomainError(std::string(socb_status_name(st)) + ": " + socb_last_error());
}

class WorkspaceHandle {
public:
    explicit WorkspaceHandle(const std::string& root) { check(socb_workspace_open(root.c_str(), &ws_)); }
    ~WorkspaceHandle() { socb_workspace_close(ws_); }
    WorkspaceHandle(const WorkspaceHandle&) = delete;
    WorkspaceHandle& operator=(const WorkspaceHandle&) = delete;
    socb_workspace* get() const { return ws_; }

private:
    socb_workspace* ws_ = nullptr;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("IoError: cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
        throw DomainError("IoError: cannot write " + path);
}

Json parse_json_text(const std::string& text, const std::string& what) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw DomainError("SchemaViolation: " + what + " is not valid JSON");
    return j;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, sep);)
        if (!part.empty()) out.push_back(part);
    return out;
}

std::pair<std::string, std::string> key_value(const std::string& text, char sep, const std::string& what) {
    const auto pos = text.find(sep);
    if (pos == std::string::npos || pos == 0)
        throw UsageError(what + " '" + text + "' must look like key" + sep + "value");
    return {text.substr(0, pos), text.substr(pos + 1)};
}

void print(const Globals& g, const Json& j, const std::string& plain) {
    if (g.json)
        std::cout << j.dump(2) << "\n";
    else
        std::cout << plain << (plain.empty() || plain.back() == '\n' ? "" : "\n");
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string or_text(const Json& v) {
    if (v.is_null()) return "NA";
    if (v.is_string()) return v.get<std::string>();
    return fmt(v.get<double>());
}

std::string trace_line(const Json& t) {
    return t["id"].get<std::string>() + "  " + t["phase"].get<std::string>() + "  " + t["name"].get<std::string>() +
           "  (" + t["technique"].get<std::string>() + ", " + std::to_string(t["packet_count"].get<std::uint64_t>()) +
           " packets)";
}

// ---------------------------------------------------------------------------
// trace

void setup_trace(CLI::App& app, Globals& g) {
    auto* trace = app.add_subcommand("trace", "Manage the attack trace library");
    trace->require_subcommand(1);

    {
        auto* add = trace->add_subcommand("add", "Store a capture as an annotated attack trace");
        struct Opts {
            std::string pcap, metadata, name, phase, technique;
            std::vector<std::string> roles, expects;
        };
        auto o = std::make_shared<Opts>();
        add->add_option("--pcap", o->pcap, "Capture file")->required()->check(CLI::ExistingFile);
        add->add_option("--metadata", o->metadata, "Metadata JSON file (overrides the options below)");
        add->add_option("--name", o->name, "Trace name");
        add->add_option("--phase", o->phase, "recon, exploit, delivery or control");
        add->add_option("--technique", o->technique, "Technique label, e.g. portscan");
        add->add_option("--role", o->roles, "role=IPv4, e.g. attacker=10.0.0.1 (repeatable)");
        add->add_option("--expect", o->expects,
                        "question=label[;label], question in recon, exploit, delivery_control (repeatable)");
        add->callback([o, &g] {
            Json meta;
            if (!o->metadata.empty()) {
                meta = parse_json_text(read_text(o->metadata), o->metadata);
            } else {
                if (o->name.empty() || o->phase.empty()) throw UsageError("--name and --phase are required");
                meta = {{"name", o->name}, {"phase", o->phase}, {"technique", o->technique}};
                meta["roles"] = Json::object();
                for (const auto& r : o->roles) {
                    auto [role, ip] = key_value(r, '=', "--role");
                    meta["roles"][role] = ip;
                }
                Json expected = Json::object();
                for (const auto& e : o->expects) {
                    auto [q, labels] = key_value(e, '=', "--expect");
                    expected[q] = split(labels, ';');
                }
                meta["expected_answers"] = expected;
            }
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_trace_add_file(ws.get(), o->pcap.c_str(), meta.dump().c_str(), out.out()));
            const Json r = out.json();
            for (const auto& w : r["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
            print(g, r, r["trace"]["id"].get<std::string>());
        });
    }
    {
        auto* list = trace->add_subcommand("list", "List traces sorted by name");
        auto phase = std::make_shared<std::string>();
        auto query = std::make_shared<std::string>();
        list->add_option("--phase", *phase, "Only this phase");
        list->add_option("--query,-q", *query, "Case-insensitive match on name or technique");
        list->callback([phase, query, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_trace_list(ws.get(), phase->empty() ? nullptr : phase->c_str(), query->c_str(), out.out()));
            const Json r = out.json();
            std::string plain;
            for (const auto& t : r) plain += trace_line(t) + "\n";
            print(g, r, plain);
        });
    }
    {
        auto* show = trace->add_subcommand("show", "Show one trace");
        auto id = std::make_shared<std::string>();
        show->add_option("id", *id)->required();
        show->callback([id, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_trace_get(ws.get(), id->c_str(), out.out()));
            std::cout << out.json().dump(2) << "\n";
        });
    }
    {
        auto* random = trace->add_subcommand("random", "Pick a random trace of a phase");
        auto phase = std::make_shared<std::string>();
        auto seed = std::make_shared<std::optional<std::uint64_t>>();
        random->add_option("--phase", *phase)->required();
        random->add_option("--seed", *seed, "Deterministic choice");
        random->callback([phase, seed, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_trace_pick_random(ws.get(), phase->c_str(), seed->has_value(), seed->value_or(0), out.out()));
            const Json r = out.json();
            print(g, r, trace_line(r));
        });
    }
    {
        auto* rm = trace->add_subcommand("rm", "Delete a trace not used by any scenario");
        auto id = std::make_shared<std::string>();
        rm->add_option("id", *id)->required();
        rm->callback([id, &g] {
            WorkspaceHandle ws(g.root);
            check(socb_trace_remove(ws.get(), id->c_str()));
            print(g, Json{{"deleted", *id}}, "deleted " + *id);
        });
    }
    {
        auto* bg = trace->add_subcommand("add-background", "Store a background-traffic capture");
        auto pcap = std::make_shared<std::string>();
        bg->add_option("--pcap", *pcap)->required()->check(CLI::ExistingFile);
        bg->callback([pcap, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_background_add_file(ws.get(), pcap->c_str(), out.out()));
            print(g, Json{{"key", out.str()}}, out.str());
        });
    }
}

// ---------------------------------------------------------------------------
// scenario

// TRACE[,offset=S][,speed=X][,map=FROM>TO[;FROM>TO...]]
Json parse_block(const std::string& text) {
    const auto fields = split(text, ',');
    if (fields.empty()) throw UsageError("empty --block");
    Json block{{"trace_id", fields[0]}, {"offset_s", 0.0}, {"speed", 1.0}, {"address_map", Json::array()}};
    for (std::size_t i = 1; i < fields.size(); ++i) {
        auto [key, value] = key_value(fields[i], '=', "block field");
        try {
            if (key == "offset") {
                block["offset_s"] = std::stod(value);
            } else if (key == "speed") {
                block["speed"] = std::stod(value);
            } else if (key == "map") {
                for (const auto& m : split(value, ';')) {
                    auto [from, to] = key_value(m, '>', "map entry");
                    block["address_map"].push_back({{"from", from}, {"to", to}});
                }
            } else {
                throw UsageError("unknown block field '" + key + "'");
            }
        } catch (const std::invalid_argument&) {
            throw UsageError("block field '" + fields[i] + "' is not a number");
        }
    }
    return block;
}

void print_saved_scenario(const Globals& g, const Json& r) {
    for (const auto& w : r["warnings"]) std::cerr << "warning: " << w["message"].get<std::string>() << "\n";
    print(g, r, r["scenario"]["id"].get<std::string>());
}

void setup_scenario(CLI::App& app, Globals& g) {
    auto* scenario = app.add_subcommand("scenario", "Compose, store and assemble attack scenarios");
    scenario->require_subcommand(1);

    {
        auto* build = scenario->add_subcommand("build", "Create a scenario from blocks");
        struct Opts {
            std::string id, name, background, notes;
            std::vector<std::string> blocks;
        };
        auto o = std::make_shared<Opts>();
        build->add_option("--id", o->id, "Scenario id (generated when absent)");
        build->add_option("--name", o->name)->required();
        build->add_option("--block", o->blocks, "TRACE[,offset=S][,speed=X][,map=FROM>TO[;FROM>TO]] (repeatable)")
            ->required();
        build->add_option("--background", o->background, "Background capture key");
        build->add_option("--notes", o->notes);
        build->callback([o, &g] {
            Json s{{"name", o->name}, {"notes", o->notes}, {"blocks", Json::array()}};
            if (!o->id.empty()) s["id"] = o->id;
            if (!o->background.empty()) s["background_ref"] = o->background;
            for (const auto& b : o->blocks) s["blocks"].push_back(parse_block(b));
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_scenario_save(ws.get(), s.dump().c_str(), out.out()));
            print_saved_scenario(g, out.json());
        });
    }
    {
        auto* save = scenario->add_subcommand("save", "Store a scenario JSON document");
        auto file = std::make_shared<std::string>();
        save->add_option("--file", *file)->required()->check(CLI::ExistingFile);
        save->callback([file, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_scenario_save(ws.get(), read_text(*file).c_str(), out.out()));
            print_saved_scenario(g, out.json());
        });
    }
    {
        auto* list = scenario->add_subcommand("list", "List stored scenarios");
        list->callback([&g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_scenario_list(ws.get(), out.out()));
            const Json r = out.json();
            std::string plain;
            for (const auto& s : r)
                plain += s["id"].get<std::string>() + "  " + s["name"].get<std::string>() + "  (" +
                         std::to_string(s["blocks"].size()) + " blocks)\n";
            print(g, r, plain);
        });
    }
    {
        auto* show = scenario->add_subcommand("show", "Print a scenario");
        auto id = std::make_shared<std::string>();
        show->add_option("id", *id)->required();
        show->callback([id, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_scenario_get(ws.get(), id->c_str(), out.out()));
            std::cout << out.json().dump(2) << "\n";
        });
    }
    {
        auto* validate = scenario->add_subcommand("validate", "Phase-order and overlap warnings");
        auto id = std::make_shared<std::string>();
        validate->add_option("id", *id)->required();
        validate->callback([id, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_scenario_validate(ws.get(), id->c_str(), out.out()));
            const Json r = out.json();
            std::string plain = r.empty() ? "no warnings" : "";
            for (const auto& w : r) plain += w["kind"].get<std::string>() + ": " + w["message"].get<std::string>() + "\n";
            print(g, r, plain);
        });
    }
    {
        auto* rm = scenario->add_subcommand("rm", "Delete a scenario");
        auto id = std::make_shared<std::string>();
        rm->add_option("id", *id)->required();
        rm->callback([id, &g] {
            WorkspaceHandle ws(g.root);
            check(socb_scenario_remove(ws.get(), id->c_str()));
            print(g, Json{{"deleted", *id}}, "deleted " + *id);
        });
    }
    {
        auto* assemble = scenario->add_subcommand("assemble", "Build the attack capture and its ground truth");
        struct Opts {
            std::string id, out, truth;
        };
        auto o = std::make_shared<Opts>();
        assemble->add_option("--id", o->id)->required();
        assemble->add_option("--out", o->out, "Write the assembled capture here");
        assemble->add_option("--truth", o->truth, "Write the ground truth JSON here");
        assemble->callback([o, &g] {
            WorkspaceHandle ws(g.root);
            CString out;
            check(socb_scenario_assemble(ws.get(), o->id.c_str(), o->out.empty() ? nullptr : o->out.c_str(),
                                         o->truth.empty() ? nullptr : o->truth.c_str(), out.out()));
            const Json r = out.json();
            print(g, r,
                  "assembled " + r["assembly"].get<std::string>() + ": " +
                      std::to_string(r["packet_count"].get<std::uint64_t>()) + " packets, " +
                      fmt(r["duration_s"].get<double>(), 3) + " s");
        });
    }
}

// ---------------------------------------------------------------------------
// inject

void setup_inject(CLI::App& app, Globals& g) {
    auto* inject = app.add_subcommand("inject", "Replay an assembled attack into a sink");
    struct Opts {
        std::string scenario, assembly, file, iface, at, background;
        std::optional<bool> paced;
        bool no_wait = false;
        double timeout = 3600;
    };
    auto o = std::make_shared<Opts>();
    auto* src = inject->add_option("--scenario", o->scenario, "Scenario id (assembled on the fly)");
    inject->add_option("--assembly", o->assembly, "Stored assembly key")->excludes(src);
    auto* file = inject->add_option("--file", o->file, "Write a pcap file");
    inject->add_option("--interface", o->iface, "Send raw frames on this interface (needs CAP_NET_RAW)")
        ->excludes(file);
    inject->add_option("--at", o->at, "ISO-8601 start time (default: now)");
    inject->add_option("--background", o->background, "Background capture key to mix in");
    inject->add_flag("--paced,!--unpaced", o->paced, "Honor inter-packet gaps (default: off for files)");
    inject->add_flag("--no-wait", o->no_wait, "Return after scheduling");
    inject->add_option("--timeout", o->timeout, "Seconds to wait for completion");
    inject->callback([o, &g] {
        if (o->scenario.empty() && o->assembly.empty()) throw UsageError("--scenario or --assembly is required");
        if (o->file.empty() && o->iface.empty()) throw UsageError("--file or --interface is required");
        Json req;
        if (!o->assembly.empty()) req["assembly"] = o->assembly;
        if (!o->scenario.empty()) req["scenario_id"] = o->scenario;
        req["sink"] = o->file.empty() ? Json{{"type", "interface"}, {"target", o->iface}}
                                      : Json{{"type", "file"}, {"target", o->file}};
        if (!o->at.empty()) req["scheduled_start"] = o->at;
        if (!o->background.empty()) req["background_ref"] = o->background;
        if (o->paced) req["paced"] = *o->paced;

        WorkspaceHandle ws(g.root);
        socb_injector* inj = nullptr;
        check(socb_injector_create(&inj));
        std::unique_ptr<socb_injector, void (*)(socb_injector*)> guard(inj, socb_injector_destroy);
        CString started;
        check(socb_inject_start(inj, ws.get(), req.dump().c_str(), started.out()));
        Json session = started.json();
        if (!o->no_wait) {
            CString done;
            const auto id = session["id"].get<std::string>();
            check(socb_inject_wait(inj, id.c_str(), static_cast<int64_t>(o->timeout * 1000), done.out()));
            session = done.json();
        } else {
            // Scheduled sessions would be cancelled when the injector goes away.
            std::cerr << "note: --no-wait returns immediately; the session ends with this process\n";
        }
        const std::string state = session["state"].get<std::string>();
        for (const auto& e : session["errors"]) std::cerr << "session: " << e.get<std::string>() << "\n";
        print(g, session,
              session["id"].get<std::string>() + " " + state + ": " +
                  std::to_string(session["packets_sent"].get<std::uint64_t>()) + "/" +
                  std::to_string(session["total_packets"].get<std::uint64_t>()) + " packets");
        if (state == "failed") throw DomainError("injection failed");
    });
}

// ---------------------------------------------------------------------------
// evaluate

void setup_evaluate(CLI::App& app, Globals& g) {
    auto* eval = app.add_subcommand("evaluate", "Grade analyst reports against ground truth");
    struct Opts {
        std::string reports, scores, summaries, out;
        std::vector<std::string> truths, refs, conditions;
    };
    auto o = std::make_shared<Opts>();
    eval->add_option("--reports", o->reports, "Report CSV")->required()->check(CLI::ExistingFile);
    eval->add_option("--truth", o->truths, "Ground-truth JSON file (repeatable)")->check(CLI::ExistingFile);
    eval->add_option("--truth-ref", o->refs, "Stored assembly or scenario id (repeatable)");
    eval->add_option("--condition", o->conditions, "Condition label, reference first (repeatable)");
    eval->add_option("--scores", o->scores, "Write the per-incident score CSV here");
    eval->add_option("--summaries", o->summaries, "Write the condition summaries JSON here");
    eval->add_option("--out", o->out, "Write the full evaluation JSON here");
    eval->callback([o, &g] {
        Json options{{"truths", Json::array()}, {"truth_refs", o->refs}, {"conditions", o->conditions}};
        for (const auto& t : o->truths) options["truths"].push_back(parse_json_text(read_text(t), t));
        const std::string csv = read_text(o->reports);
        std::optional<WorkspaceHandle> ws;
        if (!o->refs.empty()) ws.emplace(g.root);
        CString out;
        check(socb_evaluate(ws ? ws->get() : nullptr, csv.data(), csv.size(), options.dump().c_str(), out.out()));
        const Json r = out.json();
        if (!o->scores.empty()) write_text(o->scores, r["scores_csv"].get<std::string>());
        if (!o->summaries.empty()) write_text(o->summaries, r["summaries"].dump(2));
        if (!o->out.empty()) write_text(o->out, r.dump(2));

        std::string plain;
        for (const auto& s : r["summaries"]) {
            plain += s["condition"].get<std::string>() + ": " + std::to_string(s["groups"].get<int>()) +
                     " groups, " + std::to_string(s["reports_total"].get<int>()) + " reports (m=" +
                     fmt(s["mean_reports"].get<double>(), 2) + ", sd=" + fmt(s["sd_reports"].get<double>(), 2) +
                     "), all=" + std::to_string(s["groups_all"].get<int>()) +
                     " partial=" + std::to_string(s["groups_partial"].get<int>()) +
                     " none=" + std::to_string(s["groups_none"].get<int>()) + "\n";
        }
        plain += std::to_string(r["cleaning_log"].size()) + " cleaning log entries";
        print(g, r, plain);
    });
}

// ---------------------------------------------------------------------------
// stats

std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) {
        try {
            out.push_back(std::stod(part));
        } catch (const std::exception&) {
            throw UsageError("'" + part + "' is not a number");
        }
    }
    return out;
}

void setup_stats(CLI::App& app, Globals& g) {
    auto* stats = app.add_subcommand("stats", "Fisher exact, Wilcoxon rank-sum and condition comparison");
    stats->require_subcommand(1);
    {
        auto* fisher = stats->add_subcommand("fisher", "Fisher's exact test on a 2x2 table a b / c d");
        auto counts = std::make_shared<std::vector<std::uint64_t>>();
        auto alt = std::make_shared<std::string>("two_sided");
        fisher->add_option("counts", *counts, "a b c d")->required()->expected(4);
        fisher->add_option("--alternative", *alt)->check(CLI::IsMember({"two_sided", "less", "greater"}));
        fisher->callback([counts, alt, &g] {
            const auto& c = *counts;
            CString out;
            check(socb_stats_fisher(c[0], c[1], c[2], c[3], alt->c_str(), out.out()));
            const Json r = out.json();
            print(g, r, "p=" + fmt(r["p_value"].get<double>()) + " OR=" + or_text(r["odds_ratio"]) + " (" + *alt + ")");
        });
    }
    {
        auto* wil = stats->add_subcommand("wilcoxon", "Wilcoxon rank-sum test");
        auto x = std::make_shared<std::string>();
        auto y = std::make_shared<std::string>();
        auto alt = std::make_shared<std::string>("two_sided");
        auto no_cc = std::make_shared<bool>(false);
        wil->add_option("--x", *x, "Comma-separated sample")->required();
        wil->add_option("--y", *y, "Comma-separated sample")->required();
        wil->add_option("--alternative", *alt)->check(CLI::IsMember({"two_sided", "less", "greater"}));
        wil->add_flag("--no-continuity-correction", *no_cc);
        wil->callback([x, y, alt, no_cc, &g] {
            const auto xs = parse_numbers(*x);
            const auto ys = parse_numbers(*y);
            CString out;
            check(socb_stats_wilcoxon(xs.data(), xs.size(), ys.data(), ys.size(), alt->c_str(), !*no_cc, out.out()));
            const Json r = out.json();
            print(g, r, "W=" + fmt(r["statistic"].get<double>(), 1) + " p=" + fmt(r["p_value"].get<double>()) +
                            " (" + *alt + ", " + r["details"].get<std::string>() + ")");
        });
    }
    {
        auto* cmp = stats->add_subcommand("compare", "Compare two conditions (reference first)");
        auto file = std::make_shared<std::string>();
        auto alpha = std::make_shared<double>(0.05);
        cmp->add_option("--summaries", *file, "Summaries JSON array, or an evaluate --out document")
            ->required()
            ->check(CLI::ExistingFile);
        cmp->add_option("--alpha", *alpha);
        cmp->callback([file, alpha, &g] {
            Json doc = parse_json_text(read_text(*file), *file);
            if (doc.is_object() && doc.contains("summaries")) doc = doc["summaries"];
            CString out, table;
            check(socb_stats_compare(doc.dump().c_str(), *alpha, out.out(), table.out()));
            print(g, out.json(), table.str());
        });
    }
}

// ---------------------------------------------------------------------------
// serve

void setup_serve(CLI::App& app, Globals& g) {
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    struct Opts {
        std::string host = "127.0.0.1";
        int port = 8080;
        std::string token;
        std::size_t max_upload_mb = 512;
        bool finish_injections = false;
    };
    auto o = std::make_shared<Opts>();
    serve->add_option("--host", o->host);
    serve->add_option("--port", o->port, "0 picks a free port");
    serve->add_option("--token", o->token, "Require this bearer token")->envname("SOCBENCH_TOKEN");
    serve->add_option("--max-upload-mb", o->max_upload_mb);
    serve->add_flag("--finish-injections", o->finish_injections, "Let running injections finish on shutdown");
    serve->callback([o, &g] {
        Json config{{"host", o->host},
                    {"port", o->port},
                    {"root", g.root},
                    {"max_upload_bytes", o->max_upload_mb * 1024 * 1024},
                    {"cancel_injections_on_shutdown", !o->finish_injections}};
        if (!o->token.empty()) config["auth_token"] = o->token;

        sigset_t signals;
        sigemptyset(&signals);
        sigaddset(&signals, SIGINT);
        sigaddset(&signals, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &signals, nullptr);

        socb_server* server = nullptr;
        check(socb_server_create(config.dump().c_str(), &server));
        std::unique_ptr<socb_server, void (*)(socb_server*)> guard(server, socb_server_destroy);
        int port = 0;
        check(socb_server_start(server, &port));
        std::cerr << "listening on http://" << o->host << ":" << port << " (root " << g.root << ")\n";
        std::thread([server, signals] {
            int sig = 0;
            sigwait(&signals, &sig);
            socb_server_stop(server);
        }).detach();
        check(socb_server_wait(server));
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"socbench: compose, inject and grade benchmark attacks"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    const char* env_root = std::getenv("SOCBENCH_ROOT");
    g.root = env_root ? env_root : "socbench-data";
    app.add_option("--root", g.root, "Storage directory (env SOCBENCH_ROOT)");
    app.add_flag("--json", g.json, "Machine-readable output");

    setup_trace(app, g);
    setup_scenario(app, g);
    setup_inject(app, g);
    setup_evaluate(app, g);
    setup_stats(app, g);
    setup_serve(app, g);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    } catch (const Json::exception& e) {
        std::cerr << "error: unexpected output: " << e.what() << "\n";
        return kExitDomain;
    }
    return 0;
}
