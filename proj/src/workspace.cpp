#include "socbench/workspace.hpp"

#include <algorithm>

#include "socbench/error.hpp"
#include "util.hpp"

namespace fs = std::filesystem;

namespace socbench {

namespace {

bool is_safe_key(std::string_view key) {
    if (key.empty() || key.size() > 128) return false;
    return std::all_of(key.begin(), key.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    });
}

}  // namespace

Workspace::Workspace(fs::path root) : library_(std::move(root)), scenarios_(library_) {
    fs::create_directories(assembly_dir());
}

fs::path Workspace::assembly_capture_path(std::string_view key) const {
    if (!is_safe_key(key)) fail(ErrorCode::not_found, "no assembly '" + std::string(key) + "'");
    return assembly_dir() / (std::string(key) + ".pcap");
}

std::string Workspace::assemble_and_store(std::string_view scenario_id, std::string key) {
    const AttackScenario scenario = scenarios_.load_scenario(scenario_id);
    const AssembledAttack attack = assemble(scenario, library_);
    if (key.empty()) key = scenario.id;
    const fs::path pcap_path = assembly_capture_path(key);
    std::unique_lock lock(library_.storage_mutex());
    util::write_file_atomic(pcap_path, pcap::write_capture(attack.capture));
    Json truth = to_json(attack.ground_truth);
    truth["assembled_at"] = attack.assembled_at;
    util::write_file_atomic(assembly_dir() / (key + ".truth.json"), truth.dump(2));
    return key;
}

bool Workspace::has_assembly(std::string_view key) const {
    if (!is_safe_key(key)) return false;
    std::shared_lock lock(library_.storage_mutex());
    return fs::exists(assembly_capture_path(key));
}

AssembledAttack Workspace::load_assembly(std::string_view key) const {
    const fs::path pcap_path = assembly_capture_path(key);
    std::shared_lock lock(library_.storage_mutex());
    if (!fs::exists(pcap_path)) fail(ErrorCode::not_found, "no assembly '" + std::string(key) + "'");
    AssembledAttack out;
    out.capture = pcap::read_capture_file(pcap_path);
    const Json truth = Json::parse(util::read_text_file(assembly_dir() / (std::string(key) + ".truth.json")));
    out.ground_truth = ground_truth_from_json(truth);
    out.assembled_at = truth.value("assembled_at", std::string{});
    return out;
}

GroundTruth Workspace::resolve_truth(std::string_view ref) const {
    if (has_assembly(ref)) return load_assembly(ref).ground_truth;
    if (scenarios_.contains(ref)) return extract_ground_truth(scenarios_.load_scenario(ref), library_);
    fail(ErrorCode::not_found, "no assembly or scenario '" + std::string(ref) + "'");
}

Workspace::PreparedInjection Workspace::prepare_injection(const Json& body) const {
    if (!body.is_object()) fail(ErrorCode::schema_violation, "injection request must be an object");
    const std::string ref = body.value("assembly", body.value("scenario_id", std::string{}));
    if (ref.empty()) fail(ErrorCode::schema_violation, "injection request needs 'scenario_id' or 'assembly'");

    PreparedInjection out;
    InjectionRequest& request = out.request;
    request.scenario_id = body.value("scenario_id", ref);
    if (auto it = body.find("sink"); it != body.end()) {
        if (!it->is_object() || !it->contains("type") || !(*it)["type"].is_string())
            fail(ErrorCode::schema_violation, "sink must be {\"type\", \"target\"}");
        request.sink.kind = sink_kind_from_string((*it)["type"].get<std::string>());
        request.sink.target = it->value("target", std::string{});
    }
    if (auto it = body.find("scheduled_start"); it != body.end() && !it->is_null()) {
        const auto tp = it->is_string() ? util::parse_iso8601(it->get<std::string>()) : std::nullopt;
        if (!tp) fail(ErrorCode::schema_violation, "scheduled_start must be an ISO-8601 timestamp");
        request.scheduled_start = *tp;
    }
    if (auto it = body.find("paced"); it != body.end() && !it->is_null()) {
        if (!it->is_boolean()) fail(ErrorCode::schema_violation, "paced must be a boolean");
        request.paced = it->get<bool>();
    }

    std::optional<std::string> background_ref;
    if (has_assembly(ref)) {
        out.attack = load_assembly(ref);
    } else {
        const AttackScenario scenario = scenarios_.load_scenario(ref);
        out.attack = assemble(scenario, library_);
        background_ref = scenario.background_ref;
    }
    if (auto it = body.find("background_ref"); it != body.end() && !it->is_null()) {
        if (!it->is_string()) fail(ErrorCode::schema_violation, "background_ref must be a string");
        background_ref = it->get<std::string>();
    }
    if (background_ref) request.background = library_.load_background(*background_ref);
    return out;
}

EvaluationOptions evaluation_options_from_json(const Json& j, const Workspace* workspace) {
    EvaluationOptions out;
    if (j.is_null()) return out;
    if (!j.is_object()) fail(ErrorCode::schema_violation, "evaluation options must be an object");
    if (auto it = j.find("truths"); it != j.end()) {
        if (!it->is_array()) fail(ErrorCode::schema_violation, "truths must be an array");
        for (const auto& t : *it) out.truths.push_back(ground_truth_from_json(t));
    }
    if (auto it = j.find("truth_refs"); it != j.end()) {
        if (!it->is_array()) fail(ErrorCode::schema_violation, "truth_refs must be an array");
        if (!workspace) fail(ErrorCode::invalid_argument, "truth_refs need a workspace");
        for (const auto& ref : *it) {
            if (!ref.is_string()) fail(ErrorCode::schema_violation, "truth_refs entries must be strings");
            out.truths.push_back(workspace->resolve_truth(ref.get<std::string>()));
        }
    }
    if (auto it = j.find("conditions"); it != j.end()) {
        if (!it->is_array()) fail(ErrorCode::schema_violation, "conditions must be an array");
        for (const auto& c : *it) {
            if (!c.is_string()) fail(ErrorCode::schema_violation, "conditions entries must be strings");
            out.conditions.push_back(c.get<std::string>());
        }
    }
    return out;
}

Json evaluate_reports(std::string_view csv, const EvaluationOptions& options) {
    const ParsedReports parsed = parse_reports(csv, options.truths);
    const Evaluation eval = grade_reports(parsed.reports, options.truths);

    std::vector<std::string> conditions = options.conditions;
    if (conditions.empty())
        for (const auto& r : parsed.reports)
            if (std::find(conditions.begin(), conditions.end(), r.condition) == conditions.end())
                conditions.push_back(r.condition);
    const auto summaries = aggregate(parsed.reports, options.truths, conditions);

    CleaningLog log = parsed.log;
    log.insert(log.end(), eval.log.begin(), eval.log.end());
    return Json{{"reports", to_json_array(parsed.reports)},
                {"cleaning_log", to_json_array(log)},
                {"graded", to_json_array(eval.incidents)},
                {"summaries", to_json_array(summaries)},
                {"scores_csv", scores_csv(eval.incidents)}};
}

}  // namespace socbench
