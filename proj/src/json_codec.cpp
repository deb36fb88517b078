#include "socbench/json_codec.hpp"

#include <cmath>
#include <limits>

#include "socbench/error.hpp"

namespace socbench {

namespace {

[[noreturn]] void schema_error(const std::string& what) { fail(ErrorCode::schema_violation, what); }

const Json& require(const Json& j, const char* key) {
    if (!j.is_object()) schema_error(std::string("expected an object holding '") + key + "'");
    auto it = j.find(key);
    if (it == j.end()) schema_error(std::string("missing required field '") + key + "'");
    return *it;
}

std::string require_string(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_string()) schema_error(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

double require_number(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number()) schema_error(std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::string optional_string(const Json& j, const char* key, std::string fallback = {}) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    if (!it->is_string()) schema_error(std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::size_t require_count(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        schema_error(std::string("field '") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

template <typename F>
auto wrap(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::schema_violation) throw;
        schema_error(std::string(what) + ": " + e.what());
    } catch (const nlohmann::json::exception& e) {
        schema_error(std::string(what) + ": " + e.what());
    }
}

std::set<std::string> label_set(const Json& v, const char* key) {
    std::set<std::string> out;
    auto add = [&](const Json& item) {
        if (!item.is_string()) schema_error(std::string("labels in '") + key + "' must be strings");
        auto label = canonical_label(item.get<std::string>());
        if (!label.empty()) out.insert(std::move(label));
    };
    if (v.is_null()) return out;
    if (v.is_array()) {
        for (const auto& item : v) add(item);
    } else {
        add(v);
    }
    return out;
}

Json label_json(const std::set<std::string>& labels, bool single) {
    if (single) {
        if (labels.empty()) return nullptr;
        return *labels.begin();
    }
    return Json(labels);
}

Json ip_set_json(const std::set<Ipv4Address>& ips) {
    Json out = Json::array();
    for (const auto& ip : ips) out.push_back(ip.to_string());
    return out;
}

std::set<Ipv4Address> ip_set_from_json(const Json& j, const char* key) {
    const Json& v = require(j, key);
    if (!v.is_array()) schema_error(std::string("field '") + key + "' must be an array");
    std::set<Ipv4Address> out;
    for (const auto& item : v) {
        if (!item.is_string()) schema_error(std::string("'") + key + "' entries must be strings");
        auto ip = Ipv4Address::parse(item.get<std::string>());
        if (!ip) schema_error(std::string("'") + key + "' holds an invalid address");
        out.insert(*ip);
    }
    return out;
}

}  // namespace

Json odds_ratio_json(const std::optional<double>& value) {
    if (!value) return nullptr;
    if (std::isinf(*value)) return "Infinity";
    return *value;
}

// ---------------------------------------------------------------------------
// Traces

Json to_json(const ExpectedAnswers& answers, bool single_valued) {
    return Json{{"recon", label_json(answers.recon, single_valued)},
                {"exploit", label_json(answers.exploit, single_valued)},
                {"delivery_control", Json(answers.delivery_control)}};
}

ExpectedAnswers expected_answers_from_json(const Json& j) {
    ExpectedAnswers out;
    if (j.is_null()) return out;
    if (!j.is_object()) schema_error("expected_answers must be an object");
    for (const auto& [key, value] : j.items()) {
        Question q = wrap("expected_answers", [&] { return question_from_string(key); });
        out.get(q) = label_set(value, key.c_str());
    }
    return out;
}

Json to_json(const RoleMap& roles) {
    Json out = Json::object();
    for (const auto& [role, ip] : roles) out[role] = ip.to_string();
    return out;
}

RoleMap roles_from_json(const Json& j) {
    if (!j.is_object()) schema_error("roles must be an object of role -> IPv4 address");
    RoleMap out;
    for (const auto& [role, value] : j.items()) {
        if (!is_valid_role_name(role)) schema_error("invalid role name '" + role + "'");
        if (!value.is_string()) schema_error("role '" + role + "' must map to an address string");
        auto ip = Ipv4Address::parse(value.get<std::string>());
        if (!ip) schema_error("role '" + role + "' has an invalid IPv4 address");
        out[role] = *ip;
    }
    return out;
}

Json to_json(const AttackTrace& t) {
    return Json{{"id", t.id},
                {"name", t.name},
                {"phase", std::string(to_string(t.phase))},
                {"technique", t.technique},
                {"roles", to_json(t.roles)},
                {"expected_answers", to_json(t.expected_answers, true)},
                {"capture_ref", t.capture_ref},
                {"packet_count", t.packet_count},
                {"duration_s", t.duration_s},
                {"created_at", t.created_at},
                {"content_sha256", t.content_sha256}};
}

TraceMetadata trace_metadata_from_json(const Json& j) {
    TraceMetadata m;
    m.name = require_string(j, "name");
    m.phase = wrap("phase", [&] { return phase_from_string(require_string(j, "phase")); });
    m.technique = optional_string(j, "technique");
    m.roles = roles_from_json(require(j, "roles"));
    if (auto it = j.find("expected_answers"); it != j.end())
        m.expected_answers = expected_answers_from_json(*it);
    return m;
}

AttackTrace trace_from_json(const Json& j) {
    AttackTrace t;
    t.id = require_string(j, "id");
    const TraceMetadata m = trace_metadata_from_json(j);
    t.name = m.name;
    t.phase = m.phase;
    t.technique = m.technique;
    t.roles = m.roles;
    t.expected_answers = m.expected_answers;
    t.capture_ref = require_string(j, "capture_ref");
    t.packet_count = require_count(j, "packet_count");
    t.duration_s = require_number(j, "duration_s");
    t.created_at = optional_string(j, "created_at");
    t.content_sha256 = optional_string(j, "content_sha256");
    return t;
}

// ---------------------------------------------------------------------------
// Scenarios

Json to_json(const pcap::AddressMap& map) {
    Json out = Json::array();
    for (const auto& e : map.entries())
        out.push_back({{"from", e.from.to_string()}, {"to", e.to.to_string()}});
    return out;
}

pcap::AddressMap address_map_from_json(const Json& j) {
    if (j.is_null()) return {};
    if (!j.is_array()) schema_error("address_map must be an array of {from, to}");
    std::vector<pcap::AddressMapping> entries;
    for (const auto& e : j) {
        auto from = require_string(e, "from");
        auto to = require_string(e, "to");
        entries.push_back(wrap("address_map", [&] {
            return pcap::AddressMapping{Ipv4Prefix::from_string(from), Ipv4Prefix::from_string(to)};
        }));
    }
    return wrap("address_map", [&] { return pcap::AddressMap(std::move(entries)); });
}

Json to_json(const AttackScenario& s) {
    Json blocks = Json::array();
    for (const auto& b : s.blocks)
        blocks.push_back({{"trace_id", b.trace_id},
                          {"offset_s", b.offset_s},
                          {"speed", b.speed},
                          {"address_map", to_json(b.address_map)}});
    Json out{{"id", s.id}, {"name", s.name}, {"blocks", blocks}, {"notes", s.notes}};
    if (s.background_ref) out["background_ref"] = *s.background_ref;
    return out;
}

AttackScenario scenario_from_json(const Json& j) {
    AttackScenario s;
    if (!j.is_object()) schema_error("scenario must be a JSON object");
    s.id = optional_string(j, "id");
    s.name = require_string(j, "name");
    const Json& blocks = require(j, "blocks");
    if (!blocks.is_array()) schema_error("blocks must be an array");
    for (const auto& b : blocks) {
        AttackBlock block;
        block.trace_id = require_string(b, "trace_id");
        block.offset_s = b.contains("offset_s") ? require_number(b, "offset_s") : 0.0;
        block.speed = b.contains("speed") ? require_number(b, "speed") : 1.0;
        if (auto it = b.find("address_map"); it != b.end()) block.address_map = address_map_from_json(*it);
        s.blocks.push_back(std::move(block));
    }
    if (auto it = j.find("background_ref"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) schema_error("background_ref must be a string");
        s.background_ref = it->get<std::string>();
    }
    s.notes = optional_string(j, "notes");
    check_scenario_structure(s);
    return s;
}

Json to_json(const GroundTruth& t) {
    Json timeline = Json::array();
    for (const auto& e : t.timeline)
        timeline.push_back({{"phase", std::string(to_string(e.phase))},
                            {"technique", e.technique},
                            {"trace_id", e.trace_id},
                            {"block", e.block},
                            {"start", e.start_s},
                            {"end", e.end_s}});
    Json others = Json::object();
    for (const auto& [role, ips] : t.other_roles) others[role] = ip_set_json(ips);
    return Json{{"scenario_id", t.scenario_id},
                {"attacker_ips", ip_set_json(t.attacker_ips)},
                {"victim_ips", ip_set_json(t.victim_ips)},
                {"other_roles", others},
                {"expected", to_json(t.expected, false)},
                {"timeline", timeline}};
}

GroundTruth ground_truth_from_json(const Json& j) {
    GroundTruth t;
    t.scenario_id = require_string(j, "scenario_id");
    t.attacker_ips = ip_set_from_json(j, "attacker_ips");
    t.victim_ips = ip_set_from_json(j, "victim_ips");
    if (auto it = j.find("other_roles"); it != j.end() && it->is_object())
        for (const auto& [role, _] : it->items()) t.other_roles[role] = ip_set_from_json(*it, role.c_str());
    if (auto it = j.find("expected"); it != j.end()) t.expected = expected_answers_from_json(*it);
    if (auto it = j.find("timeline"); it != j.end() && it->is_array()) {
        for (const auto& e : *it) {
            TimelineEntry entry{};
            entry.phase = wrap("timeline", [&] { return phase_from_string(require_string(e, "phase")); });
            entry.technique = optional_string(e, "technique");
            entry.trace_id = optional_string(e, "trace_id");
            entry.block = e.contains("block") ? require_count(e, "block") : 0;
            entry.start_s = require_number(e, "start");
            entry.end_s = require_number(e, "end");
            t.timeline.push_back(std::move(entry));
        }
    }
    return t;
}

Json to_json(const ScenarioWarning& w) {
    return Json{{"kind", std::string(to_string(w.kind))},
                {"first_block", w.first_block},
                {"second_block", w.second_block},
                {"message", w.message}};
}

Json to_json(const pcap::RewriteSummary& s) {
    return Json{{"packets_per_entry", s.packets_per_entry},
                {"packets_rewritten", s.packets_rewritten},
                {"ipv6_passthrough", s.ipv6_passthrough},
                {"incremental_l4_updates", s.incremental_l4_updates}};
}

Json to_json(const pcap::ChecksumViolation& v) {
    return Json{{"packet_index", v.packet_index},
                {"layer", v.layer},
                {"expected", v.expected},
                {"found", v.found}};
}

// ---------------------------------------------------------------------------
// Injection

Json to_json(const InjectionSession& s) {
    return Json{{"id", s.id},
                {"scenario_id", s.scenario_id},
                {"sink", {{"type", std::string(to_string(s.sink))}, {"target", s.sink_target}}},
                {"state", std::string(to_string(s.state))},
                {"scheduled_start", s.scheduled_start},
                {"packets_sent", s.packets_sent},
                {"total_packets", s.total_packets},
                {"progress", s.progress},
                {"errors", s.errors}};
}

// ---------------------------------------------------------------------------
// Reports

Json to_json(const IncidentReport& i) {
    return Json{{"index", i.index},
                {"attacker_ips", i.attacker_ips},
                {"victim_ips", i.victim_ips},
                {"recon", i.recon_answer},
                {"exploit", i.exploit_answers},
                {"delivery", i.delivery_answers},
                {"receiver_ips", i.receiver_ips},
                {"comments", i.comments}};
}

Json to_json(const AnalystReport& r) {
    return Json{{"group_id", r.group_id},
                {"condition", r.condition},
                {"submitted_at", r.submitted_at},
                {"incidents", to_json_array(r.incidents)}};
}

Json to_json(const CleaningEntry& e) {
    return Json{{"group_id", e.group_id}, {"kind", e.kind}, {"detail", e.detail}};
}

Json to_json(const MatchResult& m) {
    return Json{{"kind", std::string(to_string(m.kind))},
                {"scenario_id", m.scenario_id},
                {"candidates", m.candidates}};
}

Json to_json(const IncidentScore& s) {
    return Json{{"matched_scenario", s.matched_scenario},
                {"attacker_correct", s.attacker_correct},
                {"victim_correct", s.victim_correct},
                {"recon_correct", s.recon_correct},
                {"exploit_correct", s.exploit_correct},
                {"delivery_hits", s.delivery_hits}};
}

Json to_json(const GradedIncident& g) {
    return Json{{"group_id", g.group_id},
                {"condition", g.condition},
                {"incident_index", g.incident_index},
                {"match", to_json(g.match)},
                {"score", to_json(g.score)}};
}

Json to_json(const PhaseCounts& c) {
    return Json{{"reporting_groups", c.reporting_groups},
                {"recon_correct", c.recon_correct},
                {"exploit_correct", c.exploit_correct},
                {"delivery_any", c.delivery_any},
                {"delivery_both", c.delivery_both},
                {"delivery_label_groups", c.delivery_label_groups}};
}

PhaseCounts phase_counts_from_json(const Json& j) {
    PhaseCounts c;
    c.reporting_groups = require_count(j, "reporting_groups");
    c.recon_correct = require_count(j, "recon_correct");
    c.exploit_correct = require_count(j, "exploit_correct");
    c.delivery_any = require_count(j, "delivery_any");
    c.delivery_both = require_count(j, "delivery_both");
    if (auto it = j.find("delivery_label_groups"); it != j.end() && it->is_object())
        for (const auto& [label, _] : it->items()) c.delivery_label_groups[label] = require_count(*it, label.c_str());
    return c;
}

Json to_json(const ConditionSummary& s) {
    Json phases = Json::object();
    for (const auto& [scenario, counts] : s.phase_counts) phases[scenario] = to_json(counts);
    return Json{{"condition", s.condition},
                {"groups", s.groups},
                {"reports_total", s.reports_total},
                {"per_group_report_counts", s.per_group_report_counts},
                {"mean_reports", s.mean_reports},
                {"sd_reports", s.sd_reports},
                {"scenario_groups", s.scenario_groups},
                {"groups_all", s.groups_all},
                {"groups_partial", s.groups_partial},
                {"groups_none", s.groups_none},
                {"phase_counts", phases},
                {"ambiguous_incidents", s.ambiguous_incidents}};
}

ConditionSummary condition_summary_from_json(const Json& j) {
    ConditionSummary s;
    s.condition = require_string(j, "condition");
    s.groups = require_count(j, "groups");
    s.reports_total = require_count(j, "reports_total");
    const Json& counts = require(j, "per_group_report_counts");
    if (!counts.is_array()) schema_error("per_group_report_counts must be an array");
    for (const auto& c : counts) {
        if (!c.is_number_integer() || c.get<std::int64_t>() < 0)
            schema_error("per_group_report_counts entries must be non-negative integers");
        s.per_group_report_counts.push_back(c.get<std::size_t>());
    }
    s.mean_reports = j.value("mean_reports", 0.0);
    s.sd_reports = j.value("sd_reports", 0.0);
    const Json& groups = require(j, "scenario_groups");
    if (!groups.is_object()) schema_error("scenario_groups must be an object");
    for (const auto& [scenario, _] : groups.items())
        s.scenario_groups[scenario] = require_count(groups, scenario.c_str());
    s.groups_all = require_count(j, "groups_all");
    s.groups_partial = require_count(j, "groups_partial");
    s.groups_none = require_count(j, "groups_none");
    if (auto it = j.find("phase_counts"); it != j.end() && it->is_object())
        for (const auto& [scenario, counts_json] : it->items())
            s.phase_counts[scenario] = phase_counts_from_json(counts_json);
    s.ambiguous_incidents = j.contains("ambiguous_incidents") ? require_count(j, "ambiguous_incidents") : 0;
    return s;
}

// ---------------------------------------------------------------------------
// Statistics

Json to_json(const stats::TestResult& r) {
    return Json{{"method", r.method},
                {"statistic", r.statistic},
                {"p_value", r.p_value},
                {"odds_ratio", odds_ratio_json(r.odds_ratio)},
                {"details", r.details}};
}

Json to_json(const stats::ProportionComparison& c) {
    return Json{{"scenario", c.scenario},
                {"measure", c.measure},
                {"reference_yes", c.reference_yes},
                {"reference_total", c.reference_total},
                {"treatment_yes", c.treatment_yes},
                {"treatment_total", c.treatment_total},
                {"reference_expected_higher", c.reference_expected_higher},
                {"directional", to_json(c.directional)},
                {"two_sided", to_json(c.two_sided)},
                {"effect_odds_ratio", odds_ratio_json(c.effect_odds_ratio)},
                {"significant", c.significant}};
}

Json to_json(const stats::ComparisonReport& r) {
    return Json{{"reference", r.reference},
                {"treatment", r.treatment},
                {"alpha", r.alpha},
                {"identification", to_json_array(r.identification)},
                {"investigation", to_json_array(r.investigation)},
                {"submissions",
                 {{"directional", to_json(r.submissions_directional)},
                  {"two_sided", to_json(r.submissions_two_sided)},
                  {"significant", r.submissions_significant},
                  {"reference_mean", r.reference_mean},
                  {"reference_sd", r.reference_sd},
                  {"treatment_mean", r.treatment_mean},
                  {"treatment_sd", r.treatment_sd}}}};
}

}  // namespace socbench
