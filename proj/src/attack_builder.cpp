#include "socbench/attack_builder.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "socbench/error.hpp"
#include "socbench/json_codec.hpp"
#include "util.hpp"

namespace fs = std::filesystem;

namespace socbench {

std::string_view to_string(ScenarioWarningKind kind) {
    return kind == ScenarioWarningKind::phase_order ? "phase_order" : "overlap";
}

void check_scenario_structure(const AttackScenario& scenario) {
    if (scenario.blocks.empty()) fail(ErrorCode::schema_violation, "a scenario needs at least one block");
    for (std::size_t i = 0; i < scenario.blocks.size(); ++i) {
        const auto& b = scenario.blocks[i];
        const std::string where = "block " + std::to_string(i) + ": ";
        if (b.trace_id.empty()) fail(ErrorCode::schema_violation, where + "trace_id is empty");
        if (!(b.speed > 0.0) || !std::isfinite(b.speed))
            fail(ErrorCode::schema_violation, where + "speed must be a positive number");
        if (!(b.offset_s >= 0.0) || !std::isfinite(b.offset_s))
            fail(ErrorCode::schema_violation, where + "offset_s must be a non-negative number");
    }
}

namespace {

struct ResolvedBlock {
    AttackTrace trace;
    double start;
    double end;
};

std::vector<ResolvedBlock> resolve(const AttackScenario& scenario, const TraceLibrary& library) {
    check_scenario_structure(scenario);
    std::vector<ResolvedBlock> out;
    for (const auto& b : scenario.blocks) {
        if (!library.contains(b.trace_id))
            fail(ErrorCode::unknown_trace, "scenario references unknown trace '" + b.trace_id + "'");
        AttackTrace t = library.get_trace(b.trace_id);
        const double end = b.offset_s + t.duration_s / b.speed;
        out.push_back({std::move(t), b.offset_s, end});
    }
    return out;
}

}  // namespace

std::vector<ScenarioWarning> validate_scenario(const AttackScenario& scenario, const TraceLibrary& library) {
    const auto blocks = resolve(scenario, library);
    std::vector<ScenarioWarning> warnings;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            const auto& a = blocks[i];
            const auto& b = blocks[j];
            const bool inverted = (a.trace.phase < b.trace.phase && a.start > b.start) ||
                                  (b.trace.phase < a.trace.phase && b.start > a.start);
            if (inverted) {
                const auto& early = a.start < b.start ? a : b;
                const auto& late = a.start < b.start ? b : a;
                warnings.push_back({ScenarioWarningKind::phase_order, i, j,
                                    std::string(to_string(early.trace.phase)) + " block starts before " +
                                        std::string(to_string(late.trace.phase)) + " block"});
            }
            if (a.start < b.end && b.start < a.end) {
                warnings.push_back({ScenarioWarningKind::overlap, i, j,
                                    "blocks " + std::to_string(i) + " and " + std::to_string(j) +
                                        " overlap in time"});
            }
        }
    }
    return warnings;
}

GroundTruth extract_ground_truth(const AttackScenario& scenario, const TraceLibrary& library) {
    const auto blocks = resolve(scenario, library);
    GroundTruth truth;
    truth.scenario_id = scenario.id;
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const auto& map = scenario.blocks[i].address_map;
        const auto& t = blocks[i].trace;
        for (const auto& [role, ip] : t.roles) {
            const Ipv4Address mapped = map.apply(ip);
            if (role == "attacker")
                truth.attacker_ips.insert(mapped);
            else if (role == "victim")
                truth.victim_ips.insert(mapped);
            else
                truth.other_roles[role].insert(mapped);
        }
        truth.expected.merge(t.expected_answers);
        truth.timeline.push_back({t.phase, t.technique, t.id, i, blocks[i].start, blocks[i].end});
    }
    for (auto ip : truth.attacker_ips)
        if (truth.victim_ips.contains(ip))
            fail(ErrorCode::conflicting_roles, ip.to_string() + " is both an attacker and a victim");
    if (truth.attacker_ips.empty() || truth.victim_ips.empty())
        fail(ErrorCode::invalid_argument, "the scenario's traces must name at least one attacker and one victim");
    std::stable_sort(truth.timeline.begin(), truth.timeline.end(),
                     [](const TimelineEntry& a, const TimelineEntry& b) { return a.start_s < b.start_s; });
    return truth;
}

AssembledAttack assemble(const AttackScenario& scenario, const TraceLibrary& library) {
    AssembledAttack out;
    out.ground_truth = extract_ground_truth(scenario, library);

    std::vector<pcap::Capture> parts;
    parts.reserve(scenario.blocks.size());
    for (const auto& b : scenario.blocks) {
        pcap::Capture c = library.load_capture(b.trace_id);
        if (!b.address_map.empty()) c = pcap::rewrite_addresses(c, b.address_map).capture;
        parts.push_back(pcap::transform_time(c, b.offset_s, b.speed));
    }
    auto merged = pcap::merge_with_origins(parts);
    out.capture = std::move(merged.capture);
    out.packet_origins = std::move(merged.origins);
    out.assembled_at = util::now_iso8601();
    return out;
}

// ---------------------------------------------------------------------------

ScenarioStore::ScenarioStore(TraceLibrary& library) : library_(library) {}

fs::path ScenarioStore::path_for(std::string_view id) const {
    const bool safe = !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    });
    if (!safe) fail(ErrorCode::not_found, "no scenario with id '" + std::string(id) + "'");
    return library_.root() / "scenarios" / (std::string(id) + ".json");
}

std::string ScenarioStore::save_scenario(AttackScenario scenario) {
    check_scenario_structure(scenario);
    if (scenario.id.empty()) scenario.id = library_.new_id("sc");
    const fs::path path = path_for(scenario.id);
    std::unique_lock lock(library_.storage_mutex());
    util::write_file_atomic(path, to_json(scenario).dump(2));
    return scenario.id;
}

AttackScenario ScenarioStore::load_scenario(std::string_view id) const {
    const fs::path path = path_for(id);
    std::string text;
    {
        std::shared_lock lock(library_.storage_mutex());
        if (!fs::exists(path)) fail(ErrorCode::not_found, "no scenario with id '" + std::string(id) + "'");
        text = util::read_text_file(path);
    }
    const Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail(ErrorCode::schema_violation, "scenario " + std::string(id) + " is not valid JSON");
    AttackScenario s = scenario_from_json(doc);
    s.id = std::string(id);
    return s;
}

std::vector<AttackScenario> ScenarioStore::list_scenarios() const {
    std::vector<std::string> ids;
    {
        std::shared_lock lock(library_.storage_mutex());
        for (const auto& entry : fs::directory_iterator(library_.root() / "scenarios"))
            if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
    }
    std::sort(ids.begin(), ids.end());
    std::vector<AttackScenario> out;
    for (const auto& id : ids) out.push_back(load_scenario(id));
    return out;
}

bool ScenarioStore::contains(std::string_view id) const {
    try {
        const fs::path path = path_for(id);
        std::shared_lock lock(library_.storage_mutex());
        return fs::exists(path);
    } catch (const Error&) {
        return false;
    }
}

void ScenarioStore::remove_scenario(std::string_view id) {
    const fs::path path = path_for(id);
    std::unique_lock lock(library_.storage_mutex());
    if (!fs::remove(path)) fail(ErrorCode::not_found, "no scenario with id '" + std::string(id) + "'");
}

}  // namespace socbench
