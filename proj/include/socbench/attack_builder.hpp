#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "socbench/packet_model.hpp"
#include "socbench/trace_library.hpp"

namespace socbench {

struct AttackBlock {
    std::string trace_id;
    double offset_s = 0.0;
    double speed = 1.0;
    pcap::AddressMap address_map;

    bool operator==(const AttackBlock&) const = default;
};

struct AttackScenario {
    std::string id;
    std::string name;
    /// Narrative order; also the tie-break order when merging.
    std::vector<AttackBlock> blocks;
    std::optional<std::string> background_ref;
    std::string notes;

    bool operator==(const AttackScenario&) const = default;
};

struct TimelineEntry {
    AttackPhase phase;
    std::string technique;
    std::string trace_id;
    std::size_t block;
    double start_s;
    double end_s;

    bool operator==(const TimelineEntry&) const = default;
};

struct GroundTruth {
    std::string scenario_id;
    std::set<Ipv4Address> attacker_ips;
    std::set<Ipv4Address> victim_ips;
    /// cnc and other:<label> roles, after address mapping.
    std::map<std::string, std::set<Ipv4Address>> other_roles;
    ExpectedAnswers expected;
    std::vector<TimelineEntry> timeline;

    bool operator==(const GroundTruth&) const = default;
};

struct AssembledAttack {
    pcap::Capture capture;
    GroundTruth ground_truth;
    /// Per output packet: block index (`input`) and packet index in its trace.
    std::vector<pcap::PacketOrigin> packet_origins;
    std::string assembled_at;
};

enum class ScenarioWarningKind { phase_order, overlap };

struct ScenarioWarning {
    ScenarioWarningKind kind;
    std::size_t first_block;
    std::size_t second_block;
    std::string message;
};

std::string_view to_string(ScenarioWarningKind kind);

/// Structural checks only (no library access): at least one block, positive
/// speeds, non-negative offsets. Throws SchemaViolation.
void check_scenario_structure(const AttackScenario& scenario);

/// Phase-order and overlap warnings; never fails for ordering reasons.
/// Throws UnknownTrace when a block references a missing trace.
std::vector<ScenarioWarning> validate_scenario(const AttackScenario& scenario,
                                               const TraceLibrary& library);

GroundTruth extract_ground_truth(const AttackScenario& scenario, const TraceLibrary& library);

/// Rewrite, re-time and merge every block; deterministic for a given
/// scenario and library state.
AssembledAttack assemble(const AttackScenario& scenario, const TraceLibrary& library);

/// scenarios/<id>.json under the library root.
class ScenarioStore {
public:
    explicit ScenarioStore(TraceLibrary& library);

    /// Assigns an id when `scenario.id` is empty; overwrites an existing id.
    std::string save_scenario(AttackScenario scenario);
    AttackScenario load_scenario(std::string_view id) const;
    std::vector<AttackScenario> list_scenarios() const;
    bool contains(std::string_view id) const;
    void remove_scenario(std::string_view id);

private:
    std::filesystem::path path_for(std::string_view id) const;

    TraceLibrary& library_;
};

}  // namespace socbench
