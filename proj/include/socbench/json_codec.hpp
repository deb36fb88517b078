#pragma once

// JSON documents for every persisted or exchanged type. Decoders throw
// SchemaViolation with the offending field named.

#include "json.hpp"

#include "socbench/attack_builder.hpp"
#include "socbench/comparison.hpp"
#include "socbench/injector.hpp"
#include "socbench/packet_model.hpp"
#include "socbench/report_eval.hpp"
#include "socbench/stats.hpp"
#include "socbench/trace_library.hpp"

namespace socbench {

using Json = nlohmann::json;

/// `single_valued` writes recon/exploit as a string (trace form) instead of
/// an array (ground-truth form).
Json to_json(const ExpectedAnswers& answers, bool single_valued);
ExpectedAnswers expected_answers_from_json(const Json& j);

Json to_json(const RoleMap& roles);
RoleMap roles_from_json(const Json& j);

Json to_json(const AttackTrace& trace);
AttackTrace trace_from_json(const Json& j);
/// name, phase, technique, roles, expected_answers.
TraceMetadata trace_metadata_from_json(const Json& j);

Json to_json(const pcap::AddressMap& map);
pcap::AddressMap address_map_from_json(const Json& j);

Json to_json(const AttackScenario& scenario);
AttackScenario scenario_from_json(const Json& j);

Json to_json(const GroundTruth& truth);
GroundTruth ground_truth_from_json(const Json& j);

Json to_json(const ScenarioWarning& warning);
Json to_json(const pcap::RewriteSummary& summary);
Json to_json(const pcap::ChecksumViolation& violation);

Json to_json(const InjectionSession& session);

Json to_json(const IncidentReport& incident);
Json to_json(const AnalystReport& report);
Json to_json(const CleaningEntry& entry);
Json to_json(const MatchResult& match);
Json to_json(const IncidentScore& score);
Json to_json(const GradedIncident& graded);
Json to_json(const PhaseCounts& counts);
PhaseCounts phase_counts_from_json(const Json& j);
Json to_json(const ConditionSummary& summary);
ConditionSummary condition_summary_from_json(const Json& j);

Json to_json(const stats::TestResult& result);
Json to_json(const stats::ProportionComparison& cell);
Json to_json(const stats::ComparisonReport& report);

/// Finite numbers as-is, +inf as the string "Infinity", absent as null.
Json odds_ratio_json(const std::optional<double>& value);

template <typename T>
Json to_json_array(const std::vector<T>& items) {
    Json out = Json::array();
    for (const auto& item : items) out.push_back(to_json(item));
    return out;
}

}  // namespace socbench
