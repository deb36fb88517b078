#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socbench/attack_builder.hpp"

namespace socbench {

/// One incident from an analyst submission. Labels are canonical (see
/// canonical_label); IP lists hold trimmed strings and are matched literally.
struct IncidentReport {
    std::size_t index = 0;
    std::vector<std::string> attacker_ips;
    std::vector<std::string> victim_ips;
    std::string recon_answer;
    std::set<std::string> exploit_answers;
    std::set<std::string> delivery_answers;
    std::map<std::string, std::string> receiver_ips;
    std::string comments;

    bool operator==(const IncidentReport&) const = default;
};

struct AnalystReport {
    std::string group_id;
    std::string condition;
    std::string submitted_at;
    std::vector<IncidentReport> incidents;

    bool operator==(const AnalystReport&) const = default;
};

/// Kinds: "duplicate_submission", "delivery_cap_exceeded",
/// "incident_cap_exceeded", "ambiguous_match", "unknown_label".
struct CleaningEntry {
    std::string group_id;
    std::string kind;
    std::string detail;
};

using CleaningLog = std::vector<CleaningEntry>;

inline constexpr std::size_t kMaxIncidentsPerReport = 5;
inline constexpr std::size_t kMaxDeliveryAnswers = 2;

struct ParsedReports {
    std::vector<AnalystReport> reports;
    CleaningLog log;
};

/// Parses the report CSV. Rows sharing a group_id but carrying different
/// submitted_at values are separate submissions and are merged into one
/// report that keeps the earliest timestamp. With `truths`, each merged
/// field keeps whichever answer grades higher; otherwise the later
/// submission's field wins.
ParsedReports parse_reports(std::string_view csv, std::span<const GroundTruth> truths = {});

struct MatchResult {
    enum class Kind { none, matched, ambiguous };
    Kind kind = Kind::none;
    std::string scenario_id;              // set when matched
    std::vector<std::string> candidates;  // every scenario that matched

    bool operator==(const MatchResult&) const = default;
};

std::string_view to_string(MatchResult::Kind kind);

/// Perfect-match rule: a scenario matches when one of its attacker IPs and
/// one of its victim IPs appear verbatim (after trimming) in the incident.
MatchResult match_incident(const IncidentReport& incident, std::span<const GroundTruth> truths);

struct IncidentScore {
    /// Scenario id, "none" or "ambiguous".
    std::string matched_scenario = "none";
    bool attacker_correct = false;
    bool victim_correct = false;
    bool recon_correct = false;
    bool exploit_correct = false;
    int delivery_hits = 0;

    bool operator==(const IncidentScore&) const = default;
};

/// Grades multiple-choice answers only; comments never count. Throws
/// UnmatchedIncident when the incident does not match `truth`.
IncidentScore score_incident(const IncidentReport& incident, const GroundTruth& truth);

struct GradedIncident {
    std::string group_id;
    std::string condition;
    std::size_t incident_index = 0;
    MatchResult match;
    IncidentScore score;
};

struct Evaluation {
    std::vector<GradedIncident> incidents;
    CleaningLog log;
};

Evaluation grade_reports(std::span<const AnalystReport> reports, std::span<const GroundTruth> truths);

/// Group-level counts for one scenario among groups that reported it.
struct PhaseCounts {
    std::size_t reporting_groups = 0;
    std::size_t recon_correct = 0;
    std::size_t exploit_correct = 0;
    std::size_t delivery_any = 0;   // at least one expected delivery/control answer
    std::size_t delivery_both = 0;  // both (all) expected answers
    /// Groups selecting each delivery/control label.
    std::map<std::string, std::size_t> delivery_label_groups;

    bool operator==(const PhaseCounts&) const = default;
};

struct ConditionSummary {
    std::string condition;
    std::size_t groups = 0;
    std::size_t reports_total = 0;
    std::vector<std::size_t> per_group_report_counts;
    double mean_reports = 0.0;
    double sd_reports = 0.0;
    /// Groups with at least one incident matched to the scenario.
    std::map<std::string, std::size_t> scenario_groups;
    std::size_t groups_all = 0;      // reported every scenario ("both" for two)
    std::size_t groups_partial = 0;  // some but not all
    std::size_t groups_none = 0;
    std::map<std::string, PhaseCounts> phase_counts;
    std::size_t ambiguous_incidents = 0;

    bool operator==(const ConditionSummary&) const = default;
};

/// One summary per entry of `conditions`, in that order. Throws
/// UnknownCondition for reports whose condition is not listed.
std::vector<ConditionSummary> aggregate(std::span<const AnalystReport> reports,
                                        std::span<const GroundTruth> truths,
                                        std::span<const std::string> conditions);

/// Flat CSV of incident scores.
std::string scores_csv(std::span<const GradedIncident> graded);

}  // namespace socbench
