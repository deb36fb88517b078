#include "socbench/report_eval.hpp"

#include <algorithm>
#include <charconv>
#include <optional>

#include "csv.hpp"
#include "socbench/error.hpp"
#include "socbench/stats.hpp"
#include "util.hpp"

namespace socbench {

std::string_view to_string(MatchResult::Kind kind) {
    switch (kind) {
        case MatchResult::Kind::none: return "none";
        case MatchResult::Kind::matched: return "matched";
        case MatchResult::Kind::ambiguous: return "ambiguous";
    }
    return "none";
}

namespace {

constexpr const char* kRequiredColumns[] = {"group_id",     "condition",  "submitted_at",
                                            "incident_index", "attacker_ips", "victim_ips",
                                            "recon",        "exploit",    "delivery"};

bool is_na(std::string_view value) { return util::to_lower(value) == "na"; }

std::vector<std::string> cell_values(std::string_view cell) {
    std::vector<std::string> out;
    for (auto& part : util::split(cell, ";\n\r")) {
        auto value = util::trim(part);
        if (!value.empty() && !is_na(value)) out.push_back(std::move(value));
    }
    return out;
}

std::set<std::string> label_values(std::string_view cell) {
    std::set<std::string> out;
    for (const auto& value : cell_values(cell)) {
        auto label = canonical_label(value);
        if (!label.empty()) out.insert(std::move(label));
    }
    return out;
}

struct Column {
    std::optional<std::size_t> index;
    std::string_view get(const csv::Row& row) const {
        if (!index || *index >= row.size()) return {};
        return row[*index];
    }
};

struct Submission {
    std::string group_id;
    std::string condition;
    std::string submitted_at;
    std::optional<std::chrono::system_clock::time_point> time;
    std::size_t order = 0;
    std::vector<IncidentReport> incidents;
};

bool has_answers(const IncidentReport& i) {
    return !i.attacker_ips.empty() || !i.victim_ips.empty() || !i.recon_answer.empty() ||
           !i.exploit_answers.empty() || !i.delivery_answers.empty() || !i.receiver_ips.empty() ||
           !i.comments.empty();
}

bool lists_any(const std::vector<std::string>& listed, const std::set<Ipv4Address>& truth) {
    for (const auto& ip : truth) {
        const std::string text = ip.to_string();
        if (std::find(listed.begin(), listed.end(), text) != listed.end()) return true;
    }
    return false;
}

bool recon_ok(const IncidentReport& i, const GroundTruth& t) {
    return !i.recon_answer.empty() && t.expected.recon.contains(i.recon_answer);
}

bool exploit_ok(const IncidentReport& i, const GroundTruth& t) {
    if (t.expected.exploit.empty()) return false;
    return std::all_of(t.expected.exploit.begin(), t.expected.exploit.end(),
                       [&](const std::string& label) { return i.exploit_answers.contains(label); });
}

int delivery_hits(const IncidentReport& i, const GroundTruth& t) {
    int hits = 0;
    for (const auto& label : i.delivery_answers) hits += t.expected.delivery_control.contains(label) ? 1 : 0;
    return hits;
}

template <typename T>
void take_later(T& field, const T& later) {
    if (!later.empty()) field = later;
}

// Keeps the higher-scoring answer; ties go to the later non-empty one.
template <typename T, typename Score>
void take_better(T& field, const T& later, Score score) {
    if (later.empty()) return;
    if (field.empty() || score(later) >= score(field)) field = later;
}

void merge_incident(IncidentReport& base, const IncidentReport& later, const GroundTruth* truth) {
    if (!truth) {
        take_later(base.attacker_ips, later.attacker_ips);
        take_later(base.victim_ips, later.victim_ips);
        take_later(base.recon_answer, later.recon_answer);
        take_later(base.exploit_answers, later.exploit_answers);
        take_later(base.delivery_answers, later.delivery_answers);
    } else {
        const GroundTruth& t = *truth;
        take_better(base.attacker_ips, later.attacker_ips,
                    [&](const auto& v) { return lists_any(v, t.attacker_ips) ? 1 : 0; });
        take_better(base.victim_ips, later.victim_ips,
                    [&](const auto& v) { return lists_any(v, t.victim_ips) ? 1 : 0; });
        take_better(base.recon_answer, later.recon_answer,
                    [&](const std::string& v) { return t.expected.recon.contains(v) ? 1 : 0; });
        take_better(base.exploit_answers, later.exploit_answers, [&](const std::set<std::string>& v) {
            IncidentReport probe;
            probe.exploit_answers = v;
            return exploit_ok(probe, t) ? 1 : 0;
        });
        take_better(base.delivery_answers, later.delivery_answers, [&](const std::set<std::string>& v) {
            IncidentReport probe;
            probe.delivery_answers = v;
            return delivery_hits(probe, t);
        });
    }
    take_later(base.receiver_ips, later.receiver_ips);
    take_later(base.comments, later.comments);
}

AnalystReport merge_submissions(std::vector<Submission>& subs, std::span<const GroundTruth> truths,
                                CleaningLog& log) {
    std::stable_sort(subs.begin(), subs.end(), [](const Submission& a, const Submission& b) {
        if (a.time && b.time) return *a.time < *b.time;
        if (a.time.has_value() != b.time.has_value()) return a.time.has_value();
        return a.submitted_at < b.submitted_at;
    });

    AnalystReport report;
    report.group_id = subs.front().group_id;
    report.condition = subs.front().condition;
    report.submitted_at = subs.front().submitted_at;
    if (subs.size() == 1) {
        report.incidents = std::move(subs.front().incidents);
        return report;
    }

    log.push_back({report.group_id, "duplicate_submission",
                   "merged " + std::to_string(subs.size()) + " submissions; kept timestamp " +
                       report.submitted_at});

    // Incidents are aligned by matched scenario when truths are available,
    // otherwise (and for unmatched incidents) by incident_index.
    std::vector<std::string> keys;
    std::map<std::string, IncidentReport> merged;
    std::map<std::string, const GroundTruth*> key_truth;
    for (const auto& sub : subs) {
        for (const auto& incident : sub.incidents) {
            std::string key = "index:" + std::to_string(incident.index);
            const GroundTruth* truth = nullptr;
            if (!truths.empty()) {
                const MatchResult m = match_incident(incident, truths);
                if (m.kind == MatchResult::Kind::matched) {
                    key = "scenario:" + m.scenario_id;
                    for (const auto& t : truths)
                        if (t.scenario_id == m.scenario_id) truth = &t;
                }
            }
            auto it = merged.find(key);
            if (it == merged.end()) {
                keys.push_back(key);
                merged.emplace(key, incident);
                key_truth[key] = truth;
            } else {
                merge_incident(it->second, incident, key_truth[key]);
            }
        }
    }
    for (const auto& key : keys) report.incidents.push_back(std::move(merged[key]));
    return report;
}

}  // namespace

ParsedReports parse_reports(std::string_view csv_text, std::span<const GroundTruth> truths) {
    const auto rows = csv::parse(csv_text);
    if (rows.empty()) fail(ErrorCode::empty_file, "report file is empty");

    std::map<std::string, Column> columns;
    for (std::size_t i = 0; i < rows.front().size(); ++i)
        columns[util::to_lower(util::trim(rows.front()[i]))].index = i;
    for (const char* name : kRequiredColumns)
        if (!columns[name].index) fail(ErrorCode::schema_violation, std::string("missing required column '") + name + "'");

    ParsedReports out;
    std::vector<std::string> group_order;
    std::map<std::string, std::vector<Submission>> groups;

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (std::all_of(row.begin(), row.end(), [](const std::string& f) { return util::trim(f).empty(); }))
            continue;
        const std::string line = "row " + std::to_string(r + 1) + ": ";
        const std::string group = util::trim(columns["group_id"].get(row));
        if (group.empty()) fail(ErrorCode::schema_violation, line + "group_id is empty");
        const std::string condition = util::trim(columns["condition"].get(row));
        const std::string submitted_at = util::trim(columns["submitted_at"].get(row));

        auto& subs = groups[group];
        if (subs.empty()) group_order.push_back(group);
        if (!subs.empty() && subs.front().condition != condition)
            fail(ErrorCode::schema_violation, line + "group " + group + " appears under two conditions");
        auto sub = std::find_if(subs.begin(), subs.end(),
                                [&](const Submission& s) { return s.submitted_at == submitted_at; });
        if (sub == subs.end()) {
            subs.push_back({group, condition, submitted_at, util::parse_iso8601(submitted_at), r, {}});
            sub = subs.end() - 1;
        }

        IncidentReport incident;
        const std::string index_text = util::trim(columns["incident_index"].get(row));
        if (index_text.empty()) {
            incident.index = sub->incidents.size() + 1;
        } else {
            auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), incident.index);
            if (ec != std::errc{} || ptr != index_text.data() + index_text.size())
                fail(ErrorCode::schema_violation, line + "incident_index '" + index_text + "' is not an integer");
        }
        incident.attacker_ips = cell_values(columns["attacker_ips"].get(row));
        incident.victim_ips = cell_values(columns["victim_ips"].get(row));
        const auto recon = label_values(columns["recon"].get(row));
        if (!recon.empty()) incident.recon_answer = *recon.begin();
        incident.exploit_answers = label_values(columns["exploit"].get(row));
        incident.delivery_answers = label_values(columns["delivery"].get(row));
        for (const auto& entry : cell_values(columns["receiver_ips"].get(row))) {
            const auto eq = entry.find('=');
            if (eq == std::string::npos) continue;
            incident.receiver_ips[canonical_label(entry.substr(0, eq))] = util::trim(entry.substr(eq + 1));
        }
        incident.comments = std::string(columns["comments"].get(row));

        // A row with no incident index and no answers records a submission
        // without incidents.
        if (index_text.empty() && !has_answers(incident)) continue;

        if (incident.delivery_answers.size() > kMaxDeliveryAnswers)
            out.log.push_back({group, "delivery_cap_exceeded",
                               "incident " + std::to_string(incident.index) + " selects " +
                                   std::to_string(incident.delivery_answers.size()) + " delivery answers"});
        auto check_labels = [&](Question q, const auto& labels) {
            for (const std::string& label : labels)
                if (!is_known_label(q, label))
                    out.log.push_back({group, "unknown_label",
                                       std::string(to_string(q)) + " answer '" + label + "' kept as free text"});
        };
        if (!incident.recon_answer.empty()) check_labels(Question::recon, std::set{incident.recon_answer});
        check_labels(Question::exploit, incident.exploit_answers);
        check_labels(Question::delivery_control, incident.delivery_answers);
        sub->incidents.push_back(std::move(incident));
    }

    for (const auto& group : group_order) {
        AnalystReport report = merge_submissions(groups[group], truths, out.log);
        if (report.incidents.size() > kMaxIncidentsPerReport)
            out.log.push_back({group, "incident_cap_exceeded",
                               std::to_string(report.incidents.size()) + " incidents reported"});
        out.reports.push_back(std::move(report));
    }
    return out;
}

MatchResult match_incident(const IncidentReport& incident, std::span<const GroundTruth> truths) {
    std::vector<std::string> attackers, victims;
    for (const auto& ip : incident.attacker_ips) attackers.push_back(util::trim(ip));
    for (const auto& ip : incident.victim_ips) victims.push_back(util::trim(ip));

    MatchResult result;
    for (const auto& t : truths)
        if (lists_any(attackers, t.attacker_ips) && lists_any(victims, t.victim_ips))
            result.candidates.push_back(t.scenario_id);
    if (result.candidates.size() == 1) {
        result.kind = MatchResult::Kind::matched;
        result.scenario_id = result.candidates.front();
    } else if (result.candidates.size() > 1) {
        result.kind = MatchResult::Kind::ambiguous;
    }
    return result;
}

IncidentScore score_incident(const IncidentReport& incident, const GroundTruth& truth) {
    const MatchResult m = match_incident(incident, std::span(&truth, 1));
    if (m.kind != MatchResult::Kind::matched)
        fail(ErrorCode::unmatched_incident, "incident " + std::to_string(incident.index) +
                                                " does not match scenario " + truth.scenario_id);
    IncidentScore s;
    s.matched_scenario = truth.scenario_id;
    s.attacker_correct = true;
    s.victim_correct = true;
    s.recon_correct = recon_ok(incident, truth);
    s.exploit_correct = exploit_ok(incident, truth);
    s.delivery_hits = delivery_hits(incident, truth);
    return s;
}

Evaluation grade_reports(std::span<const AnalystReport> reports, std::span<const GroundTruth> truths) {
    Evaluation eval;
    for (const auto& report : reports) {
        for (const auto& incident : report.incidents) {
            GradedIncident g;
            g.group_id = report.group_id;
            g.condition = report.condition;
            g.incident_index = incident.index;
            g.match = match_incident(incident, truths);
            if (g.match.kind == MatchResult::Kind::matched) {
                for (const auto& t : truths)
                    if (t.scenario_id == g.match.scenario_id) g.score = score_incident(incident, t);
            } else if (g.match.kind == MatchResult::Kind::ambiguous) {
                g.score.matched_scenario = "ambiguous";
                std::string ids;
                for (const auto& id : g.match.candidates) ids += (ids.empty() ? "" : ", ") + id;
                eval.log.push_back({report.group_id, "ambiguous_match",
                                    "incident " + std::to_string(incident.index) + " matches " + ids});
            }
            eval.incidents.push_back(std::move(g));
        }
    }
    return eval;
}

std::vector<ConditionSummary> aggregate(std::span<const AnalystReport> reports,
                                        std::span<const GroundTruth> truths,
                                        std::span<const std::string> conditions) {
    std::vector<ConditionSummary> out;
    for (const auto& c : conditions) {
        ConditionSummary s;
        s.condition = c;
        for (const auto& t : truths) {
            s.scenario_groups[t.scenario_id] = 0;
            s.phase_counts[t.scenario_id] = {};
        }
        out.push_back(std::move(s));
    }

    for (const auto& report : reports) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const ConditionSummary& s) { return s.condition == report.condition; });
        if (it == out.end()) fail(ErrorCode::unknown_condition, "report of group " + report.group_id +
                                                                     " has unknown condition '" +
                                                                     report.condition + "'");
        ConditionSummary& s = *it;
        s.groups += 1;
        s.reports_total += report.incidents.size();
        s.per_group_report_counts.push_back(report.incidents.size());

        std::size_t detected = 0;
        for (const auto& t : truths) {
            bool reported = false, recon = false, exploit = false, any = false, both = false;
            std::set<std::string> labels;
            for (const auto& incident : report.incidents) {
                const MatchResult m = match_incident(incident, truths);
                if (m.kind != MatchResult::Kind::matched || m.scenario_id != t.scenario_id) continue;
                reported = true;
                recon = recon || recon_ok(incident, t);
                exploit = exploit || exploit_ok(incident, t);
                const int hits = delivery_hits(incident, t);
                any = any || hits > 0;
                both = both || (!t.expected.delivery_control.empty() &&
                                hits == static_cast<int>(t.expected.delivery_control.size()));
                labels.insert(incident.delivery_answers.begin(), incident.delivery_answers.end());
            }
            if (!reported) continue;
            ++detected;
            s.scenario_groups[t.scenario_id] += 1;
            PhaseCounts& pc = s.phase_counts[t.scenario_id];
            pc.reporting_groups += 1;
            pc.recon_correct += recon;
            pc.exploit_correct += exploit;
            pc.delivery_any += any;
            pc.delivery_both += both;
            for (const auto& label : labels) pc.delivery_label_groups[label] += 1;
        }
        for (const auto& incident : report.incidents)
            if (match_incident(incident, truths).kind == MatchResult::Kind::ambiguous) s.ambiguous_incidents += 1;

        if (detected == 0)
            s.groups_none += 1;
        else if (detected == truths.size())
            s.groups_all += 1;
        else
            s.groups_partial += 1;
    }

    for (auto& s : out) {
        std::vector<double> counts(s.per_group_report_counts.begin(), s.per_group_report_counts.end());
        s.mean_reports = counts.empty() ? 0.0 : stats::mean(counts);
        s.sd_reports = counts.size() < 2 ? 0.0 : stats::sample_sd(counts);
    }
    return out;
}

std::string scores_csv(std::span<const GradedIncident> graded) {
    std::string out =
        "group_id,condition,incident_index,matched_scenario,attacker_correct,victim_correct,"
        "recon_correct,exploit_correct,delivery_hits\n";
    auto flag = [](bool b) { return b ? "true" : "false"; };
    for (const auto& g : graded) {
        out += csv::escape(g.group_id) + ',' + csv::escape(g.condition) + ',' +
               std::to_string(g.incident_index) + ',' + csv::escape(g.score.matched_scenario) + ',' +
               flag(g.score.attacker_correct) + ',' + flag(g.score.victim_correct) + ',' +
               flag(g.score.recon_correct) + ',' + flag(g.score.exploit_correct) + ',' +
               std::to_string(g.score.delivery_hits) + '\n';
    }
    return out;
}

}  // namespace socbench
