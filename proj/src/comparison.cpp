#include "socbench/comparison.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "socbench/error.hpp"

namespace socbench::stats {

namespace {

TestResult not_computed(const std::string& method, const std::string& why) {
    TestResult r;
    r.method = method;
    r.statistic = std::nan("");
    r.p_value = 1.0;
    r.details = "not computed: " + why;
    return r;
}

std::size_t lookup(const std::map<std::string, std::size_t>& m, const std::string& key) {
    auto it = m.find(key);
    return it == m.end() ? 0 : it->second;
}

}  // namespace

ProportionComparison compare_proportions(std::string scenario, std::string measure,
                                         std::uint64_t reference_yes, std::uint64_t reference_total,
                                         std::uint64_t treatment_yes, std::uint64_t treatment_total,
                                         bool reference_expected_higher, double alpha) {
    if (reference_yes > reference_total || treatment_yes > treatment_total)
        fail(ErrorCode::invalid_argument, "count exceeds its total in '" + measure + "'");
    ProportionComparison c;
    c.scenario = std::move(scenario);
    c.measure = std::move(measure);
    c.reference_yes = reference_yes;
    c.reference_total = reference_total;
    c.treatment_yes = treatment_yes;
    c.treatment_total = treatment_total;
    c.reference_expected_higher = reference_expected_higher;

    const ContingencyTable table{reference_yes, reference_total - reference_yes, treatment_yes,
                                 treatment_total - treatment_yes};
    if (table.total() == 0) {
        c.directional = not_computed("fisher_exact", "no observations");
        c.two_sided = c.directional;
        return c;
    }
    const ContingencyTable oriented = reference_expected_higher ? table : table.swapped_rows();
    c.directional = fisher_exact(oriented, Alternative::greater);
    c.two_sided = fisher_exact(table, Alternative::two_sided);
    c.effect_odds_ratio = c.directional.odds_ratio;
    c.significant = c.directional.p_value < alpha;
    return c;
}

ComparisonReport compare_conditions(std::span<const ConditionSummary> summaries, double alpha) {
    if (summaries.size() != 2)
        fail(ErrorCode::arity_mismatch,
             "comparison needs exactly two condition summaries, got " + std::to_string(summaries.size()));
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::invalid_argument, "alpha must lie in (0, 1)");

    const ConditionSummary& ref = summaries[0];
    const ConditionSummary& tr = summaries[1];
    ComparisonReport report;
    report.reference = ref.condition;
    report.treatment = tr.condition;
    report.alpha = alpha;

    std::set<std::string> scenarios;
    for (const auto& [id, _] : ref.scenario_groups) scenarios.insert(id);
    for (const auto& [id, _] : tr.scenario_groups) scenarios.insert(id);

    for (const auto& id : scenarios)
        report.identification.push_back(compare_proportions(id, "reported", lookup(ref.scenario_groups, id),
                                                            ref.groups, lookup(tr.scenario_groups, id),
                                                            tr.groups, false, alpha));
    report.identification.push_back(
        compare_proportions("*", "reported all", ref.groups_all, ref.groups, tr.groups_all, tr.groups, false, alpha));
    report.identification.push_back(
        compare_proportions("*", "reported none", ref.groups_none, ref.groups, tr.groups_none, tr.groups, true, alpha));
    report.identification.push_back(compare_proportions("*", "reported all | reported any", ref.groups_all,
                                                        ref.groups - ref.groups_none, tr.groups_all,
                                                        tr.groups - tr.groups_none, false, alpha));

    for (const auto& id : scenarios) {
        const PhaseCounts rp = ref.phase_counts.contains(id) ? ref.phase_counts.at(id) : PhaseCounts{};
        const PhaseCounts tp = tr.phase_counts.contains(id) ? tr.phase_counts.at(id) : PhaseCounts{};
        auto add = [&](const std::string& measure, std::size_t r_yes, std::size_t t_yes) {
            report.investigation.push_back(compare_proportions(id, measure, r_yes, rp.reporting_groups, t_yes,
                                                               tp.reporting_groups, false, alpha));
        };
        add("recon correct", rp.recon_correct, tp.recon_correct);
        add("exploit correct", rp.exploit_correct, tp.exploit_correct);
        add("delivery/control >=1 correct", rp.delivery_any, tp.delivery_any);
        add("delivery/control all correct", rp.delivery_both, tp.delivery_both);
        std::set<std::string> labels;
        for (const auto& [label, _] : rp.delivery_label_groups) labels.insert(label);
        for (const auto& [label, _] : tp.delivery_label_groups) labels.insert(label);
        for (const auto& label : labels)
            add("selected " + label, lookup(rp.delivery_label_groups, label), lookup(tp.delivery_label_groups, label));
    }

    const std::vector<double> x(ref.per_group_report_counts.begin(), ref.per_group_report_counts.end());
    const std::vector<double> y(tr.per_group_report_counts.begin(), tr.per_group_report_counts.end());
    if (x.empty() || y.empty()) {
        report.submissions_directional = not_computed("wilcoxon_rank_sum", "empty sample");
        report.submissions_two_sided = report.submissions_directional;
    } else {
        // The treatment is expected to submit more reports.
        report.submissions_directional = wilcoxon_rank_sum(x, y, Alternative::less);
        report.submissions_two_sided = wilcoxon_rank_sum(x, y, Alternative::two_sided);
        report.submissions_significant = report.submissions_directional.p_value < alpha;
    }
    report.reference_mean = ref.mean_reports;
    report.reference_sd = ref.sd_reports;
    report.treatment_mean = tr.mean_reports;
    report.treatment_sd = tr.sd_reports;
    return report;
}

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string ratio(std::uint64_t yes, std::uint64_t total) {
    if (total == 0) return "0/0";
    return fmt("%.1f%%", 100.0 * static_cast<double>(yes) / static_cast<double>(total)) + " (" +
           std::to_string(yes) + "/" + std::to_string(total) + ")";
}

std::string or_text(const std::optional<double>& v) {
    if (!v) return "-";
    if (std::isinf(*v)) return "inf";
    return fmt("%.2f", *v);
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

void render_rows(std::string& out, const std::vector<ProportionComparison>& rows) {
    for (const auto& c : rows) {
        out += pad(c.scenario, 10) + pad(c.measure, 34) + pad(ratio(c.reference_yes, c.reference_total), 18) +
               pad(ratio(c.treatment_yes, c.treatment_total), 18) + pad(fmt("%.4f", c.directional.p_value), 9) +
               pad(or_text(c.effect_odds_ratio), 8) + pad(fmt("%.4f", c.two_sided.p_value), 9) +
               (c.significant ? "*" : "") + "\n";
    }
}

}  // namespace

std::string render_comparison_table(const ComparisonReport& r) {
    std::string out;
    const std::string header = pad("scenario", 10) + pad("measure", 34) + pad(r.reference, 18) +
                               pad(r.treatment, 18) + pad("p(dir)", 9) + pad("OR", 8) + pad("p(2s)", 9) + "\n";
    out += "Attack identification\n" + header;
    render_rows(out, r.identification);
    out += "\nAttack investigation\n" + header;
    render_rows(out, r.investigation);
    out += "\nSubmitted reports per group\n";
    out += "  " + r.reference + ": m=" + fmt("%.2f", r.reference_mean) + ", sd=" + fmt("%.2f", r.reference_sd) + "\n";
    out += "  " + r.treatment + ": m=" + fmt("%.2f", r.treatment_mean) + ", sd=" + fmt("%.2f", r.treatment_sd) + "\n";
    out += "  rank-sum W=" + fmt("%.1f", r.submissions_directional.statistic) +
           " p(dir)=" + fmt("%.4f", r.submissions_directional.p_value) +
           " p(2s)=" + fmt("%.4f", r.submissions_two_sided.p_value) + (r.submissions_significant ? " *" : "") + "\n";
    out += "\n* significant at alpha=" + fmt("%.2f", r.alpha) + " (directional test)\n";
    return out;
}

}  // namespace socbench::stats
