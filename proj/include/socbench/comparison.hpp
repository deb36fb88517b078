#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socbench/report_eval.hpp"
#include "socbench/stats.hpp"

namespace socbench::stats {

/// One row of the condition comparison grid: a yes/no outcome counted in the
/// reference condition (first summary) and the treatment condition (second).
///
/// The directional test is Fisher's one-sided test in the hypothesised
/// direction: the treatment is expected to do better, so for ordinary
/// outcomes the treatment's odds are expected to be higher and for
/// `reference_expected_higher` outcomes (e.g. "reported none") the
/// reference's. `effect_odds_ratio` is the conditional MLE odds ratio
/// oriented the same way (expected-higher row over the other).
struct ProportionComparison {
    std::string scenario;
    std::string measure;
    std::uint64_t reference_yes = 0;
    std::uint64_t reference_total = 0;
    std::uint64_t treatment_yes = 0;
    std::uint64_t treatment_total = 0;
    bool reference_expected_higher = false;
    TestResult directional;
    TestResult two_sided;
    std::optional<double> effect_odds_ratio;
    bool significant = false;
};

ProportionComparison compare_proportions(std::string scenario, std::string measure,
                                         std::uint64_t reference_yes, std::uint64_t reference_total,
                                         std::uint64_t treatment_yes, std::uint64_t treatment_total,
                                         bool reference_expected_higher, double alpha);

struct ComparisonReport {
    std::string reference;
    std::string treatment;
    double alpha = 0.05;
    std::vector<ProportionComparison> identification;
    std::vector<ProportionComparison> investigation;
    /// Rank-sum test of per-group report counts (reference vs treatment).
    TestResult submissions_directional;
    TestResult submissions_two_sided;
    bool submissions_significant = false;
    double reference_mean = 0.0;
    double reference_sd = 0.0;
    double treatment_mean = 0.0;
    double treatment_sd = 0.0;
};

/// Exactly two summaries: reference first, treatment second. Throws ArityMismatch.
ComparisonReport compare_conditions(std::span<const ConditionSummary> summaries, double alpha = 0.05);

/// Plain-text grid, one line per comparison.
std::string render_comparison_table(const ComparisonReport& report);

}  // namespace socbench::stats
