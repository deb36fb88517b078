#include <cmath>

#include "doctest.h"
#include "support/expect_error.hpp"
#include "support/fixtures.hpp"
#include "socbench/comparison.hpp"

using namespace socbench;
using namespace socbench::stats;

namespace {

struct Published {
    const char* measure;
    std::uint64_t ref_yes, ref_n, tr_yes, tr_n;
    bool reference_higher;
    double p;
    double odds_ratio;
    double odds_ratio_tolerance = 0.005;
};

// Directional p and odds ratio as published (two decimals unless more were given).
const Published kPublished[] = {
    {"mirai recon", 7, 10, 9, 12, false, 0.58, 1.27},
    {"exim recon", 1, 9, 4, 17, false, 0.42, 2.39},
    {"mirai exploit", 5, 10, 5, 12, false, 0.79, 0.73},
    {"exim exploit", 8, 9, 14, 17, false, 0.84, 0.59},
    {"mirai delivery >=1", 6, 10, 8, 12, false, 0.55, 1.32},
    {"exim delivery >=1", 2, 9, 3, 17, false, 0.79, 0.76},
    {"mirai http requests", 3, 10, 8, 12, false, 0.099, 4.32},
    {"reported mirai", 10, 32, 12, 31, false, 0.36, 1.38},
    // Conditional MLE is 3.0451 (scipy agrees); the published figure looks truncated.
    {"reported exim", 9, 32, 17, 31, false, 0.03, 3.04, 0.01},
    {"reported none", 14, 32, 9, 31, true, 0.17, 1.88},
};

double half_unit(double published) {
    // Half a unit in the last published decimal place.
    return published < 0.1 && published != std::round(published * 100) / 100 ? 0.0005 : 0.005;
}

}  // namespace

TEST_CASE("compare_proportions reproduces the published directional tests") {
    for (const auto& row : kPublished) {
        const std::string measure = row.measure;
        CAPTURE(measure);
        auto c = compare_proportions("s", row.measure, row.ref_yes, row.ref_n, row.tr_yes, row.tr_n,
                                     row.reference_higher, 0.05);
        CHECK(std::abs(c.directional.p_value - row.p) <= half_unit(row.p) + 1e-12);
        REQUIRE(c.effect_odds_ratio);
        CHECK(std::abs(*c.effect_odds_ratio - row.odds_ratio) <= row.odds_ratio_tolerance + 1e-12);
        CHECK(c.significant == (c.directional.p_value < 0.05));
    }
}

TEST_CASE("compare_proportions: 'reported all' row, conditional MLE") {
    // Published 8.49 is not the conditional MLE of this table; see test_stats for the MLE check.
    auto c = compare_proportions("*", "reported all", 1, 32, 7, 31, false, 0.05);
    CHECK(c.directional.p_value == doctest::Approx(0.02).epsilon(0.25));
    CHECK(c.significant);
    REQUIRE(c.effect_odds_ratio);
    CHECK(*c.effect_odds_ratio == doctest::Approx(8.77).epsilon(0.002));
}

TEST_CASE("compare_proportions: orientation") {
    auto forward = compare_proportions("s", "m", 5, 10, 5, 12, false, 0.05);
    auto reverse = compare_proportions("s", "m", 5, 10, 5, 12, true, 0.05);
    CHECK(reverse.directional.p_value == doctest::Approx(0.52).epsilon(0.01));
    CHECK(*reverse.effect_odds_ratio == doctest::Approx(1.0 / *forward.effect_odds_ratio));
    CHECK(forward.two_sided.p_value == reverse.two_sided.p_value);
    CHECK_ERROR_CODE(compare_proportions("s", "m", 11, 10, 0, 1, false, 0.05), ErrorCode::invalid_argument);
}

TEST_CASE("compare_conditions on the study summaries") {
    const auto summaries = fixture::study_summaries();
    auto r = compare_conditions(summaries, 0.05);
    CHECK(r.reference == "BADSOC");
    CHECK(r.treatment == "GOODSOC");
    CHECK(r.reference_mean == doctest::Approx(2.28).epsilon(0.002));
    CHECK(std::abs(r.treatment_mean - 2.9) <= 0.05);
    CHECK(r.submissions_directional.statistic == 358.0);
    CHECK(r.submissions_significant == (r.submissions_directional.p_value < 0.05));

    auto find = [&](const std::vector<ProportionComparison>& rows, const std::string& scenario,
                    const std::string& measure) -> const ProportionComparison& {
        for (const auto& c : rows)
            if (c.scenario == scenario && c.measure == measure) return c;
        FAIL("missing row " << scenario << " / " << measure);
        throw std::logic_error("unreachable");
    };
    const auto& exim = find(r.identification, "exim", "reported");
    CHECK(exim.reference_yes == 9);
    CHECK(exim.treatment_yes == 17);
    CHECK(exim.significant);
    const auto& none = find(r.identification, "*", "reported none");
    CHECK(none.reference_expected_higher);
    CHECK(none.reference_yes == 14);
    const auto& http = find(r.investigation, "mirai", "selected http requests");
    CHECK(http.reference_yes == 3);
    CHECK(http.treatment_yes == 8);
    CHECK(http.directional.p_value == doctest::Approx(0.099).epsilon(0.01));
    CHECK_FALSE(http.significant);

    const auto table = render_comparison_table(r);
    CHECK(table.find("Attack identification") != std::string::npos);
    CHECK(table.find("rank-sum W=358.0") != std::string::npos);
}

TEST_CASE("compare_conditions: identical summaries") {
    auto s = fixture::study_summaries();
    s[1] = s[0];
    s[1].condition = "COPY";
    auto r = compare_conditions(s, 0.05);
    for (const auto* rows : {&r.identification, &r.investigation})
        for (const auto& c : *rows) {
            CAPTURE(c.measure);
            CHECK_FALSE(c.significant);
            if (c.effect_odds_ratio && std::isfinite(*c.effect_odds_ratio) && c.reference_yes > 0 &&
                c.reference_yes < c.reference_total)
                CHECK(*c.effect_odds_ratio == doctest::Approx(1.0).epsilon(1e-6));
        }
    CHECK_FALSE(r.submissions_significant);
    CHECK(r.submissions_two_sided.p_value == doctest::Approx(1.0));
}

TEST_CASE("compare_conditions: arity and alpha") {
    auto s = fixture::study_summaries();
    CHECK_ERROR_CODE(compare_conditions(std::span(s.data(), 1), 0.05), ErrorCode::arity_mismatch);
    s.push_back(s[0]);
    CHECK_ERROR_CODE(compare_conditions(s, 0.05), ErrorCode::arity_mismatch);
    s.pop_back();
    CHECK_ERROR_CODE(compare_conditions(s, 0.0), ErrorCode::invalid_argument);
    CHECK_ERROR_CODE(compare_conditions(s, 1.0), ErrorCode::invalid_argument);
}
