#include "doctest.h"
#include "support/expect_error.hpp"
#include "support/fixtures.hpp"
#include "support/schema_check.hpp"
#include "socbench/json_codec.hpp"

using namespace socbench;

namespace {

const fixture::SchemaSet& schemas() {
    static const fixture::SchemaSet set(SOCBENCH_SCHEMA_DIR);
    return set;
}

void conforms(const std::string& schema, const Json& doc) {
    for (const auto& e : schemas().validate(schema, doc)) FAIL_CHECK(schema << ": " << e);
}

}  // namespace

TEST_CASE("trace JSON round trip") {
    TraceLibrary lib(fixture::temp_dir("codec"));
    const auto demo = fixture::demo_traces()[3];
    const auto t = lib.add_trace(demo.pcap, demo.metadata).trace;
    const Json j = to_json(t);
    conforms("trace.json", j);
    CHECK(trace_from_json(j) == t);
    CHECK(j["roles"]["cnc"] == fixture::kRawCnc);
}

TEST_CASE("scenario JSON round trip") {
    auto s = fixture::demo_scenario({"a", "b", "c", "d"}, "198.51.100.7", "10.20.0.5", "203.0.113.66");
    s.id = "demo";
    s.background_ref = "bg";
    s.notes = "n";
    const Json j = to_json(s);
    conforms("scenario.json", j);
    CHECK(scenario_from_json(j) == s);

    Json bad = j;
    bad["blocks"][0]["address_map"][0]["to"] = "10.0.0.0/8";
    CHECK_ERROR_CODE(scenario_from_json(bad), ErrorCode::schema_violation);
    bad = j;
    bad["blocks"][0].erase("trace_id");
    CHECK_ERROR_CODE(scenario_from_json(bad), ErrorCode::schema_violation);
}

TEST_CASE("ground truth and summary round trips") {
    GroundTruth t;
    t.scenario_id = "mirai";
    t.attacker_ips = {Ipv4Address::from_string("198.51.100.7")};
    t.victim_ips = {Ipv4Address::from_string("10.20.0.5"), Ipv4Address::from_string("10.20.0.6")};
    t.other_roles["cnc"] = {Ipv4Address::from_string("203.0.113.66")};
    t.expected.recon = {"port scan"};
    t.expected.delivery_control = {"data exfiltration", "http requests"};
    t.timeline.push_back({AttackPhase::delivery, "http_get", "tr-1", 2, 60.0, 61.5});
    const Json j = to_json(t);
    conforms("ground_truth.json", j);
    CHECK(ground_truth_from_json(j) == t);

    for (const auto& s : fixture::study_summaries()) {
        const Json sj = to_json(s);
        conforms("condition_summary.json", sj);
        CHECK(condition_summary_from_json(sj) == s);
    }
}

TEST_CASE("odds ratio encoding") {
    CHECK(odds_ratio_json(std::nullopt).is_null());
    CHECK(odds_ratio_json(std::numeric_limits<double>::infinity()) == "Infinity");
    CHECK(odds_ratio_json(2.5) == 2.5);
}
