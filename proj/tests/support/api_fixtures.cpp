#include "support/api_fixtures.hpp"

namespace fixture {

namespace {

const char* phase_name(socbench::AttackPhase p) {
    switch (p) {
        case socbench::AttackPhase::reconnaissance: return "reconnaissance";
        case socbench::AttackPhase::exploitation: return "exploitation";
        case socbench::AttackPhase::delivery: return "delivery";
        case socbench::AttackPhase::control: return "control";
    }
    return "reconnaissance";
}

}  // namespace

nlohmann::json metadata_json(const socbench::TraceMetadata& m) {
    nlohmann::json roles = nlohmann::json::object();
    for (const auto& [role, addr] : m.roles) roles[role] = addr.to_string();
    nlohmann::json answers = nlohmann::json::object();
    if (!m.expected_answers.recon.empty()) answers["recon"] = *m.expected_answers.recon.begin();
    if (!m.expected_answers.exploit.empty()) answers["exploit"] = *m.expected_answers.exploit.begin();
    answers["delivery_control"] = m.expected_answers.delivery_control;
    return {{"name", m.name},
            {"phase", phase_name(m.phase)},
            {"technique", m.technique},
            {"roles", roles},
            {"expected_answers", answers}};
}

nlohmann::json demo_scenario_json(const std::vector<std::string>& ids, const std::string& attacker,
                                  const std::string& victim, const std::string& cnc) {
    const nlohmann::json map = nlohmann::json::array({{{"from", std::string(kRawAttacker) + "/32"}, {"to", attacker + "/32"}},
                                                      {{"from", std::string(kRawVictim) + "/32"}, {"to", victim + "/32"}},
                                                      {{"from", std::string(kRawCnc) + "/32"}, {"to", cnc + "/32"}}});
    nlohmann::json blocks = nlohmann::json::array();
    for (std::size_t i = 0; i < ids.size(); ++i)
        blocks.push_back({{"trace_id", ids[i]}, {"offset_s", 30.0 * static_cast<double>(i % 4)}, {"speed", 1.0},
                          {"address_map", map}});
    return {{"name", "four-phase demo"}, {"blocks", blocks}};
}

}  // namespace fixture
