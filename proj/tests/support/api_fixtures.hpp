#pragma once

// JSON forms of the demo fixtures, built by hand so the API tests do not
// depend on the library's own codec.

#include <string>
#include <vector>

#include "json.hpp"
#include "support/fixtures.hpp"

namespace fixture {

nlohmann::json metadata_json(const socbench::TraceMetadata& m);

/// Scenario document over `ids` with the demo /32 maps.
nlohmann::json demo_scenario_json(const std::vector<std::string>& ids, const std::string& attacker,
                                  const std::string& victim, const std::string& cnc);

}  // namespace fixture
