#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socbench/attack_builder.hpp"
#include "socbench/injector.hpp"
#include "socbench/json_codec.hpp"
#include "socbench/report_eval.hpp"
#include "socbench/trace_library.hpp"

namespace socbench {

/// A storage root with its trace library, scenario store and assembled
/// attacks (assemblies/<key>.pcap + assemblies/<key>.truth.json).
class Workspace {
public:
    explicit Workspace(std::filesystem::path root);

    TraceLibrary& library() { return library_; }
    const TraceLibrary& library() const { return library_; }
    ScenarioStore& scenarios() { return scenarios_; }
    const ScenarioStore& scenarios() const { return scenarios_; }

    /// Assembles a stored scenario and keeps the result under `key`
    /// (the scenario id when empty). Returns the key.
    std::string assemble_and_store(std::string_view scenario_id, std::string key = {});
    AssembledAttack load_assembly(std::string_view key) const;
    bool has_assembly(std::string_view key) const;
    std::filesystem::path assembly_capture_path(std::string_view key) const;

    /// A stored assembly's truth, else the truth extracted from a stored scenario.
    GroundTruth resolve_truth(std::string_view ref) const;

    struct PreparedInjection {
        AssembledAttack attack;
        InjectionRequest request;
    };
    /// Decodes {"scenario_id" | "assembly", "sink": {"type", "target"},
    /// "scheduled_start"?, "background_ref"?, "paced"?}. A stored assembly is
    /// preferred; otherwise the scenario is assembled now and its own
    /// background_ref applies unless the request names one.
    PreparedInjection prepare_injection(const Json& request) const;

private:
    std::filesystem::path assembly_dir() const { return library_.root() / "assemblies"; }

    TraceLibrary library_;
    ScenarioStore scenarios_;
};

struct EvaluationOptions {
    std::vector<GroundTruth> truths;
    /// Reference condition first. Empty: order of first appearance.
    std::vector<std::string> conditions;
};

EvaluationOptions evaluation_options_from_json(const Json& j, const Workspace* workspace);

/// parse -> grade -> aggregate. Result keys: reports, cleaning_log, graded,
/// summaries, scores_csv.
Json evaluate_reports(std::string_view csv, const EvaluationOptions& options);

}  // namespace socbench
