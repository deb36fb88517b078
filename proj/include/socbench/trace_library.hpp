#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socbench/ipv4.hpp"
#include "socbench/packet_model.hpp"
#include "socbench/taxonomy.hpp"

namespace socbench {

/// Expected questionnaire answers. A trace carries at most one recon and one
/// exploit label; ground truths aggregate sets across blocks.
struct ExpectedAnswers {
    std::set<std::string> recon;
    std::set<std::string> exploit;
    std::set<std::string> delivery_control;

    const std::set<std::string>& get(Question q) const;
    std::set<std::string>& get(Question q);
    void merge(const ExpectedAnswers& other);
    bool operator==(const ExpectedAnswers&) const = default;
};

/// Role names are "attacker", "victim", "cnc" or "other:<label>".
using RoleMap = std::map<std::string, Ipv4Address>;

bool is_valid_role_name(std::string_view role);

struct TraceMetadata {
    std::string name;
    AttackPhase phase = AttackPhase::reconnaissance;
    std::string technique;
    RoleMap roles;
    ExpectedAnswers expected_answers;
};

struct AttackTrace {
    std::string id;
    std::string name;
    AttackPhase phase = AttackPhase::reconnaissance;
    std::string technique;
    RoleMap roles;
    ExpectedAnswers expected_answers;
    std::string capture_ref;
    std::uint64_t packet_count = 0;
    double duration_s = 0.0;
    std::string created_at;
    std::string content_sha256;

    bool operator==(const AttackTrace&) const = default;
};

/// On-disk trace library rooted at a directory:
///   traces/<id>.pcap, traces/<id>.json, background/<key>.pcap
/// Scenario documents live next to it in scenarios/<id>.json; the library
/// only reads them to refuse deleting referenced traces.
class TraceLibrary {
public:
    explicit TraceLibrary(std::filesystem::path root);

    struct AddResult {
        AttackTrace trace;
        std::vector<std::string> warnings;
    };

    AddResult add_trace(std::span<const std::uint8_t> capture_bytes, const TraceMetadata& metadata);

    /// Sorted by name (then id). `query` matches name or technique,
    /// case-insensitively; empty matches everything.
    std::vector<AttackTrace> list_traces(std::optional<AttackPhase> phase = std::nullopt,
                                         std::string_view query = {}) const;

    /// Uniform over traces of `phase`; deterministic when seeded.
    AttackTrace pick_random(AttackPhase phase, std::optional<std::uint64_t> seed = std::nullopt) const;

    AttackTrace get_trace(std::string_view id) const;
    bool contains(std::string_view id) const;
    void remove_trace(std::string_view id);

    pcap::Capture load_capture(std::string_view id) const;

    /// Stores a background-traffic capture and returns its key.
    std::string add_background(std::span<const std::uint8_t> capture_bytes);
    pcap::Capture load_background(std::string_view key) const;

    const std::filesystem::path& root() const { return root_; }

    /// Serializes writes across the library and the scenario store.
    std::shared_mutex& storage_mutex() const { return mutex_; }

    std::string new_id(std::string_view prefix) const;

private:
    std::filesystem::path trace_dir() const { return root_ / "traces"; }
    void load_index();
    std::vector<std::string> scenarios_referencing(std::string_view trace_id) const;

    std::filesystem::path root_;
    std::map<std::string, AttackTrace, std::less<>> traces_;
    mutable std::shared_mutex mutex_;
    mutable std::mutex rng_mutex_;
    mutable std::mt19937_64 id_rng_;
};

}  // namespace socbench
