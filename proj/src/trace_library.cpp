#include "socbench/trace_library.hpp"

#include <algorithm>
#include <fstream>

#include "socbench/error.hpp"
#include "socbench/json_codec.hpp"
#include "util.hpp"

namespace fs = std::filesystem;

namespace socbench {

const std::set<std::string>& ExpectedAnswers::get(Question q) const {
    switch (q) {
        case Question::recon: return recon;
        case Question::exploit: return exploit;
        case Question::delivery_control: return delivery_control;
    }
    return recon;
}

std::set<std::string>& ExpectedAnswers::get(Question q) {
    return const_cast<std::set<std::string>&>(std::as_const(*this).get(q));
}

void ExpectedAnswers::merge(const ExpectedAnswers& other) {
    for (Question q : kAllQuestions) get(q).insert(other.get(q).begin(), other.get(q).end());
}

bool is_valid_role_name(std::string_view role) {
    if (role == "attacker" || role == "victim" || role == "cnc") return true;
    constexpr std::string_view other = "other:";
    return role.size() > other.size() && role.substr(0, other.size()) == other;
}

namespace {

// Ids and keys end up in file names.
bool is_safe_key(std::string_view key) {
    if (key.empty() || key.size() > 128) return false;
    return std::all_of(key.begin(), key.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_';
    });
}

void validate_metadata(const TraceMetadata& m) {
    if (m.name.empty()) fail(ErrorCode::schema_violation, "trace name must not be empty");
    if (!m.roles.contains("attacker") && !m.roles.contains("victim"))
        fail(ErrorCode::schema_violation, "roles must name an attacker or a victim");
    for (const auto& [role, _] : m.roles)
        if (!is_valid_role_name(role)) fail(ErrorCode::schema_violation, "invalid role name '" + role + "'");
    if (m.expected_answers.recon.size() > 1 || m.expected_answers.exploit.size() > 1)
        fail(ErrorCode::schema_violation, "a trace carries at most one recon and one exploit answer");
}

pcap::Capture parse_or_malformed(std::span<const std::uint8_t> bytes) {
    try {
        return pcap::read_capture(bytes);
    } catch (const Error& e) {
        fail(ErrorCode::malformed_capture, e.what());
    }
}

}  // namespace

TraceLibrary::TraceLibrary(fs::path root) : root_(std::move(root)), id_rng_(std::random_device{}()) {
    std::error_code ec;
    for (const char* dir : {"traces", "background", "scenarios"}) {
        fs::create_directories(root_ / dir, ec);
        if (ec) fail(ErrorCode::io_error, "cannot create " + (root_ / dir).string() + ": " + ec.message());
    }
    load_index();
}

void TraceLibrary::load_index() {
    for (const auto& entry : fs::directory_iterator(trace_dir())) {
        if (entry.path().extension() != ".json") continue;
        Json doc;
        try {
            doc = Json::parse(util::read_text_file(entry.path()));
        } catch (const Json::exception& e) {
            fail(ErrorCode::schema_violation, entry.path().string() + ": " + e.what());
        }
        AttackTrace trace = trace_from_json(doc);
        traces_.emplace(trace.id, std::move(trace));
    }
}

std::string TraceLibrary::new_id(std::string_view prefix) const {
    static constexpr char hex[] = "0123456789abcdef";
    std::lock_guard lock(rng_mutex_);
    std::string id(prefix);
    id += '-';
    std::uint64_t bits = id_rng_();
    for (int i = 0; i < 12; ++i, bits >>= 4) id += hex[bits & 0xf];
    return id;
}

TraceLibrary::AddResult TraceLibrary::add_trace(std::span<const std::uint8_t> capture_bytes,
                                                const TraceMetadata& metadata) {
    validate_metadata(metadata);
    const pcap::Capture capture = parse_or_malformed(capture_bytes);

    std::set<Ipv4Address> seen;
    for (const auto& p : capture.packets)
        for (auto ip : pcap::frame_addresses(p.data)) seen.insert(ip);
    for (const auto& [role, ip] : metadata.roles)
        if (!seen.contains(ip))
            fail(ErrorCode::role_address_absent,
                 "role " + role + " address " + ip.to_string() + " never appears in the capture");

    AddResult result;
    AttackTrace& t = result.trace;
    t.name = metadata.name;
    t.phase = metadata.phase;
    t.technique = metadata.technique;
    t.roles = metadata.roles;
    t.expected_answers = metadata.expected_answers;
    t.packet_count = capture.packets.size();
    t.duration_s = capture.duration_seconds();
    t.created_at = util::now_iso8601();
    t.content_sha256 = util::sha256_hex(capture_bytes);

    std::unique_lock lock(mutex_);
    do {
        t.id = new_id("tr");
    } while (traces_.contains(t.id));
    t.capture_ref = "traces/" + t.id + ".pcap";

    for (const auto& [id, other] : traces_)
        if (other.content_sha256 == t.content_sha256)
            result.warnings.push_back("duplicate content: same capture bytes as trace " + id);

    util::write_file_atomic(root_ / t.capture_ref, capture_bytes);
    util::write_file_atomic(trace_dir() / (t.id + ".json"), to_json(t).dump(2));
    traces_.emplace(t.id, t);
    return result;
}

std::vector<AttackTrace> TraceLibrary::list_traces(std::optional<AttackPhase> phase,
                                                   std::string_view query) const {
    std::vector<AttackTrace> out;
    {
        std::shared_lock lock(mutex_);
        for (const auto& [_, t] : traces_) {
            if (phase && t.phase != *phase) continue;
            if (!query.empty() && !util::icontains(t.name, query) && !util::icontains(t.technique, query))
                continue;
            out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end(), [](const AttackTrace& a, const AttackTrace& b) {
        return std::tie(a.name, a.id) < std::tie(b.name, b.id);
    });
    return out;
}

AttackTrace TraceLibrary::pick_random(AttackPhase phase, std::optional<std::uint64_t> seed) const {
    auto candidates = list_traces(phase);
    if (candidates.empty())
        fail(ErrorCode::no_trace_for_phase, "no trace of phase " + std::string(to_string(phase)));
    std::mt19937_64 rng(seed ? *seed : std::random_device{}());
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
}

AttackTrace TraceLibrary::get_trace(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = traces_.find(id);
    if (it == traces_.end()) fail(ErrorCode::not_found, "no trace with id '" + std::string(id) + "'");
    return it->second;
}

bool TraceLibrary::contains(std::string_view id) const {
    std::shared_lock lock(mutex_);
    return traces_.find(id) != traces_.end();
}

std::vector<std::string> TraceLibrary::scenarios_referencing(std::string_view trace_id) const {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(root_ / "scenarios")) {
        if (entry.path().extension() != ".json") continue;
        const Json doc = Json::parse(util::read_text_file(entry.path()), nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) continue;
        auto blocks = doc.find("blocks");
        if (blocks == doc.end() || !blocks->is_array()) continue;
        for (const auto& b : *blocks) {
            if (b.is_object() && b.value("trace_id", std::string{}) == trace_id) {
                out.push_back(entry.path().stem().string());
                break;
            }
        }
    }
    return out;
}

void TraceLibrary::remove_trace(std::string_view id) {
    std::unique_lock lock(mutex_);
    auto it = traces_.find(id);
    if (it == traces_.end()) fail(ErrorCode::not_found, "no trace with id '" + std::string(id) + "'");
    if (auto users = scenarios_referencing(id); !users.empty())
        fail(ErrorCode::trace_in_use, "trace " + std::string(id) + " is used by scenario " + users.front());
    std::error_code ec;
    fs::remove(root_ / it->second.capture_ref, ec);
    fs::remove(trace_dir() / (it->first + ".json"), ec);
    traces_.erase(it);
}

pcap::Capture TraceLibrary::load_capture(std::string_view id) const {
    const AttackTrace t = get_trace(id);
    std::shared_lock lock(mutex_);
    return pcap::read_capture_file(root_ / t.capture_ref);
}

std::string TraceLibrary::add_background(std::span<const std::uint8_t> capture_bytes) {
    parse_or_malformed(capture_bytes);
    const std::string key = "bg-" + util::sha256_hex(capture_bytes).substr(0, 16);
    std::unique_lock lock(mutex_);
    const fs::path path = root_ / "background" / (key + ".pcap");
    if (!fs::exists(path)) util::write_file_atomic(path, capture_bytes);
    return key;
}

pcap::Capture TraceLibrary::load_background(std::string_view key) const {
    const fs::path path = root_ / "background" / (std::string(key) + ".pcap");
    std::shared_lock lock(mutex_);
    if (!is_safe_key(key) || !fs::exists(path))
        fail(ErrorCode::not_found, "no background capture '" + std::string(key) + "'");
    return pcap::read_capture_file(path);
}

}  // namespace socbench
