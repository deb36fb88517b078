#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socbench/attack_builder.hpp"
#include "socbench/packet_model.hpp"

namespace socbench {

enum class SessionState { scheduled, running, completed, cancelled, failed };
enum class SinkKind { interface, file, callback };

std::string_view to_string(SessionState state);
std::string_view to_string(SinkKind kind);
SinkKind sink_kind_from_string(std::string_view text);

/// Receives (wall-clock send time, frame bytes). Runs on the session's
/// emitter thread and must not call back into the Injector for the same
/// session.
using FrameCallback =
    std::function<void(std::chrono::system_clock::time_point, std::span<const std::uint8_t>)>;

struct SinkSpec {
    SinkKind kind = SinkKind::file;
    /// Interface name or output path.
    std::string target;
    FrameCallback callback;
};

struct InjectionRequest {
    std::string scenario_id;
    SinkSpec sink;
    /// Absent: start immediately. Must not lie in the past.
    std::optional<std::chrono::system_clock::time_point> scheduled_start;
    /// Pre-merged with the attack by timestamp.
    std::optional<pcap::Capture> background;
    /// Sleep until each packet's deadline. Defaults to false for file sinks
    /// and true otherwise.
    std::optional<bool> paced;
};

struct InjectionSession {
    std::string id;
    std::string scenario_id;
    SinkKind sink = SinkKind::file;
    std::string sink_target;
    SessionState state = SessionState::scheduled;
    std::string scheduled_start;
    std::uint64_t packets_sent = 0;
    std::uint64_t total_packets = 0;
    double progress = 0.0;
    std::vector<std::string> errors;
};

/// Owns one emitter thread per session. All public members are thread-safe.
class Injector {
public:
    Injector();
    ~Injector();
    Injector(const Injector&) = delete;
    Injector& operator=(const Injector&) = delete;

    InjectionSession start_injection(const pcap::Capture& attack, InjectionRequest request);
    InjectionSession start_injection(const AssembledAttack& attack, InjectionRequest request);

    InjectionSession status(const std::string& session_id) const;
    InjectionSession cancel(const std::string& session_id);
    /// Blocks until the session finished or `timeout` elapsed; returns a snapshot.
    InjectionSession wait(const std::string& session_id, std::chrono::milliseconds timeout) const;
    std::vector<InjectionSession> list() const;

    /// Cancels every unfinished session and joins all emitters.
    void shutdown();

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;
    /// `origin_units` is the capture time that maps to the start instant.
    InjectionSession launch(pcap::Capture emission, std::int64_t origin_units, InjectionRequest request);

    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

}  // namespace socbench
