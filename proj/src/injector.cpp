#include "socbench/injector.hpp"

#include <algorithm>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <set>
#include <thread>

#include <arpa/inet.h>
#include <linux/if_packet.h>
#include <net/ethernet.h>
#include <net/if.h>
#include <sys/socket.h>
#include <unistd.h>

#include "socbench/error.hpp"
#include "util.hpp"

namespace socbench {

using SteadyClock = std::chrono::steady_clock;
using SystemClock = std::chrono::system_clock;

std::string_view to_string(SessionState state) {
    switch (state) {
        case SessionState::scheduled: return "scheduled";
        case SessionState::running: return "running";
        case SessionState::completed: return "completed";
        case SessionState::cancelled: return "cancelled";
        case SessionState::failed: return "failed";
    }
    return "failed";
}

std::string_view to_string(SinkKind kind) {
    switch (kind) {
        case SinkKind::interface: return "interface";
        case SinkKind::file: return "file";
        case SinkKind::callback: return "callback";
    }
    return "file";
}

SinkKind sink_kind_from_string(std::string_view text) {
    const std::string t = util::to_lower(text);
    if (t == "interface" || t == "iface") return SinkKind::interface;
    if (t == "file") return SinkKind::file;
    if (t == "callback") return SinkKind::callback;
    fail(ErrorCode::invalid_argument, "unknown sink type '" + std::string(text) + "'");
}

namespace {

constexpr auto kLatenessReportThreshold = std::chrono::milliseconds(100);

bool finished(SessionState s) {
    return s == SessionState::completed || s == SessionState::cancelled || s == SessionState::failed;
}

// One live-interface session per interface.
std::mutex g_interface_mutex;
std::set<std::string> g_busy_interfaces;

class RawSocket {
public:
    explicit RawSocket(const std::string& ifname) : ifname_(ifname) {
        const unsigned index = if_nametoindex(ifname.c_str());
        if (index == 0) fail(ErrorCode::sink_unavailable, "no network interface named '" + ifname + "'");
        fd_ = ::socket(AF_PACKET, SOCK_RAW, htons(ETH_P_ALL));
        if (fd_ < 0) {
            const int err = errno;
            if (err == EPERM || err == EACCES)
                fail(ErrorCode::capture_permission_denied,
                     "raw frame injection on " + ifname + " needs CAP_NET_RAW");
            fail(ErrorCode::sink_unavailable, "cannot open raw socket: " + std::string(std::strerror(err)));
        }
        std::memset(&addr_, 0, sizeof addr_);
        addr_.sll_family = AF_PACKET;
        addr_.sll_ifindex = static_cast<int>(index);
        addr_.sll_halen = ETH_ALEN;
        {
            std::lock_guard lock(g_interface_mutex);
            if (!g_busy_interfaces.insert(ifname).second) {
                ::close(fd_);
                fail(ErrorCode::sink_unavailable, "interface " + ifname + " already has an active session");
            }
        }
    }
    ~RawSocket() {
        ::close(fd_);
        std::lock_guard lock(g_interface_mutex);
        g_busy_interfaces.erase(ifname_);
    }
    RawSocket(const RawSocket&) = delete;
    RawSocket& operator=(const RawSocket&) = delete;

    void send(std::span<const std::uint8_t> frame) {
        const ssize_t n = ::sendto(fd_, frame.data(), frame.size(), 0,
                                   reinterpret_cast<const sockaddr*>(&addr_), sizeof addr_);
        if (n < 0) fail(ErrorCode::io_error, "send on " + ifname_ + " failed: " + std::strerror(errno));
    }

private:
    std::string ifname_;
    int fd_ = -1;
    sockaddr_ll addr_{};
};

}  // namespace

struct Injector::Session {
    std::mutex mutex;
    std::condition_variable cv;
    InjectionSession info;
    pcap::Capture capture;
    std::int64_t origin_units = 0;
    bool paced = true;
    bool cancelled = false;
    std::optional<SystemClock::time_point> start_at;

    FrameCallback callback;
    std::ofstream file;
    std::unique_ptr<RawSocket> raw;

    std::thread emitter;

    InjectionSession snapshot() const {
        InjectionSession s = info;
        if (s.total_packets > 0)
            s.progress = static_cast<double>(s.packets_sent) / static_cast<double>(s.total_packets);
        else
            s.progress = s.state == SessionState::completed ? 1.0 : 0.0;
        return s;
    }

    void emit(const pcap::PacketRecord& p) {
        switch (info.sink) {
            case SinkKind::callback: callback(SystemClock::now(), p.data); break;
            case SinkKind::file: {
                std::vector<std::uint8_t> bytes;
                pcap::append_record(bytes, capture, p);
                file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
                if (!file) fail(ErrorCode::io_error, "write to " + info.sink_target + " failed");
                break;
            }
            case SinkKind::interface: raw->send(p.data); break;
        }
    }

    void run() {
        std::unique_lock lock(mutex);
        if (start_at) {
            const auto deadline = SteadyClock::now() + (*start_at - SystemClock::now());
            cv.wait_until(lock, deadline, [&] { return cancelled; });
        }
        if (cancelled) {
            raw.reset();
            return;
        }
        info.state = SessionState::running;
        cv.notify_all();

        const auto anchor = SteadyClock::now();
        const std::int64_t ups = capture.units_per_second();
        SteadyClock::duration lateness{};
        bool lateness_reported = false;
        try {
            if (info.sink == SinkKind::file) {
                const auto header = pcap::encode_file_header(capture);
                file.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
            }
            for (const auto& p : capture.packets) {
                if (paced) {
                    const std::int64_t units = capture.timestamp_units(p) - origin_units;
                    const auto offset = std::chrono::nanoseconds(units * (1'000'000'000 / ups));
                    const auto deadline = anchor + std::max(offset, std::chrono::nanoseconds::zero());
                    cv.wait_until(lock, deadline, [&] { return cancelled; });
                    if (cancelled) break;
                    const auto late = SteadyClock::now() - deadline;
                    if (late > SteadyClock::duration::zero()) lateness += late;
                    if (!lateness_reported && lateness > kLatenessReportThreshold) {
                        lateness_reported = true;
                        info.errors.push_back("emitter fell behind schedule: cumulative lateness exceeded 100 ms");
                    }
                } else if (cancelled) {
                    break;
                }
                emit(p);
                ++info.packets_sent;
            }
            if (file.is_open()) file.close();
            if (!cancelled) info.state = SessionState::completed;
        } catch (const std::exception& e) {
            info.errors.push_back(e.what());
            info.state = SessionState::failed;
        }
        if (lateness_reported) {
            const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(lateness).count();
            info.errors.push_back("total lateness " + std::to_string(ms) + " ms");
        }
        raw.reset();
        cv.notify_all();
    }
};

Injector::Injector() = default;

Injector::~Injector() { shutdown(); }

std::shared_ptr<Injector::Session> Injector::find(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) fail(ErrorCode::not_found, "no injection session '" + id + "'");
    return it->second;
}

InjectionSession Injector::start_injection(const pcap::Capture& attack, InjectionRequest request) {
    const std::int64_t origin = attack.packets.empty() ? 0 : attack.timestamp_units(attack.packets.front());
    if (request.background && !attack.packets.empty()) {
        // Both streams start at the same instant.
        const pcap::Capture rebased = pcap::transform_time(attack, 0.0, 1.0);
        return launch(rebased, 0, std::move(request));
    }
    return launch(attack, origin, std::move(request));
}

InjectionSession Injector::start_injection(const AssembledAttack& attack, InjectionRequest request) {
    if (request.scenario_id.empty()) request.scenario_id = attack.ground_truth.scenario_id;
    // Assembled timestamps are already relative to scenario start.
    return launch(attack.capture, 0, std::move(request));
}

InjectionSession Injector::launch(pcap::Capture emission, std::int64_t origin_units, InjectionRequest request) {
    const auto now = SystemClock::now();
    if (request.scheduled_start && *request.scheduled_start < now)
        fail(ErrorCode::past_schedule, "scheduled start " + util::format_iso8601(*request.scheduled_start) +
                                           " lies in the past");

    if (request.background && !request.background->packets.empty()) {
        const pcap::Capture bg = pcap::transform_time(*request.background, 0.0, 1.0);
        std::vector<pcap::Capture> parts{std::move(emission), bg};
        emission = pcap::merge(parts);
    }

    auto s = std::make_shared<Session>();
    s->info.scenario_id = request.scenario_id;
    s->info.sink = request.sink.kind;
    s->info.sink_target = request.sink.target;
    s->info.total_packets = emission.packets.size();
    s->info.scheduled_start = util::format_iso8601(request.scheduled_start.value_or(now));
    s->start_at = request.scheduled_start;
    s->paced = request.paced.value_or(request.sink.kind != SinkKind::file);
    s->capture = std::move(emission);
    s->origin_units = origin_units;

    switch (request.sink.kind) {
        case SinkKind::callback:
            if (!request.sink.callback) fail(ErrorCode::sink_unavailable, "callback sink without a callback");
            s->callback = std::move(request.sink.callback);
            if (s->info.sink_target.empty()) s->info.sink_target = "callback";
            break;
        case SinkKind::file:
            if (request.sink.target.empty()) fail(ErrorCode::sink_unavailable, "file sink needs a path");
            s->file.open(request.sink.target, std::ios::binary | std::ios::trunc);
            if (!s->file) fail(ErrorCode::sink_unavailable, "cannot open " + request.sink.target + " for writing");
            break;
        case SinkKind::interface:
            if (request.sink.target.empty()) fail(ErrorCode::sink_unavailable, "interface sink needs a name");
            s->raw = std::make_unique<RawSocket>(request.sink.target);
            break;
    }

    std::vector<std::shared_ptr<Session>> finished_sessions;
    {
        std::lock_guard lock(registry_mutex_);
        s->info.id = "inj-" + std::to_string(next_id_++);
        sessions_.emplace(s->info.id, s);
        for (auto& [_, other] : sessions_) {
            std::lock_guard session_lock(other->mutex);
            if (other != s && finished(other->info.state) && other->emitter.joinable())
                finished_sessions.push_back(other);
        }
    }
    for (auto& other : finished_sessions)
        if (other->emitter.joinable()) other->emitter.join();

    InjectionSession snapshot;
    {
        std::lock_guard lock(s->mutex);
        snapshot = s->snapshot();
        s->emitter = std::thread([s] { s->run(); });
    }
    return snapshot;
}

InjectionSession Injector::status(const std::string& session_id) const {
    auto s = find(session_id);
    std::lock_guard lock(s->mutex);
    return s->snapshot();
}

InjectionSession Injector::cancel(const std::string& session_id) {
    auto s = find(session_id);
    std::lock_guard lock(s->mutex);
    if (finished(s->info.state))
        fail(ErrorCode::already_finished,
             "session " + session_id + " already " + std::string(to_string(s->info.state)));
    s->cancelled = true;
    s->info.state = SessionState::cancelled;
    s->cv.notify_all();
    return s->snapshot();
}

InjectionSession Injector::wait(const std::string& session_id, std::chrono::milliseconds timeout) const {
    auto s = find(session_id);
    std::unique_lock lock(s->mutex);
    s->cv.wait_for(lock, timeout, [&] { return finished(s->info.state); });
    return s->snapshot();
}

std::vector<InjectionSession> Injector::list() const {
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(registry_mutex_);
        for (const auto& [_, s] : sessions_) all.push_back(s);
    }
    std::vector<InjectionSession> out;
    for (const auto& s : all) {
        std::lock_guard lock(s->mutex);
        out.push_back(s->snapshot());
    }
    return out;
}

void Injector::shutdown() {
    std::vector<std::shared_ptr<Session>> all;
    {
        std::lock_guard lock(registry_mutex_);
        for (const auto& [_, s] : sessions_) all.push_back(s);
    }
    for (const auto& s : all) {
        {
            std::lock_guard lock(s->mutex);
            if (!finished(s->info.state)) {
                s->cancelled = true;
                s->info.state = SessionState::cancelled;
            }
            s->cv.notify_all();
        }
        if (s->emitter.joinable()) s->emitter.join();
    }
}

}  // namespace socbench
