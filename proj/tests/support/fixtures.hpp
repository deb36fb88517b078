#pragma once

// Test fixtures and oracles. Nothing here calls into the library's packet
// code: frames, checksums and pcap bytes are produced independently so the
// tests can compare against them.

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "socbench/attack_builder.hpp"
#include "socbench/packet_model.hpp"
#include "socbench/report_eval.hpp"
#include "socbench/trace_library.hpp"

namespace fixture {

using Bytes = std::vector<std::uint8_t>;

// ---- checksums ------------------------------------------------------------

/// Ones'-complement sum of 16-bit big-endian words, odd byte padded with zero.
std::uint32_t ones_sum(std::span<const std::uint8_t> bytes, std::uint32_t acc = 0);
std::uint16_t fold_complement(std::uint32_t acc);
std::uint16_t internet_checksum(std::span<const std::uint8_t> bytes);

/// True when the frame's IPv4 header and TCP/UDP checksums verify
/// (UDP zero is accepted). Non-IPv4 frames are trivially valid.
bool frame_checksums_valid(std::span<const std::uint8_t> frame);

// ---- frames ----------------------------------------------------------------

std::uint32_t ip(const char* dotted);

struct Ipv4Spec {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint8_t protocol = 6;
    std::uint8_t ttl = 64;
    std::uint16_t id = 1;
    Bytes options;  // multiple of 4 bytes
    std::uint16_t fragment_offset = 0;  // 8-byte units
    bool more_fragments = false;
};

Bytes ethernet(std::uint16_t ethertype, const Bytes& payload, std::uint8_t mac_seed = 1);
/// IPv4 datagram (header + payload) with a valid header checksum.
Bytes ipv4(const Ipv4Spec& spec, const Bytes& l4);
Bytes tcp_segment(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport,
                  std::uint8_t flags, const Bytes& payload, std::uint32_t seq = 1000);
Bytes udp_datagram(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport,
                   const Bytes& payload, bool zero_checksum = false);
Bytes icmp_echo(std::uint16_t ident, std::uint16_t seq, const Bytes& payload);

Bytes tcp_frame(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport,
                std::uint8_t flags = 0x02, const Bytes& payload = {});
Bytes udp_frame(std::uint32_t src, std::uint32_t dst, std::uint16_t sport, std::uint16_t dport,
                const Bytes& payload = {}, bool zero_checksum = false);
Bytes icmp_frame(std::uint32_t src, std::uint32_t dst, std::uint16_t seq = 1);
Bytes arp_frame(std::uint32_t sender, std::uint32_t target);
Bytes ipv6_frame();

/// Offsets (within the frame) of every byte an address rewrite may touch:
/// IPv4 addresses, the IPv4 checksum, the TCP/UDP checksum, ARP protocol
/// addresses. Computed from the frame layout, not by the library.
std::vector<std::size_t> mutable_offsets(std::span<const std::uint8_t> frame);

/// Random TCP, UDP or ICMP over IPv4 with valid checksums, addresses drawn
/// from `pool`, occasionally with IP options or a VLAN tag.
Bytes random_ipv4_frame(std::mt19937_64& rng, std::span<const std::uint32_t> pool);

// ---- pcap bytes --------------------------------------------------------------

struct RecordSpec {
    std::uint32_t ts_sec;
    std::uint32_t ts_frac;
    std::uint32_t original_len;
    Bytes data;
};

struct PcapSpec {
    bool nano = false;
    bool big_endian = false;
    std::uint16_t version_major = 2;
    std::uint16_t version_minor = 4;
    std::int32_t thiszone = 0;
    std::uint32_t sigfigs = 0;
    std::uint32_t snaplen = 65535;
    std::uint32_t link_type = 1;
    std::vector<RecordSpec> records;
};

/// Hand-rolled classic pcap serializer.
Bytes pcap_bytes(const PcapSpec& spec);

/// 100 varied files: both magics, both byte orders, empty files, truncated
/// snaplens, odd header fields, non-Ethernet link types.
std::vector<PcapSpec> pcap_corpus(std::uint64_t seed = 20241);

/// Ethernet capture from frames with the given gaps (microseconds) from
/// `start_sec`.
socbench::pcap::Capture capture_from(const std::vector<Bytes>& frames, std::int64_t gap_us,
                                     std::uint32_t start_sec = 1'700'000'000);

// ---- demo library ---------------------------------------------------------------

/// Raw addresses used inside the demo traces.
inline constexpr const char* kRawAttacker = "10.0.0.1";
inline constexpr const char* kRawVictim = "10.0.0.9";
inline constexpr const char* kRawCnc = "10.0.0.66";

struct DemoTrace {
    std::string file_stem;
    socbench::TraceMetadata metadata;
    Bytes pcap;
};

/// portscan, exploit_cve, http_get, contact_cnc, plus telnet_bruteforce
/// (a weak-credentials exploit for the second scenario).
std::vector<DemoTrace> demo_traces();

/// Four-block scenario over the traces in `ids` (recon, exploit, delivery,
/// control order) with /32 maps from the raw addresses to the given ones.
socbench::AttackScenario demo_scenario(const std::vector<std::string>& ids, const std::string& attacker,
                                       const std::string& victim, const std::string& cnc);

// ---- reports ---------------------------------------------------------------------

/// CSV header in the documented column order.
std::string report_header();

struct ReportRow {
    std::string group_id;
    std::string condition;
    std::string submitted_at;
    std::string incident_index;
    std::string attacker_ips;
    std::string victim_ips;
    std::string recon;
    std::string exploit;
    std::string delivery;
    std::string receiver_ips;
    std::string comments;
};

std::string report_csv(const std::vector<ReportRow>& rows);

/// One incident per truth with the exact expected answers.
std::vector<ReportRow> perfect_rows(const std::string& group, const std::string& condition,
                                    std::span<const socbench::GroundTruth> truths);

/// Synthetic study outcome reproducing the per-group counts behind the
/// condition comparison: report-count histograms, which scenario each group
/// found, and their answers. `mirai` and `exim` supply the IPs.
std::string study_csv(const socbench::GroundTruth& mirai, const socbench::GroundTruth& exim);

/// Per-group report counts from a {count -> groups} histogram.
std::vector<double> histogram_sample(std::initializer_list<std::pair<int, int>> histogram);
std::vector<double> badsoc_counts();
std::vector<double> goodsoc_counts();

/// Summaries matching the study, built by hand (no CSV round trip).
std::vector<socbench::ConditionSummary> study_summaries();

// ---- misc --------------------------------------------------------------------------

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
Bytes read_bytes(const std::filesystem::path& path);

}  // namespace fixture
