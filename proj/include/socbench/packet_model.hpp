#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socbench/ipv4.hpp"

/// Classic pcap captures and the transformations the attack assembler needs.
namespace socbench::pcap {

inline constexpr std::uint32_t kMagicMicro = 0xa1b2c3d4;
inline constexpr std::uint32_t kMagicNano = 0xa1b23c4d;
inline constexpr std::uint32_t kLinkTypeEthernet = 1;
inline constexpr std::size_t kFileHeaderSize = 24;
inline constexpr std::size_t kRecordHeaderSize = 16;

enum class TsResolution { micro, nano };
enum class ByteOrder { little, big };

ByteOrder native_byte_order() noexcept;

struct PacketRecord {
    std::uint32_t ts_sec = 0;
    /// Microseconds or nanoseconds depending on the owning capture.
    std::uint32_t ts_frac = 0;
    std::uint32_t original_len = 0;
    std::vector<std::uint8_t> data;

    std::uint32_t captured_len() const { return static_cast<std::uint32_t>(data.size()); }
    bool operator==(const PacketRecord&) const = default;
};

/// Global-header fields that carry no meaning for us but must survive a
/// read/write round trip untouched.
struct FileHeader {
    std::uint16_t version_major = 2;
    std::uint16_t version_minor = 4;
    std::int32_t thiszone = 0;
    std::uint32_t sigfigs = 0;
    std::uint32_t snaplen = 262144;
    ByteOrder byte_order = native_byte_order();

    bool operator==(const FileHeader&) const = default;
};

struct Capture {
    std::uint32_t link_type = kLinkTypeEthernet;
    TsResolution ts_resolution = TsResolution::micro;
    FileHeader header;
    std::vector<PacketRecord> packets;
    /// True iff packet timestamps are nondecreasing in list order. Kept up to
    /// date by every operation in this namespace; call refresh_monotonic()
    /// after editing `packets` by hand.
    bool monotonic = true;

    /// Non-Ethernet captures load fine but refuse address rewriting.
    bool read_only() const { return (link_type & 0x0fffffffu) != kLinkTypeEthernet; }

    std::int64_t units_per_second() const {
        return ts_resolution == TsResolution::nano ? 1'000'000'000 : 1'000'000;
    }
    std::int64_t timestamp_units(const PacketRecord& p) const {
        return static_cast<std::int64_t>(p.ts_sec) * units_per_second() + p.ts_frac;
    }
    /// Last minus first timestamp, in seconds; zero for fewer than two packets.
    double duration_seconds() const;

    void refresh_monotonic();

    bool operator==(const Capture&) const = default;
};

Capture read_capture(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> write_capture(const Capture& capture);

Capture read_capture_file(const std::filesystem::path& path);
void write_capture_file(const Capture& capture, const std::filesystem::path& path);

/// Serialized global header / record header, used by streaming writers.
std::vector<std::uint8_t> encode_file_header(const Capture& capture);
void append_record(std::vector<std::uint8_t>& out, const Capture& capture,
                   const PacketRecord& packet);

struct AddressMapping {
    Ipv4Prefix from;
    Ipv4Prefix to;
    bool operator==(const AddressMapping&) const = default;
};

/// Prefix-preserving address translation table.
class AddressMap {
public:
    AddressMap() = default;
    /// Throws InvalidArgument on unequal prefix lengths, OverlappingMap when
    /// two source prefixes share an address.
    explicit AddressMap(std::vector<AddressMapping> entries);

    const std::vector<AddressMapping>& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }

    struct Hit {
        std::size_t entry;
        Ipv4Address address;
    };
    std::optional<Hit> translate(Ipv4Address addr) const;
    /// Translated address, or `addr` when no entry matches.
    Ipv4Address apply(Ipv4Address addr) const;

    /// Swaps from/to of every entry. Only a valid map when targets are disjoint.
    AddressMap inverse() const;

    bool operator==(const AddressMap&) const = default;

private:
    std::vector<AddressMapping> entries_;
};

struct RewriteSummary {
    std::vector<std::size_t> packets_per_entry;
    std::size_t packets_rewritten = 0;
    std::size_t ipv6_passthrough = 0;
    /// L4 checksums patched with an incremental update because the segment
    /// was truncated by the snaplen or belongs to a fragmented datagram.
    std::size_t incremental_l4_updates = 0;
};

struct RewriteResult {
    Capture capture;
    RewriteSummary summary;
};

RewriteResult rewrite_addresses(const Capture& capture, const AddressMap& map);

/// Re-times a capture relative to scenario start: t' = offset + (t - t0) / speed.
Capture transform_time(const Capture& capture, double offset_seconds, double speed);

struct PacketOrigin {
    std::uint32_t input;
    std::uint32_t index;
    bool operator==(const PacketOrigin&) const = default;
};

struct MergeResult {
    Capture capture;
    std::vector<PacketOrigin> origins;
};

MergeResult merge_with_origins(std::span<const Capture> captures);
Capture merge(std::span<const Capture> captures);

struct ChecksumViolation {
    std::size_t packet_index;
    std::string layer;  // "ipv4", "tcp" or "udp"
    std::uint16_t expected;
    std::uint16_t found;
};

std::vector<ChecksumViolation> verify_checksums(const Capture& capture);

/// IPv4 addresses a frame carries in its network header (IPv4 src/dst or
/// ARP sender/target protocol address). Empty for anything else.
std::vector<Ipv4Address> frame_addresses(std::span<const std::uint8_t> frame);

}  // namespace socbench::pcap
