#pragma once

// Minimal Ethernet/ARP/IPv4/TCP/UDP header views over raw frame bytes.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace socbench::pcap::detail {

inline constexpr std::uint16_t kEtherTypeIpv4 = 0x0800;
inline constexpr std::uint16_t kEtherTypeArp = 0x0806;
inline constexpr std::uint16_t kEtherTypeIpv6 = 0x86dd;
inline constexpr std::uint8_t kProtoTcp = 6;
inline constexpr std::uint8_t kProtoUdp = 17;

inline std::uint16_t load16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>((b[off] << 8) | b[off + 1]);
}
inline std::uint32_t load32(std::span<const std::uint8_t> b, std::size_t off) {
    return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
           (std::uint32_t{b[off + 2]} << 8) | b[off + 3];
}
inline void store16(std::span<std::uint8_t> b, std::size_t off, std::uint16_t v) {
    b[off] = static_cast<std::uint8_t>(v >> 8);
    b[off + 1] = static_cast<std::uint8_t>(v);
}
inline void store32(std::span<std::uint8_t> b, std::size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b[off + i] = static_cast<std::uint8_t>(v >> (24 - 8 * i));
}

struct L2 {
    std::uint16_t ethertype;
    std::size_t l3_offset;
};

/// Skips any 802.1Q/802.1ad tags.
inline std::optional<L2> parse_ethernet(std::span<const std::uint8_t> frame) {
    std::size_t off = 12;
    while (true) {
        if (frame.size() < off + 2) return std::nullopt;
        std::uint16_t type = load16(frame, off);
        if (type == 0x8100 || type == 0x88a8 || type == 0x9100) {
            off += 4;
            continue;
        }
        return L2{type, off + 2};
    }
}

struct Ipv4View {
    std::size_t offset;       // start of the IPv4 header in the frame
    std::size_t header_len;   // IHL * 4
    std::size_t total_len;    // from the header
    std::uint8_t protocol;
    bool more_fragments;
    std::uint16_t fragment_offset;

    std::size_t l4_offset() const { return offset + header_len; }
    std::size_t l4_len() const { return total_len - header_len; }
    bool first_fragment() const { return fragment_offset == 0; }
    bool unfragmented() const { return fragment_offset == 0 && !more_fragments; }
};

inline std::optional<Ipv4View> parse_ipv4(std::span<const std::uint8_t> frame, std::size_t off) {
    if (frame.size() < off + 20) return std::nullopt;
    if ((frame[off] >> 4) != 4) return std::nullopt;
    std::size_t ihl = std::size_t{frame[off] & 0x0fu} * 4;
    if (ihl < 20 || frame.size() < off + ihl) return std::nullopt;
    std::size_t total = load16(frame, off + 2);
    if (total < ihl) return std::nullopt;
    std::uint16_t flags_frag = load16(frame, off + 6);
    return Ipv4View{off,
                    ihl,
                    total,
                    frame[off + 9],
                    (flags_frag & 0x2000) != 0,
                    static_cast<std::uint16_t>(flags_frag & 0x1fff)};
}

/// Byte offset of the L4 checksum field relative to the L4 header, or 0 if
/// the protocol carries no pseudo-header checksum we handle.
inline std::size_t l4_checksum_field(std::uint8_t protocol) {
    if (protocol == kProtoTcp) return 16;
    if (protocol == kProtoUdp) return 6;
    return 0;
}
inline std::size_t l4_min_header(std::uint8_t protocol) {
    return protocol == kProtoTcp ? 20 : 8;
}

/// 32-bit accumulator of big-endian 16-bit words; odd trailing byte padded.
inline std::uint32_t sum_words(std::span<const std::uint8_t> bytes, std::uint32_t acc = 0) {
    std::size_t i = 0;
    for (; i + 1 < bytes.size(); i += 2) acc += (std::uint32_t{bytes[i]} << 8) | bytes[i + 1];
    if (i < bytes.size()) acc += std::uint32_t{bytes[i]} << 8;
    return acc;
}

inline std::uint16_t fold(std::uint32_t acc) {
    while (acc >> 16) acc = (acc & 0xffff) + (acc >> 16);
    return static_cast<std::uint16_t>(acc);
}

/// Checksum of an IPv4 header, computed as if the checksum field were zero.
inline std::uint16_t ipv4_header_checksum(std::span<const std::uint8_t> frame, const Ipv4View& ip) {
    auto header = frame.subspan(ip.offset, ip.header_len);
    std::uint32_t acc = sum_words(header.first(10));
    acc = sum_words(header.subspan(12), acc);
    return static_cast<std::uint16_t>(~fold(acc));
}

/// TCP/UDP checksum over pseudo-header + segment, checksum field treated as
/// zero. Requires the whole segment to be present in `frame`.
inline std::uint16_t l4_checksum(std::span<const std::uint8_t> frame, const Ipv4View& ip) {
    std::size_t l4 = ip.l4_offset();
    std::size_t len = ip.l4_len();
    std::size_t field = l4_checksum_field(ip.protocol);
    std::uint32_t acc = sum_words(frame.subspan(ip.offset + 12, 8));
    acc += ip.protocol;
    acc += static_cast<std::uint32_t>(len);
    acc = sum_words(frame.subspan(l4, field), acc);
    acc = sum_words(frame.subspan(l4 + field + 2, len - field - 2), acc);
    auto sum = static_cast<std::uint16_t>(~fold(acc));
    if (ip.protocol == kProtoUdp && sum == 0) sum = 0xffff;
    return sum;
}

/// Whether the full L4 segment including its checksum field is captured.
inline bool l4_complete(std::span<const std::uint8_t> frame, const Ipv4View& ip) {
    std::size_t field = l4_checksum_field(ip.protocol);
    return field != 0 && ip.unfragmented() && ip.l4_len() >= l4_min_header(ip.protocol) &&
           frame.size() >= ip.l4_offset() + ip.l4_len();
}

/// Whether the L4 checksum field itself is captured (first fragment only).
inline bool l4_checksum_present(std::span<const std::uint8_t> frame, const Ipv4View& ip) {
    std::size_t field = l4_checksum_field(ip.protocol);
    return field != 0 && ip.first_fragment() && ip.l4_len() >= l4_min_header(ip.protocol) &&
           frame.size() >= ip.l4_offset() + field + 2;
}

struct ArpView {
    std::size_t sender_ip;  // frame offsets of the protocol addresses
    std::size_t target_ip;
};

inline std::optional<ArpView> parse_arp(std::span<const std::uint8_t> frame, std::size_t off) {
    if (frame.size() < off + 28) return std::nullopt;
    if (load16(frame, off) != 1 || load16(frame, off + 2) != kEtherTypeIpv4 ||
        frame[off + 4] != 6 || frame[off + 5] != 4)
        return std::nullopt;
    return ArpView{off + 14, off + 24};
}

}  // namespace socbench::pcap::detail
