#include "socbench/packet_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numeric>

#include "frame.hpp"
#include "socbench/error.hpp"

namespace socbench::pcap {

namespace {

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, ByteOrder order) : bytes_(bytes), order_(order) {}

    std::uint32_t u32(std::size_t off) const {
        const auto* p = bytes_.data() + off;
        if (order_ == ByteOrder::little)
            return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
                   (std::uint32_t{p[3]} << 24);
        return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
               (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
    }
    std::uint16_t u16(std::size_t off) const {
        const auto* p = bytes_.data() + off;
        if (order_ == ByteOrder::little) return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        return static_cast<std::uint16_t>((p[0] << 8) | p[1]);
    }

private:
    std::span<const std::uint8_t> bytes_;
    ByteOrder order_;
};

void put32(std::vector<std::uint8_t>& out, std::uint32_t v, ByteOrder order) {
    if (order == ByteOrder::little) {
        for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    } else {
        for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void put16(std::vector<std::uint8_t>& out, std::uint16_t v, ByteOrder order) {
    if (order == ByteOrder::little) {
        out.push_back(static_cast<std::uint8_t>(v));
        out.push_back(static_cast<std::uint8_t>(v >> 8));
    } else {
        out.push_back(static_cast<std::uint8_t>(v >> 8));
        out.push_back(static_cast<std::uint8_t>(v));
    }
}

bool compute_monotonic(const Capture& c) {
    for (std::size_t i = 1; i < c.packets.size(); ++i)
        if (c.timestamp_units(c.packets[i]) < c.timestamp_units(c.packets[i - 1])) return false;
    return true;
}

}  // namespace

ByteOrder native_byte_order() noexcept {
    return std::endian::native == std::endian::big ? ByteOrder::big : ByteOrder::little;
}

double Capture::duration_seconds() const {
    if (packets.size() < 2) return 0.0;
    auto span = timestamp_units(packets.back()) - timestamp_units(packets.front());
    return static_cast<double>(span) / static_cast<double>(units_per_second());
}

void Capture::refresh_monotonic() { monotonic = compute_monotonic(*this); }

Capture read_capture(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kFileHeaderSize)
        fail(ErrorCode::malformed_header, "file shorter than the 24-byte pcap header");

    Capture capture;
    std::uint32_t magic_le = Reader(bytes, ByteOrder::little).u32(0);
    std::uint32_t magic_be = Reader(bytes, ByteOrder::big).u32(0);
    ByteOrder order;
    std::uint32_t magic;
    if (magic_le == kMagicMicro || magic_le == kMagicNano) {
        order = ByteOrder::little;
        magic = magic_le;
    } else if (magic_be == kMagicMicro || magic_be == kMagicNano) {
        order = ByteOrder::big;
        magic = magic_be;
    } else {
        fail(ErrorCode::malformed_header, "unrecognized pcap magic number");
    }
    capture.ts_resolution = magic == kMagicNano ? TsResolution::nano : TsResolution::micro;

    Reader r(bytes, order);
    capture.header.byte_order = order;
    capture.header.version_major = r.u16(4);
    capture.header.version_minor = r.u16(6);
    if (capture.header.version_major != 2 || capture.header.version_minor != 4)
        fail(ErrorCode::malformed_header,
             "unsupported pcap version " + std::to_string(capture.header.version_major) + "." +
                 std::to_string(capture.header.version_minor));
    capture.header.thiszone = static_cast<std::int32_t>(r.u32(8));
    capture.header.sigfigs = r.u32(12);
    capture.header.snaplen = r.u32(16);
    capture.link_type = r.u32(20);

    const auto frac_limit = static_cast<std::uint32_t>(capture.units_per_second());
    std::size_t off = kFileHeaderSize;
    while (off < bytes.size()) {
        const std::size_t index = capture.packets.size();
        if (bytes.size() - off < kRecordHeaderSize)
            fail(ErrorCode::truncated_packet,
                 "record " + std::to_string(index) + ": header cut short at offset " +
                     std::to_string(off));
        PacketRecord p;
        p.ts_sec = r.u32(off);
        p.ts_frac = r.u32(off + 4);
        std::uint32_t incl = r.u32(off + 8);
        p.original_len = r.u32(off + 12);
        off += kRecordHeaderSize;
        if (bytes.size() - off < incl)
            fail(ErrorCode::truncated_packet,
                 "record " + std::to_string(index) + ": declares " + std::to_string(incl) +
                     " bytes, " + std::to_string(bytes.size() - off) + " remain");
        if (incl > p.original_len)
            fail(ErrorCode::malformed_record,
                 "record " + std::to_string(index) + ": captured length exceeds original length");
        if (p.ts_frac >= frac_limit)
            fail(ErrorCode::malformed_record,
                 "record " + std::to_string(index) + ": sub-second field out of range");
        p.data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(off),
                      bytes.begin() + static_cast<std::ptrdiff_t>(off + incl));
        off += incl;
        capture.packets.push_back(std::move(p));
    }
    capture.refresh_monotonic();
    return capture;
}

std::vector<std::uint8_t> encode_file_header(const Capture& capture) {
    std::vector<std::uint8_t> out;
    out.reserve(kFileHeaderSize);
    const auto order = capture.header.byte_order;
    put32(out, capture.ts_resolution == TsResolution::nano ? kMagicNano : kMagicMicro, order);
    put16(out, capture.header.version_major, order);
    put16(out, capture.header.version_minor, order);
    put32(out, static_cast<std::uint32_t>(capture.header.thiszone), order);
    put32(out, capture.header.sigfigs, order);
    put32(out, capture.header.snaplen, order);
    put32(out, capture.link_type, order);
    return out;
}

void append_record(std::vector<std::uint8_t>& out, const Capture& capture,
                   const PacketRecord& packet) {
    const auto order = capture.header.byte_order;
    put32(out, packet.ts_sec, order);
    put32(out, packet.ts_frac, order);
    put32(out, packet.captured_len(), order);
    put32(out, packet.original_len, order);
    out.insert(out.end(), packet.data.begin(), packet.data.end());
}

std::vector<std::uint8_t> write_capture(const Capture& capture) {
    auto out = encode_file_header(capture);
    std::size_t total = out.size();
    for (const auto& p : capture.packets) total += kRecordHeaderSize + p.data.size();
    out.reserve(total);
    for (const auto& p : capture.packets) append_record(out, capture, p);
    return out;
}

Capture read_capture_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io_error, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return read_capture(bytes);
}

void write_capture_file(const Capture& capture, const std::filesystem::path& path) {
    auto bytes = write_capture(capture);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::io_error, "cannot create " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) fail(ErrorCode::io_error, "write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Address maps

AddressMap::AddressMap(std::vector<AddressMapping> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.from.length() != e.to.length())
            fail(ErrorCode::invalid_argument, "mapping " + e.from.to_string() + " -> " +
                                                  e.to.to_string() +
                                                  " changes the prefix length");
        for (std::size_t j = 0; j < i; ++j)
            if (entries_[j].from.overlaps(e.from))
                fail(ErrorCode::overlapping_map, "source prefixes " + entries_[j].from.to_string() +
                                                     " and " + e.from.to_string() + " overlap");
    }
}

std::optional<AddressMap::Hit> AddressMap::translate(Ipv4Address addr) const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.from.contains(addr)) {
            const std::uint32_t host = addr.value() & ~e.from.mask();
            return Hit{i, Ipv4Address(e.to.network().value() | host)};
        }
    }
    return std::nullopt;
}

Ipv4Address AddressMap::apply(Ipv4Address addr) const {
    auto hit = translate(addr);
    return hit ? hit->address : addr;
}

AddressMap AddressMap::inverse() const {
    std::vector<AddressMapping> swapped;
    swapped.reserve(entries_.size());
    for (const auto& e : entries_) swapped.push_back({e.to, e.from});
    return AddressMap(std::move(swapped));
}

// ---------------------------------------------------------------------------
// Rewriting

namespace {

using namespace detail;

// RFC 1624 eqn. 3: HC' = ~(~HC + ~m + m')
std::uint16_t incremental_update(std::uint16_t checksum, std::uint32_t old_value,
                                 std::uint32_t new_value) {
    std::uint32_t acc = static_cast<std::uint16_t>(~checksum);
    acc += static_cast<std::uint16_t>(~(old_value >> 16)) + static_cast<std::uint16_t>(~old_value);
    acc += (new_value >> 16) + (new_value & 0xffff);
    return static_cast<std::uint16_t>(~fold(acc));
}

}  // namespace

RewriteResult rewrite_addresses(const Capture& capture, const AddressMap& map) {
    if (capture.read_only())
        fail(ErrorCode::read_only_capture,
             "link type " + std::to_string(capture.link_type) + " cannot be rewritten");

    RewriteResult result{capture, {}};
    result.summary.packets_per_entry.assign(map.entries().size(), 0);
    if (map.empty()) return result;

    std::vector<bool> entry_hit(map.entries().size());
    for (auto& packet : result.capture.packets) {
        std::span<std::uint8_t> frame(packet.data);
        auto l2 = parse_ethernet(frame);
        if (!l2) continue;
        std::fill(entry_hit.begin(), entry_hit.end(), false);
        bool touched = false;

        auto rewrite_at = [&](std::size_t off) -> std::pair<std::uint32_t, std::uint32_t> {
            const std::uint32_t old_value = load32(frame, off);
            auto hit = map.translate(Ipv4Address(old_value));
            if (!hit) return {old_value, old_value};
            entry_hit[hit->entry] = true;
            touched = true;
            store32(frame, off, hit->address.value());
            return {old_value, hit->address.value()};
        };

        if (l2->ethertype == kEtherTypeIpv4) {
            auto ip = parse_ipv4(frame, l2->l3_offset);
            if (!ip) continue;
            // Decide how the L4 checksum can be repaired before touching bytes.
            const bool full_l4 = l4_complete(frame, *ip);
            const bool patch_l4 = !full_l4 && l4_checksum_present(frame, *ip);
            const std::size_t l4_field = ip->l4_offset() + l4_checksum_field(ip->protocol);

            auto [src_old, src_new] = rewrite_at(ip->offset + 12);
            auto [dst_old, dst_new] = rewrite_at(ip->offset + 16);
            if (!touched) continue;

            store16(frame, ip->offset + 10, ipv4_header_checksum(frame, *ip));
            const bool udp_disabled = ip->protocol == kProtoUdp && (full_l4 || patch_l4) &&
                                      load16(frame, l4_field) == 0;
            if (udp_disabled) {
                // checksum 0 means "not computed"; leave it that way
            } else if (full_l4) {
                store16(frame, l4_field, l4_checksum(frame, *ip));
            } else if (patch_l4) {
                auto sum = load16(frame, l4_field);
                sum = incremental_update(sum, src_old, src_new);
                sum = incremental_update(sum, dst_old, dst_new);
                if (ip->protocol == kProtoUdp && sum == 0) sum = 0xffff;
                store16(frame, l4_field, sum);
                ++result.summary.incremental_l4_updates;
            }
        } else if (l2->ethertype == kEtherTypeArp) {
            auto arp = parse_arp(frame, l2->l3_offset);
            if (!arp) continue;
            rewrite_at(arp->sender_ip);
            rewrite_at(arp->target_ip);
        } else if (l2->ethertype == kEtherTypeIpv6) {
            ++result.summary.ipv6_passthrough;
        }

        if (touched) {
            ++result.summary.packets_rewritten;
            for (std::size_t i = 0; i < entry_hit.size(); ++i)
                if (entry_hit[i]) ++result.summary.packets_per_entry[i];
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Time transformation and merging

Capture transform_time(const Capture& capture, double offset_seconds, double speed) {
    if (capture.packets.empty()) fail(ErrorCode::empty_capture, "cannot re-time an empty capture");
    if (!(speed > 0.0) || !std::isfinite(speed))
        fail(ErrorCode::non_positive_speed, "speed must be a positive finite number");
    if (!(offset_seconds >= 0.0) || !std::isfinite(offset_seconds))
        fail(ErrorCode::invalid_argument, "offset must be a non-negative finite number");

    Capture out = capture;
    const std::int64_t ups = capture.units_per_second();
    const std::int64_t t0 = capture.timestamp_units(capture.packets.front());
    const long double base = static_cast<long double>(offset_seconds) * ups;
    for (auto& p : out.packets) {
        const std::int64_t delta = capture.timestamp_units(p) - t0;
        // round half up to the capture's resolution
        const long double exact = base + static_cast<long double>(delta) / speed;
        const long double rounded = std::floor(exact + 0.5L);
        if (rounded < 0)
            fail(ErrorCode::invalid_argument, "packet would be placed before scenario start");
        if (rounded >= static_cast<long double>(ups) * 4294967296.0L)
            fail(ErrorCode::invalid_argument, "timestamp overflows the pcap seconds field");
        const auto units = static_cast<std::int64_t>(rounded);
        p.ts_sec = static_cast<std::uint32_t>(units / ups);
        p.ts_frac = static_cast<std::uint32_t>(units % ups);
    }
    out.refresh_monotonic();
    return out;
}

MergeResult merge_with_origins(std::span<const Capture> captures) {
    if (captures.empty()) fail(ErrorCode::invalid_argument, "nothing to merge");

    MergeResult result;
    Capture& out = result.capture;
    out.link_type = captures.front().link_type;
    out.header = captures.front().header;
    out.header.byte_order = native_byte_order();
    out.ts_resolution = TsResolution::micro;
    std::size_t total = 0;
    for (const auto& c : captures) {
        if (c.link_type != out.link_type)
            fail(ErrorCode::mixed_link_type, "cannot merge link types " +
                                                 std::to_string(out.link_type) + " and " +
                                                 std::to_string(c.link_type));
        if (c.ts_resolution == TsResolution::nano) out.ts_resolution = TsResolution::nano;
        out.header.snaplen = std::max(out.header.snaplen, c.header.snaplen);
        total += c.packets.size();
    }

    struct Item {
        std::int64_t ts;
        PacketOrigin origin;
    };
    std::vector<Item> items;
    items.reserve(total);
    for (std::uint32_t i = 0; i < captures.size(); ++i) {
        const auto& c = captures[i];
        const std::int64_t scale = out.units_per_second() / c.units_per_second();
        for (std::uint32_t k = 0; k < c.packets.size(); ++k)
            items.push_back({c.timestamp_units(c.packets[k]) * scale, {i, k}});
    }
    // Items are generated in (input, index) order, so a stable sort on the
    // timestamp alone yields the documented tie-break.
    std::stable_sort(items.begin(), items.end(),
                     [](const Item& a, const Item& b) { return a.ts < b.ts; });

    const std::int64_t ups = out.units_per_second();
    out.packets.reserve(total);
    result.origins.reserve(total);
    for (const auto& item : items) {
        PacketRecord p = captures[item.origin.input].packets[item.origin.index];
        p.ts_sec = static_cast<std::uint32_t>(item.ts / ups);
        p.ts_frac = static_cast<std::uint32_t>(item.ts % ups);
        out.packets.push_back(std::move(p));
        result.origins.push_back(item.origin);
    }
    out.monotonic = true;
    return result;
}

Capture merge(std::span<const Capture> captures) {
    return merge_with_origins(captures).capture;
}

// ---------------------------------------------------------------------------
// Verification

std::vector<ChecksumViolation> verify_checksums(const Capture& capture) {
    std::vector<ChecksumViolation> violations;
    if (capture.read_only()) return violations;
    for (std::size_t i = 0; i < capture.packets.size(); ++i) {
        std::span<const std::uint8_t> frame(capture.packets[i].data);
        auto l2 = parse_ethernet(frame);
        if (!l2 || l2->ethertype != kEtherTypeIpv4) continue;
        auto ip = parse_ipv4(frame, l2->l3_offset);
        if (!ip) continue;

        const std::uint16_t ip_found = load16(frame, ip->offset + 10);
        const std::uint16_t ip_expected = ipv4_header_checksum(frame, *ip);
        if (fold(sum_words(frame.subspan(ip->offset, ip->header_len))) != 0xffff)
            violations.push_back({i, "ipv4", ip_expected, ip_found});

        if (!l4_complete(frame, *ip)) continue;
        const std::size_t field = ip->l4_offset() + l4_checksum_field(ip->protocol);
        const std::uint16_t found = load16(frame, field);
        if (ip->protocol == kProtoUdp && found == 0) continue;
        const std::uint16_t expected = l4_checksum(frame, *ip);
        // Validate by summing everything including the stored field, which
        // accepts both encodings of zero.
        std::uint32_t acc = sum_words(frame.subspan(ip->offset + 12, 8));
        acc += ip->protocol;
        acc += static_cast<std::uint32_t>(ip->l4_len());
        acc = sum_words(frame.subspan(ip->l4_offset(), ip->l4_len()), acc);
        if (fold(acc) != 0xffff)
            violations.push_back({i, ip->protocol == kProtoTcp ? "tcp" : "udp", expected, found});
    }
    return violations;
}

std::vector<Ipv4Address> frame_addresses(std::span<const std::uint8_t> frame) {
    using namespace detail;
    std::vector<Ipv4Address> out;
    auto l2 = parse_ethernet(frame);
    if (!l2) return out;
    if (l2->ethertype == kEtherTypeIpv4) {
        if (auto ip = parse_ipv4(frame, l2->l3_offset)) {
            out.emplace_back(load32(frame, ip->offset + 12));
            out.emplace_back(load32(frame, ip->offset + 16));
        }
    } else if (l2->ethertype == kEtherTypeArp) {
        if (auto arp = parse_arp(frame, l2->l3_offset)) {
            out.emplace_back(load32(frame, arp->sender_ip));
            out.emplace_back(load32(frame, arp->target_ip));
        }
    }
    return out;
}

}  // namespace socbench::pcap
