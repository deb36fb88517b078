#include "socbench/ipv4.hpp"

#include <charconv>

#include "socbench/error.hpp"

namespace socbench {

std::optional<Ipv4Address> Ipv4Address::parse(std::string_view text) {
    std::uint32_t value = 0;
    const char* p = text.data();
    const char* end = text.data() + text.size();
    for (int octet = 0; octet < 4; ++octet) {
        if (octet > 0) {
            if (p == end || *p != '.') return std::nullopt;
            ++p;
        }
        if (p == end || *p < '0' || *p > '9') return std::nullopt;
        unsigned part = 0;
        auto [next, ec] = std::from_chars(p, end, part);
        if (ec != std::errc{} || part > 255 || next - p > 3) return std::nullopt;
        value = (value << 8) | part;
        p = next;
    }
    if (p != end) return std::nullopt;
    return Ipv4Address(value);
}

Ipv4Address Ipv4Address::from_string(std::string_view text) {
    auto parsed = parse(text);
    if (!parsed) fail(ErrorCode::invalid_argument, "invalid IPv4 address '" + std::string(text) + "'");
    return *parsed;
}

std::string Ipv4Address::to_string() const {
    return std::to_string(value_ >> 24) + '.' + std::to_string((value_ >> 16) & 0xff) + '.' +
           std::to_string((value_ >> 8) & 0xff) + '.' + std::to_string(value_ & 0xff);
}

Ipv4Prefix::Ipv4Prefix(Ipv4Address network, int length) : network_(network), length_(length) {
    if (length < 0 || length > 32) fail(ErrorCode::invalid_argument, "prefix length out of range");
    if ((network.value() & ~mask()) != 0)
        fail(ErrorCode::invalid_argument, "prefix " + network.to_string() + "/" +
                                              std::to_string(length) + " has host bits set");
}

Ipv4Prefix Ipv4Prefix::from_string(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Ipv4Prefix(Ipv4Address::from_string(text), 32);
    auto addr = Ipv4Address::from_string(text.substr(0, slash));
    auto len_text = text.substr(slash + 1);
    int len = -1;
    auto [next, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
    if (ec != std::errc{} || next != len_text.data() + len_text.size())
        fail(ErrorCode::invalid_argument, "invalid prefix '" + std::string(text) + "'");
    return Ipv4Prefix(addr, len);
}

bool Ipv4Prefix::overlaps(const Ipv4Prefix& other) const {
    // Two CIDR blocks overlap iff one contains the other's network.
    return length_ <= other.length_ ? contains(other.network_) : other.contains(network_);
}

std::string Ipv4Prefix::to_string() const {
    return network_.to_string() + "/" + std::to_string(length_);
}

}  // namespace socbench
