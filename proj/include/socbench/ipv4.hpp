#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace socbench {

/// IPv4 address in host byte order.
class Ipv4Address {
public:
    constexpr Ipv4Address() = default;
    constexpr explicit Ipv4Address(std::uint32_t value) : value_(value) {}

    /// Strict dotted-quad parse: four decimal octets, no surrounding space.
    static std::optional<Ipv4Address> parse(std::string_view text);
    /// Like parse() but throws InvalidArgument.
    static Ipv4Address from_string(std::string_view text);

    constexpr std::uint32_t value() const { return value_; }
    std::string to_string() const;

    auto operator<=>(const Ipv4Address&) const = default;

private:
    std::uint32_t value_ = 0;
};

/// A CIDR block; a bare address is a /32.
class Ipv4Prefix {
public:
    Ipv4Prefix() = default;
    Ipv4Prefix(Ipv4Address network, int length);

    /// Accepts "a.b.c.d/len" or "a.b.c.d". Host bits must be zero.
    static Ipv4Prefix from_string(std::string_view text);

    Ipv4Address network() const { return network_; }
    int length() const { return length_; }
    std::uint32_t mask() const {
        return length_ == 0 ? 0u : ~std::uint32_t{0} << (32 - length_);
    }

    bool contains(Ipv4Address addr) const {
        return (addr.value() & mask()) == network_.value();
    }
    bool overlaps(const Ipv4Prefix& other) const;

    std::string to_string() const;

    auto operator<=>(const Ipv4Prefix&) const = default;

private:
    Ipv4Address network_{};
    int length_ = 32;
};

}  // namespace socbench
