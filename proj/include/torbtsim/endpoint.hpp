#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace torbtsim {

// IPv4 address + TCP/UDP port. Each simulated host owns exactly one
// endpoint; it is the identity an attacker tries to learn.
struct Endpoint {
    uint32_t ip = 0; // host byte order
    uint16_t port = 0;

    auto operator<=>(const Endpoint&) const = default;
};

std::string format_ip(uint32_t ip);
std::string to_string(const Endpoint& ep); // "a.b.c.d:port"
std::optional<uint32_t> parse_ip(const std::string& dotted);
std::optional<Endpoint> parse_endpoint(const std::string& text);

// 20-byte identifier (info_hash, peer_id).
using Bytes20 = std::array<uint8_t, 20>;
using InfoHash = Bytes20;
using PeerId = Bytes20;

std::string to_hex(const Bytes20& b);

} // namespace torbtsim
