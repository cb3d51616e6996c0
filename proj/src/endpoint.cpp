#include "torbtsim/endpoint.hpp"

#include <cstdio>

namespace torbtsim {

std::string format_ip(uint32_t ip) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xff, (ip >> 16) & 0xff, (ip >> 8) & 0xff,
                  ip & 0xff);
    return buf;
}

std::string to_string(const Endpoint& ep) {
    return format_ip(ep.ip) + ":" + std::to_string(ep.port);
}

std::optional<uint32_t> parse_ip(const std::string& dotted) {
    unsigned a, b, c, d;
    char tail;
    if (std::sscanf(dotted.c_str(), "%u.%u.%u.%u%c", &a, &b, &c, &d, &tail) != 4) return std::nullopt;
    if (a > 255 || b > 255 || c > 255 || d > 255) return std::nullopt;
    return (a << 24) | (b << 16) | (c << 8) | d;
}

std::optional<Endpoint> parse_endpoint(const std::string& text) {
    auto colon = text.rfind(':');
    if (colon == std::string::npos) return std::nullopt;
    auto ip = parse_ip(text.substr(0, colon));
    if (!ip) return std::nullopt;
    unsigned long port = 0;
    try {
        port = std::stoul(text.substr(colon + 1));
    } catch (...) {
        return std::nullopt;
    }
    if (port > 65535) return std::nullopt;
    return Endpoint{*ip, static_cast<uint16_t>(port)};
}

std::string to_hex(const Bytes20& b) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(40);
    for (uint8_t byte : b) {
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xf]);
    }
    return out;
}

} // namespace torbtsim
