#pragma once

#include "torbtsim/endpoint.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace torbtsim::wire {

enum class AnnounceEvent { Started, Stopped, Completed, Periodic };

const char* to_string(AnnounceEvent e);

// Tracker announce, modeled as an HTTP GET over the stream. Binary
// fields are percent-encoded byte by byte. declared_ip carries the
// client-declared public address (the "ip=" query parameter); the
// tracker registers it instead of the transport source, which may be a
// Tor exit.
struct AnnounceRequest {
    InfoHash info_hash{};
    PeerId peer_id{};
    uint16_t port = 0; // listening port, in [1, 65535]
    AnnounceEvent event = AnnounceEvent::Started;
    std::optional<uint32_t> declared_ip;

    bool operator==(const AnnounceRequest&) const = default;
};

std::string encode_announce_request(const AnnounceRequest& req);
// Throws MalformedBencoding on any parse failure (shared error type for
// all codec rejects).
AnnounceRequest decode_announce_request(const std::string& http_get);

struct AnnounceResponse {
    uint32_t interval_s = 0;
    std::vector<Endpoint> peers;

    bool operator==(const AnnounceResponse&) const = default;
};

// Bencoded {"interval": i, "peers": compact bytes}.
std::string encode_announce_response(const AnnounceResponse& resp);
AnnounceResponse decode_announce_response(const std::string& bytes);

// Compact peer list: 6 bytes per peer, 4-byte big-endian IPv4 followed
// by 2-byte big-endian port, order preserved.
std::string encode_compact_peers(const std::vector<Endpoint>& peers);
std::vector<Endpoint> decode_compact_peers(const std::string& bytes);

struct ExtendedHandshake {
    uint16_t listening_port = 0;

    bool operator==(const ExtendedHandshake&) const = default;
};

// 68-byte header: length byte 19, "BitTorrent protocol", 8 reserved
// bytes, info_hash, peer_id. When the extended handshake is present the
// extension bit (reserved[5] & 0x10) is set and a BEP-10 style message
// carrying the listening port follows the header.
struct BtHandshake {
    InfoHash info_hash{};
    PeerId peer_id{};
    std::optional<ExtendedHandshake> extended;

    bool operator==(const BtHandshake&) const = default;
};

std::string encode_handshake(const BtHandshake& hs);
BtHandshake decode_handshake(const std::string& bytes);

enum class KrpcKind { GetPeersQuery, GetPeersResponse, AnnouncePeerQuery, AnnouncePeerResponse };

const char* to_string(KrpcKind k);

struct KrpcMessage {
    std::string txn_id;
    KrpcKind kind = KrpcKind::GetPeersQuery;
    InfoHash info_hash{};           // queries
    std::vector<Endpoint> peers;    // get_peers response
    uint16_t port = 0;              // announce_peer query

    bool operator==(const KrpcMessage&) const = default;
};

std::string encode_krpc(const KrpcMessage& msg);
KrpcMessage decode_krpc(const std::string& bytes);

enum class StreamClass { BtHandshake, TrackerAnnounce, Http, Other };

const char* to_string(StreamClass c);

// Classification looks at most at the first 512 bytes of the stream.
constexpr size_t kClassifyPrefixLimit = 512;

// Total function: BtHandshake iff the 20-byte header rule matches,
// TrackerAnnounce iff an HTTP GET whose query carries both info_hash
// and port keys, Http iff an HTTP request line without announce keys,
// Other otherwise. dst_port is part of the tap contract but the rules
// are content-only.
StreamClass classify_stream(const std::string& payload_prefix, uint16_t dst_port);

// Identifier extraction used by the exit tap; fields are present only
// when the class recovered them.
struct ExtractedIds {
    std::optional<InfoHash> info_hash;
    std::optional<PeerId> peer_id;
    std::optional<uint16_t> listening_port;
};

ExtractedIds extract_ids(StreamClass cls, const std::string& payload_prefix);

} // namespace torbtsim::wire
