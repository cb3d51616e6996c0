#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "torbtsim/errors.hpp"
#include "torbtsim/rng.hpp"
#include "torbtsim/wire.hpp"

using namespace torbtsim;
using namespace torbtsim::wire;

namespace {

Bytes20 bytes20(uint8_t fill) {
    Bytes20 b;
    b.fill(fill);
    return b;
}

Endpoint random_endpoint(Rng& rng) {
    return {static_cast<uint32_t>(rng.next_u64()), rng.uniform_port(1, 65535)};
}

} // namespace

TEST_CASE("compact peers layout is forced") {
    std::string one = encode_compact_peers({{0x0a000001, 6881}});
    REQUIRE(one.size() == 6);
    const auto* p = reinterpret_cast<const uint8_t*>(one.data());
    CHECK(p[0] == 0x0a);
    CHECK(p[1] == 0x00);
    CHECK(p[2] == 0x00);
    CHECK(p[3] == 0x01);
    CHECK(p[4] == 0x1a);
    CHECK(p[5] == 0xe1);

    CHECK(encode_compact_peers({}).empty());

    std::string two = encode_compact_peers({{0x01020304, 80}, {0x05060708, 443}});
    REQUIRE(two.size() == 12);
    const auto* q = reinterpret_cast<const uint8_t*>(two.data());
    CHECK(q[0] == 0x01);
    CHECK(q[1] == 0x02);
    CHECK(q[2] == 0x03);
    CHECK(q[3] == 0x04);
    CHECK(q[4] == 0x00);
    CHECK(q[5] == 0x50);
}

TEST_CASE("compact peers round-trip on random lists") {
    Rng rng(0xc0ffee);
    for (int round = 0; round < 50; ++round) {
        size_t n = rng.uniform_u64(0, 200);
        std::vector<Endpoint> peers;
        for (size_t i = 0; i < n; ++i) peers.push_back(random_endpoint(rng));
        CHECK(decode_compact_peers(encode_compact_peers(peers)) == peers);
    }
    CHECK_THROWS_AS(decode_compact_peers("12345"), MalformedBencoding);
}

TEST_CASE("announce request encodes every binary byte percent-escaped") {
    AnnounceRequest req;
    req.info_hash = bytes20(0x00);
    req.peer_id = bytes20(0xff);
    req.port = 6881;
    req.event = AnnounceEvent::Started;
    std::string get = encode_announce_request(req);
    CHECK(get.rfind("GET /announce?", 0) == 0);
    CHECK(get.find("info_hash=%00%00") != std::string::npos);
    CHECK(get.find("peer_id=%FF%FF") != std::string::npos);
    CHECK(get.find("&port=6881") != std::string::npos);
    CHECK(get.find("&event=started") != std::string::npos);
    CHECK(decode_announce_request(get) == req);
}

TEST_CASE("announce request round-trips, periodic carries no event key") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        AnnounceRequest req;
        for (auto& b : req.info_hash) b = static_cast<uint8_t>(rng.uniform_u64(0, 255));
        for (auto& b : req.peer_id) b = static_cast<uint8_t>(rng.uniform_u64(0, 255));
        req.port = rng.uniform_port(1, 65535);
        req.event = static_cast<AnnounceEvent>(rng.uniform_u64(0, 3));
        if (rng.bernoulli(0.5)) req.declared_ip = static_cast<uint32_t>(rng.next_u64());
        std::string get = encode_announce_request(req);
        if (req.event == AnnounceEvent::Periodic) CHECK(get.find("event=") == std::string::npos);
        CHECK(decode_announce_request(get) == req);
    }
    AnnounceRequest zero_port;
    zero_port.port = 0;
    CHECK_THROWS_AS(encode_announce_request(zero_port), MalformedBencoding);
}

TEST_CASE("announce response is bencoded with compact peers") {
    AnnounceResponse resp;
    resp.interval_s = 600;
    resp.peers = {{0x0a000001, 6881}, {0x0a000002, 51413}};
    std::string bytes = encode_announce_response(resp);
    CHECK(bytes.rfind("d8:intervali600e5:peers12:", 0) == 0);
    CHECK(decode_announce_response(bytes) == resp);
    CHECK_THROWS_AS(decode_announce_response("de"), MalformedBencoding);
}

TEST_CASE("handshake wire form") {
    BtHandshake hs;
    hs.info_hash = bytes20(0xab);
    hs.peer_id = bytes20(0xcd);
    std::string plain = encode_handshake(hs);
    REQUIRE(plain.size() == 68);
    CHECK(static_cast<uint8_t>(plain[0]) == 19);
    CHECK(plain.substr(1, 19) == "BitTorrent protocol");
    CHECK(decode_handshake(plain) == hs);

    hs.extended = ExtendedHandshake{51413};
    std::string ext = encode_handshake(hs);
    CHECK(ext.size() > 68);
    CHECK((static_cast<uint8_t>(ext[25]) & 0x10) != 0);
    CHECK(decode_handshake(ext) == hs);

    CHECK_THROWS_AS(decode_handshake(plain.substr(0, 67)), MalformedBencoding);
    std::string bad = plain;
    bad[1] = 'X';
    CHECK_THROWS_AS(decode_handshake(bad), MalformedBencoding);
}

TEST_CASE("krpc messages round-trip and responses echo txn ids") {
    KrpcMessage query;
    query.txn_id = "t1";
    query.kind = KrpcKind::GetPeersQuery;
    query.info_hash = bytes20(0x11);
    CHECK(decode_krpc(encode_krpc(query)) == query);

    KrpcMessage announce;
    announce.txn_id = "t2";
    announce.kind = KrpcKind::AnnouncePeerQuery;
    announce.info_hash = bytes20(0x22);
    announce.port = 6881;
    CHECK(decode_krpc(encode_krpc(announce)) == announce);

    KrpcMessage response;
    response.txn_id = query.txn_id; // response echoes the query's txn
    response.kind = KrpcKind::GetPeersResponse;
    response.peers = {{0x0a000001, 6881}, {0x0a000002, 51413}};
    KrpcMessage decoded = decode_krpc(encode_krpc(response));
    CHECK(decoded == response);
    CHECK(decoded.txn_id == query.txn_id);

    KrpcMessage ack;
    ack.txn_id = announce.txn_id;
    ack.kind = KrpcKind::AnnouncePeerResponse;
    CHECK(decode_krpc(encode_krpc(ack)) == ack);
}

TEST_CASE("stream classification rules") {
    BtHandshake hs;
    hs.info_hash = bytes20(1);
    hs.peer_id = bytes20(2);
    CHECK(classify_stream(encode_handshake(hs), 6881) == StreamClass::BtHandshake);

    AnnounceRequest req;
    req.info_hash = bytes20(3);
    req.peer_id = bytes20(4);
    req.port = 6881;
    CHECK(classify_stream(encode_announce_request(req), 80) == StreamClass::TrackerAnnounce);

    CHECK(classify_stream("GET /index.html HTTP/1.1\r\nHost: x\r\n\r\n", 80) == StreamClass::Http);
    CHECK(classify_stream("POST /submit HTTP/1.1\r\n\r\n", 80) == StreamClass::Http);
    CHECK(classify_stream("GET /find?info_hashes=1&portal=2 HTTP/1.1\r\n\r\n", 80) == StreamClass::Http);
    CHECK(classify_stream("", 80) == StreamClass::Other);
    CHECK(classify_stream("\x13KitTorrent protocol", 6881) == StreamClass::Other);
    CHECK(classify_stream("random bytes", 443) == StreamClass::Other);
}

TEST_CASE("well-formed handshakes are never classified as http") {
    Rng rng(1234);
    for (int i = 0; i < 500; ++i) {
        BtHandshake hs;
        for (auto& b : hs.info_hash) b = static_cast<uint8_t>(rng.uniform_u64(0, 255));
        for (auto& b : hs.peer_id) b = static_cast<uint8_t>(rng.uniform_u64(0, 255));
        if (rng.bernoulli(0.5)) hs.extended = ExtendedHandshake{rng.uniform_port(1, 65535)};
        StreamClass cls = classify_stream(encode_handshake(hs), rng.uniform_port(1, 65535));
        CHECK(cls == StreamClass::BtHandshake);
    }
}

TEST_CASE("identifier extraction per class") {
    AnnounceRequest req;
    req.info_hash = bytes20(9);
    req.peer_id = bytes20(8);
    req.port = 40001;
    std::string get = encode_announce_request(req);
    ExtractedIds ids = extract_ids(StreamClass::TrackerAnnounce, get);
    REQUIRE(ids.info_hash.has_value());
    CHECK(*ids.info_hash == req.info_hash);
    CHECK(*ids.peer_id == req.peer_id);
    CHECK(*ids.listening_port == 40001);

    BtHandshake hs;
    hs.info_hash = bytes20(7);
    hs.peer_id = bytes20(6);
    ids = extract_ids(StreamClass::BtHandshake, encode_handshake(hs));
    CHECK(*ids.info_hash == hs.info_hash);
    CHECK(!ids.listening_port.has_value());

    hs.extended = ExtendedHandshake{50000};
    ids = extract_ids(StreamClass::BtHandshake, encode_handshake(hs));
    CHECK(*ids.listening_port == 50000);

    ids = extract_ids(StreamClass::Http, "GET / HTTP/1.1\r\n\r\n");
    CHECK(!ids.info_hash.has_value());
}

TEST_CASE("classification looks only at the first 512 bytes") {
    std::string long_noise(600, 'x');
    std::string late_handshake = long_noise + "\x13" + "BitTorrent protocol";
    CHECK(classify_stream(late_handshake, 6881) == StreamClass::Other);
}
