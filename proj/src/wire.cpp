#include "torbtsim/wire.hpp"

#include "torbtsim/bencode.hpp"
#include "torbtsim/errors.hpp"

#include <algorithm>
#include <cstring>
#include <map>

namespace torbtsim::wire {

namespace {

const char kProtocolString[] = "BitTorrent protocol";
constexpr size_t kHeaderLen = 68;
constexpr uint8_t kExtensionBit = 0x10; // reserved[5]

std::string percent_encode(const uint8_t* data, size_t len) {
    static const char* digits = "0123456789ABCDEF";
    std::string out;
    out.reserve(len * 3);
    for (size_t i = 0; i < len; ++i) {
        out.push_back('%');
        out.push_back(digits[data[i] >> 4]);
        out.push_back(digits[data[i] & 0xf]);
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::string percent_decode(const std::string& in) {
    std::string out;
    for (size_t i = 0; i < in.size(); ++i) {
        if (in[i] == '%') {
            if (i + 2 >= in.size()) throw MalformedBencoding("truncated percent escape");
            int hi = hex_value(in[i + 1]);
            int lo = hex_value(in[i + 2]);
            if (hi < 0 || lo < 0) throw MalformedBencoding("bad percent escape");
            out.push_back(static_cast<char>(hi * 16 + lo));
            i += 2;
        } else {
            out.push_back(in[i]);
        }
    }
    return out;
}

// Splits "k1=v1&k2=v2" without decoding values.
std::map<std::string, std::string> split_query(const std::string& query) {
    std::map<std::string, std::string> out;
    size_t pos = 0;
    while (pos < query.size()) {
        size_t amp = query.find('&', pos);
        if (amp == std::string::npos) amp = query.size();
        std::string pair = query.substr(pos, amp - pos);
        size_t eq = pair.find('=');
        if (eq != std::string::npos) out[pair.substr(0, eq)] = pair.substr(eq + 1);
        pos = amp + 1;
    }
    return out;
}

Bytes20 to_bytes20(const std::string& s, const char* field) {
    if (s.size() != 20) throw MalformedBencoding(std::string(field) + " must be exactly 20 bytes");
    Bytes20 out;
    std::memcpy(out.data(), s.data(), 20);
    return out;
}

void put_u32be(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

void put_u16be(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>(v & 0xff));
}

uint32_t get_u32be(const uint8_t* p) {
    return (uint32_t(p[0]) << 24) | (uint32_t(p[1]) << 16) | (uint32_t(p[2]) << 8) | uint32_t(p[3]);
}

uint16_t get_u16be(const uint8_t* p) { return static_cast<uint16_t>((uint16_t(p[0]) << 8) | uint16_t(p[1])); }

// First line of an HTTP request, or empty if none found in the prefix.
std::string request_line(const std::string& prefix) {
    size_t end = prefix.find("\r\n");
    if (end == std::string::npos) end = prefix.find('\n');
    if (end == std::string::npos) end = prefix.size();
    return prefix.substr(0, end);
}

bool looks_like_http_request(const std::string& line) {
    static const char* methods[] = {"GET ", "POST ", "HEAD ", "PUT ", "DELETE ", "OPTIONS "};
    bool method_ok = false;
    for (const char* m : methods)
        if (line.rfind(m, 0) == 0) method_ok = true;
    return method_ok && line.find(" HTTP/1.") != std::string::npos;
}

// Query string of a GET request line, or nullopt.
std::optional<std::string> get_query(const std::string& line) {
    if (line.rfind("GET ", 0) != 0) return std::nullopt;
    size_t path_end = line.find(' ', 4);
    if (path_end == std::string::npos) return std::nullopt;
    std::string path = line.substr(4, path_end - 4);
    size_t q = path.find('?');
    if (q == std::string::npos) return std::nullopt;
    return path.substr(q + 1);
}

} // namespace

const char* to_string(AnnounceEvent e) {
    switch (e) {
        case AnnounceEvent::Started: return "started";
        case AnnounceEvent::Stopped: return "stopped";
        case AnnounceEvent::Completed: return "completed";
        case AnnounceEvent::Periodic: return "periodic";
    }
    return "?";
}

std::string encode_announce_request(const AnnounceRequest& req) {
    if (req.port == 0) throw MalformedBencoding("announce port must be in [1, 65535]");
    std::string path = "/announce?info_hash=" + percent_encode(req.info_hash.data(), req.info_hash.size());
    path += "&peer_id=" + percent_encode(req.peer_id.data(), req.peer_id.size());
    path += "&port=" + std::to_string(req.port);
    if (req.declared_ip) path += "&ip=" + format_ip(*req.declared_ip);
    // periodic re-announces carry no event key, as with real trackers
    if (req.event != AnnounceEvent::Periodic) path += std::string("&event=") + to_string(req.event);
    return "GET " + path + " HTTP/1.1\r\nHost: tracker\r\n\r\n";
}

AnnounceRequest decode_announce_request(const std::string& http_get) {
    std::string line = request_line(http_get);
    auto query = get_query(line);
    if (!query) throw MalformedBencoding("not an announce GET");
    auto params = split_query(*query);
    auto need = [&](const char* key) -> std::string {
        auto it = params.find(key);
        if (it == params.end()) throw MalformedBencoding(std::string("announce missing key ") + key);
        return it->second;
    };
    AnnounceRequest req;
    req.info_hash = to_bytes20(percent_decode(need("info_hash")), "info_hash");
    req.peer_id = to_bytes20(percent_decode(need("peer_id")), "peer_id");
    unsigned long port = 0;
    try {
        port = std::stoul(need("port"));
    } catch (...) {
        throw MalformedBencoding("bad announce port");
    }
    if (port == 0 || port > 65535) throw MalformedBencoding("announce port out of range");
    req.port = static_cast<uint16_t>(port);
    if (auto it = params.find("ip"); it != params.end()) {
        auto ip = parse_ip(it->second);
        if (!ip) throw MalformedBencoding("bad announce ip");
        req.declared_ip = *ip;
    }
    req.event = AnnounceEvent::Periodic;
    if (auto it = params.find("event"); it != params.end()) {
        if (it->second == "started") req.event = AnnounceEvent::Started;
        else if (it->second == "stopped") req.event = AnnounceEvent::Stopped;
        else if (it->second == "completed") req.event = AnnounceEvent::Completed;
        else throw MalformedBencoding("unknown announce event " + it->second);
    }
    return req;
}

std::string encode_compact_peers(const std::vector<Endpoint>& peers) {
    std::string out;
    out.reserve(peers.size() * 6);
    for (const auto& ep : peers) {
        put_u32be(out, ep.ip);
        put_u16be(out, ep.port);
    }
    return out;
}

std::vector<Endpoint> decode_compact_peers(const std::string& bytes) {
    if (bytes.size() % 6 != 0) throw MalformedBencoding("compact peer list length not a multiple of 6");
    std::vector<Endpoint> peers;
    peers.reserve(bytes.size() / 6);
    const uint8_t* p = reinterpret_cast<const uint8_t*>(bytes.data());
    for (size_t i = 0; i < bytes.size(); i += 6) peers.push_back({get_u32be(p + i), get_u16be(p + i + 4)});
    return peers;
}

std::string encode_announce_response(const AnnounceResponse& resp) {
    bencode::BValue::Dict dict;
    dict.emplace("interval", bencode::BValue(int64_t(resp.interval_s)));
    dict.emplace("peers", bencode::BValue(encode_compact_peers(resp.peers)));
    return bencode::encode(bencode::BValue(std::move(dict)));
}

AnnounceResponse decode_announce_response(const std::string& bytes) {
    auto v = bencode::decode(bytes);
    if (!v.is_dict()) throw MalformedBencoding("announce response is not a dict");
    const auto& dict = v.as_dict();
    auto interval = dict.find("interval");
    auto peers = dict.find("peers");
    if (interval == dict.end() || !interval->second.is_integer())
        throw MalformedBencoding("announce response missing interval");
    if (peers == dict.end() || !peers->second.is_string())
        throw MalformedBencoding("announce response missing peers");
    int64_t iv = interval->second.as_integer();
    if (iv < 0 || iv > 0xffffffffLL) throw MalformedBencoding("announce interval out of range");
    AnnounceResponse resp;
    resp.interval_s = static_cast<uint32_t>(iv);
    resp.peers = decode_compact_peers(peers->second.as_string());
    return resp;
}

std::string encode_handshake(const BtHandshake& hs) {
    std::string out;
    out.reserve(kHeaderLen + 16);
    out.push_back(19);
    out += kProtocolString;
    std::string reserved(8, '\0');
    if (hs.extended) reserved[5] = static_cast<char>(kExtensionBit);
    out += reserved;
    out.append(reinterpret_cast<const char*>(hs.info_hash.data()), 20);
    out.append(reinterpret_cast<const char*>(hs.peer_id.data()), 20);
    if (hs.extended) {
        // BEP-10 shaped: u32 length, message id 20, ext id 0, bencoded dict
        bencode::BValue::Dict d;
        d.emplace("p", bencode::BValue(int64_t(hs.extended->listening_port)));
        std::string payload = bencode::encode(bencode::BValue(std::move(d)));
        put_u32be(out, static_cast<uint32_t>(payload.size() + 2));
        out.push_back(20);
        out.push_back(0);
        out += payload;
    }
    return out;
}

BtHandshake decode_handshake(const std::string& bytes) {
    const uint8_t* p = reinterpret_cast<const uint8_t*>(bytes.data());
    if (bytes.size() < kHeaderLen) throw MalformedBencoding("handshake shorter than 68 bytes");
    if (p[0] != 19 || std::memcmp(p + 1, kProtocolString, 19) != 0)
        throw MalformedBencoding("bad handshake header");
    BtHandshake hs;
    std::memcpy(hs.info_hash.data(), p + 28, 20);
    std::memcpy(hs.peer_id.data(), p + 48, 20);
    bool ext_bit = (p[25] & kExtensionBit) != 0;
    if (!ext_bit) {
        if (bytes.size() != kHeaderLen) throw MalformedBencoding("trailing bytes after plain handshake");
        return hs;
    }
    if (bytes.size() < kHeaderLen + 6) throw MalformedBencoding("truncated extended handshake");
    uint32_t msg_len = get_u32be(p + kHeaderLen);
    if (msg_len < 2 || kHeaderLen + 4 + msg_len != bytes.size())
        throw MalformedBencoding("bad extended handshake length");
    if (p[kHeaderLen + 4] != 20 || p[kHeaderLen + 5] != 0)
        throw MalformedBencoding("not an extended handshake message");
    auto dict_bytes = bytes.substr(kHeaderLen + 6);
    auto v = bencode::decode(dict_bytes);
    if (!v.is_dict()) throw MalformedBencoding("extended handshake payload is not a dict");
    const auto& dict = v.as_dict();
    auto port = dict.find("p");
    if (port == dict.end() || !port->second.is_integer())
        throw MalformedBencoding("extended handshake missing listening port");
    int64_t pv = port->second.as_integer();
    if (pv < 1 || pv > 65535) throw MalformedBencoding("extended handshake port out of range");
    hs.extended = ExtendedHandshake{static_cast<uint16_t>(pv)};
    return hs;
}

const char* to_string(KrpcKind k) {
    switch (k) {
        case KrpcKind::GetPeersQuery: return "get_peers_query";
        case KrpcKind::GetPeersResponse: return "get_peers_response";
        case KrpcKind::AnnouncePeerQuery: return "announce_peer_query";
        case KrpcKind::AnnouncePeerResponse: return "announce_peer_response";
    }
    return "?";
}

std::string encode_krpc(const KrpcMessage& msg) {
    using bencode::BValue;
    BValue::Dict root;
    root.emplace("t", BValue(msg.txn_id));
    switch (msg.kind) {
        case KrpcKind::GetPeersQuery: {
            BValue::Dict args;
            args.emplace("info_hash", BValue(std::string(reinterpret_cast<const char*>(msg.info_hash.data()), 20)));
            root.emplace("a", BValue(std::move(args)));
            root.emplace("q", BValue("get_peers"));
            root.emplace("y", BValue("q"));
            break;
        }
        case KrpcKind::AnnouncePeerQuery: {
            BValue::Dict args;
            args.emplace("info_hash", BValue(std::string(reinterpret_cast<const char*>(msg.info_hash.data()), 20)));
            args.emplace("port", BValue(int64_t(msg.port)));
            root.emplace("a", BValue(std::move(args)));
            root.emplace("q", BValue("announce_peer"));
            root.emplace("y", BValue("q"));
            break;
        }
        case KrpcKind::GetPeersResponse: {
            BValue::Dict ret;
            BValue::List values;
            for (const auto& ep : msg.peers) values.emplace_back(encode_compact_peers({ep}));
            ret.emplace("values", BValue(std::move(values)));
            root.emplace("r", BValue(std::move(ret)));
            root.emplace("y", BValue("r"));
            break;
        }
        case KrpcKind::AnnouncePeerResponse: {
            root.emplace("r", BValue(BValue::Dict{}));
            root.emplace("y", BValue("r"));
            break;
        }
    }
    return bencode::encode(BValue(std::move(root)));
}

KrpcMessage decode_krpc(const std::string& bytes) {
    auto v = bencode::decode(bytes);
    if (!v.is_dict()) throw MalformedBencoding("krpc message is not a dict");
    const auto& root = v.as_dict();
    auto txn = root.find("t");
    auto y = root.find("y");
    if (txn == root.end() || !txn->second.is_string()) throw MalformedBencoding("krpc missing txn id");
    if (y == root.end() || !y->second.is_string()) throw MalformedBencoding("krpc missing type");
    KrpcMessage msg;
    msg.txn_id = txn->second.as_string();
    const std::string& type = y->second.as_string();
    if (type == "q") {
        auto q = root.find("q");
        auto a = root.find("a");
        if (q == root.end() || !q->second.is_string() || a == root.end() || !a->second.is_dict())
            throw MalformedBencoding("krpc query missing q/a");
        const auto& args = a->second.as_dict();
        auto ih = args.find("info_hash");
        if (ih == args.end() || !ih->second.is_string()) throw MalformedBencoding("krpc query missing info_hash");
        msg.info_hash = to_bytes20(ih->second.as_string(), "info_hash");
        if (q->second.as_string() == "get_peers") {
            msg.kind = KrpcKind::GetPeersQuery;
        } else if (q->second.as_string() == "announce_peer") {
            msg.kind = KrpcKind::AnnouncePeerQuery;
            auto port = args.find("port");
            if (port == args.end() || !port->second.is_integer())
                throw MalformedBencoding("announce_peer missing port");
            int64_t pv = port->second.as_integer();
            if (pv < 1 || pv > 65535) throw MalformedBencoding("announce_peer port out of range");
            msg.port = static_cast<uint16_t>(pv);
        } else {
            throw MalformedBencoding("unknown krpc query " + q->second.as_string());
        }
    } else if (type == "r") {
        auto r = root.find("r");
        if (r == root.end() || !r->second.is_dict()) throw MalformedBencoding("krpc response missing r");
        const auto& ret = r->second.as_dict();
        auto values = ret.find("values");
        if (values == ret.end()) {
            msg.kind = KrpcKind::AnnouncePeerResponse;
        } else {
            if (!values->second.is_list()) throw MalformedBencoding("krpc values is not a list");
            msg.kind = KrpcKind::GetPeersResponse;
            for (const auto& item : values->second.as_list()) {
                if (!item.is_string() || item.as_string().size() != 6)
                    throw MalformedBencoding("krpc value is not a 6-byte endpoint");
                msg.peers.push_back(decode_compact_peers(item.as_string())[0]);
            }
        }
    } else {
        throw MalformedBencoding("unknown krpc type " + type);
    }
    return msg;
}

const char* to_string(StreamClass c) {
    switch (c) {
        case StreamClass::BtHandshake: return "bt_handshake";
        case StreamClass::TrackerAnnounce: return "tracker_announce";
        case StreamClass::Http: return "http";
        case StreamClass::Other: return "other";
    }
    return "?";
}

StreamClass classify_stream(const std::string& payload_prefix, uint16_t dst_port) {
    (void)dst_port; // rules are content-only
    std::string prefix = payload_prefix.substr(0, kClassifyPrefixLimit);
    if (prefix.size() >= 20 && static_cast<uint8_t>(prefix[0]) == 19 &&
        std::memcmp(prefix.data() + 1, kProtocolString, 19) == 0)
        return StreamClass::BtHandshake;
    std::string line = request_line(prefix);
    if (auto query = get_query(line)) {
        auto params = split_query(*query);
        if (params.count("info_hash") && params.count("port")) return StreamClass::TrackerAnnounce;
    }
    if (looks_like_http_request(line)) return StreamClass::Http;
    return StreamClass::Other;
}

ExtractedIds extract_ids(StreamClass cls, const std::string& payload_prefix) {
    ExtractedIds ids;
    try {
        if (cls == StreamClass::TrackerAnnounce) {
            auto req = decode_announce_request(payload_prefix);
            ids.info_hash = req.info_hash;
            ids.peer_id = req.peer_id;
            ids.listening_port = req.port;
        } else if (cls == StreamClass::BtHandshake) {
            // the tap sees only a prefix; parse the fixed header and, when
            // present and complete, the extended message
            if (payload_prefix.size() >= kHeaderLen) {
                const uint8_t* p = reinterpret_cast<const uint8_t*>(payload_prefix.data());
                InfoHash ih;
                PeerId pid;
                std::memcpy(ih.data(), p + 28, 20);
                std::memcpy(pid.data(), p + 48, 20);
                ids.info_hash = ih;
                ids.peer_id = pid;
                if ((p[25] & kExtensionBit) != 0) {
                    auto hs = decode_handshake(payload_prefix);
                    if (hs.extended) ids.listening_port = hs.extended->listening_port;
                }
            }
        }
    } catch (const MalformedBencoding&) {
        // partial capture: keep whatever was recovered before the failure
    }
    return ids;
}

} // namespace torbtsim::wire
