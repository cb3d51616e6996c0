#include "torbtsim/adversary.hpp"

#include <algorithm>
#include <queue>

namespace torbtsim::adversary {

const char* to_string(TraceMethod m) {
    switch (m) {
        case TraceMethod::Hijack: return "hijack";
        case TraceMethod::DhtPortMatch: return "dht_port_match";
        case TraceMethod::LinkSameCircuit: return "link_same_circuit";
        case TraceMethod::LinkPeerId: return "link_peer_id";
        case TraceMethod::LinkFreshEndpoint: return "link_fresh_endpoint";
    }
    return "?";
}

const char* to_string(LinkProvenance p) {
    switch (p) {
        case LinkProvenance::PeerIdMatch: return "peer_id_match";
        case LinkProvenance::FreshEndpointFollow: return "fresh_endpoint_follow";
    }
    return "?";
}

uint64_t LinkageGraph::find(uint64_t circuit) {
    auto it = parent_.find(circuit);
    if (it == parent_.end()) {
        parent_[circuit] = circuit;
        rank_[circuit] = 0;
        return circuit;
    }
    uint64_t root = circuit;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[circuit] != root) {
        uint64_t next = parent_[circuit];
        parent_[circuit] = root;
        circuit = next;
    }
    return root;
}

bool LinkageGraph::unite(uint64_t a, uint64_t b) {
    uint64_t ra = find(a), rb = find(b);
    if (ra == rb) return false;
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    return true;
}

void Adversary::on_stream(const tor::TapStream& tap) {
    ExitObservation obs;
    obs.exit_host = tap.exit_host;
    obs.circuit = tap.circuit;
    obs.stream = tap.stream;
    obs.destination = tap.destination;
    obs.encrypted = tap.encrypted;
    obs.at = tap.at;
    // encrypted payloads defeat content inspection
    obs.cls = tap.encrypted ? wire::StreamClass::Other
                            : wire::classify_stream(tap.payload_prefix, tap.destination.port);
    if (!tap.encrypted) {
        auto ids = wire::extract_ids(obs.cls, tap.payload_prefix);
        obs.info_hash = ids.info_hash;
        obs.peer_id = ids.peer_id;
        obs.listening_port = ids.listening_port;
    }

    graph_.find(obs.circuit); // make every observed circuit a node

    if (config_.linkage_enabled) link_streams(obs);
    if (config_.dht_match_enabled) try_dht_port_match(obs);

    obs_by_stream_[obs.stream] = observations_.size();
    observations_.push_back(obs);
}

void Adversary::link_streams(const ExitObservation& obs) {
    prune_fresh_index(obs.at);

    // same peer identifier on different circuits, unless the stream is
    // encrypted
    if (obs.peer_id && !obs.encrypted) {
        auto it = peer_id_index_.find(*obs.peer_id);
        if (it != peer_id_index_.end() && it->second != obs.circuit)
            record_union(it->second, obs.circuit, LinkProvenance::PeerIdMatch, obs.at);
        peer_id_index_[*obs.peer_id] = obs.circuit;
    }

    // stream destination freshly returned in a tracker response seen on
    // another circuit
    auto fresh = fresh_index_.find(obs.destination);
    if (fresh != fresh_index_.end() && fresh->second.first != obs.circuit)
        record_union(fresh->second.first, obs.circuit, LinkProvenance::FreshEndpointFollow, obs.at);
}

void Adversary::try_dht_port_match(const ExitObservation& obs) {
    if (!obs.info_hash || !obs.listening_port) return;
    if (obs.cls != wire::StreamClass::TrackerAnnounce && obs.cls != wire::StreamClass::BtHandshake) return;
    if (!dht_lookups_done_.insert({obs.circuit, *obs.info_hash}).second) return;
    if (!dht_lookup_) return;

    std::vector<Endpoint> candidates = dht_lookup_(*obs.info_hash);
    std::vector<Endpoint> matching;
    for (const auto& ep : candidates)
        if (ep.port == *obs.listening_port) matching.push_back(ep);
    // zero or several matching ports: the attempt failed, silently
    if (matching.size() != 1) return;
    record_trace(TraceResult{obs.circuit, obs.stream, matching.front(), TraceMethod::DhtPortMatch, obs.at});
}

std::string Adversary::on_response(const tor::TapStream& tap, std::string bytes) {
    wire::AnnounceResponse response;
    try {
        response = wire::decode_announce_response(bytes);
    } catch (const MalformedBencoding&) {
        return bytes; // not a tracker response; pass through
    }

    // refresh the fresh-endpoint index from the peers the tracker
    // actually returned (the attacker's own endpoint never enters it)
    if (config_.linkage_enabled) {
        for (const auto& ep : response.peers) {
            if (ep == config_.malicious_endpoint) continue;
            fresh_index_[ep] = {tap.circuit, tap.at};
        }
    }
    if (auto it = obs_by_stream_.find(tap.stream); it != obs_by_stream_.end())
        observations_[it->second].announce_peers = response.peers;

    if (!config_.hijack_enabled || !config_.hijack_exits.count(tap.exit_host)) return bytes;
    auto it = obs_by_stream_.find(tap.stream);
    if (it == obs_by_stream_.end()) return bytes;
    const ExitObservation& obs = observations_[it->second];
    if (obs.cls != wire::StreamClass::TrackerAnnounce || !obs.info_hash) return bytes;

    // prepend the malicious peer and truncate to the original length so
    // the response size is unchanged; an empty list grows to one entry
    size_t original_len = response.peers.size();
    std::vector<Endpoint> rewritten;
    rewritten.push_back(config_.malicious_endpoint);
    for (const auto& ep : response.peers) {
        if (rewritten.size() >= std::max<size_t>(original_len, 1)) break;
        rewritten.push_back(ep);
    }
    response.peers = std::move(rewritten);
    hijack_expectations_[*obs.info_hash].push_back({tap.circuit, tap.stream, tap.at});
    ++hijacked_responses_;
    return wire::encode_announce_response(response);
}

AcceptOutcome Adversary::malicious_peer_accept(Endpoint source, const wire::BtHandshake& handshake,
                                               sim::SimTime at) {
    if (config_.exit_ips.count(source.ip)) return AcceptOutcome::ViaTorNoTrace;

    auto it = hijack_expectations_.find(handshake.info_hash);
    if (it == hijack_expectations_.end()) return AcceptOutcome::NoCandidate;
    std::vector<HijackExpectation>& pending = it->second;
    std::erase_if(pending, [&](const HijackExpectation& e) { return e.at + config_.correlation_window < at; });
    if (pending.empty()) return AcceptOutcome::NoCandidate;
    if (pending.size() >= 2) {
        ++ambiguous_;
        return AcceptOutcome::AmbiguousCorrelation;
    }
    const HijackExpectation& e = pending.front();
    TraceResult trace{e.circuit, e.stream, source, TraceMethod::Hijack, at};
    auto key = std::make_pair(trace.circuit, std::make_pair(trace.traced_endpoint, trace.method));
    if (trace_keys_.count(key)) return AcceptOutcome::DuplicateTrace;
    record_trace(std::move(trace));
    return AcceptOutcome::Traced;
}

void Adversary::record_trace(TraceResult trace) {
    auto key = std::make_pair(trace.circuit, std::make_pair(trace.traced_endpoint, trace.method));
    if (!trace_keys_.insert(key).second) return;
    TraceLogRecord rec;
    rec.kind = TraceLogRecord::Kind::Trace;
    rec.at = trace.at;
    rec.trace = trace;
    trace_log_.push_back(rec);
    traces_.push_back(std::move(trace));
}

void Adversary::record_union(uint64_t a, uint64_t b, LinkProvenance provenance, sim::SimTime at) {
    auto key = std::make_tuple(std::min(a, b), std::max(a, b), provenance);
    if (!edge_keys_.insert(key).second) return;
    LinkEdge edge{a, b, provenance, at};
    graph_.unite(a, b);
    TraceLogRecord rec;
    rec.kind = TraceLogRecord::Kind::Union;
    rec.at = at;
    rec.edge = edge;
    trace_log_.push_back(rec);
    edges_.push_back(edge);
}

void Adversary::prune_fresh_index(sim::SimTime now) {
    std::erase_if(fresh_index_, [&](const auto& entry) {
        return entry.second.second + config_.freshness_window < now;
    });
}

PropagationResult Adversary::propagate_traces() const {
    PropagationResult result;

    // adjacency over recorded linkage edges
    std::map<uint64_t, std::vector<std::pair<uint64_t, LinkProvenance>>> adj;
    for (const auto& e : edges_) {
        adj[e.a].emplace_back(e.b, e.provenance);
        adj[e.b].emplace_back(e.a, e.provenance);
    }

    // component -> distinct directly traced endpoints
    std::map<uint64_t, std::set<Endpoint>> component_endpoints;
    std::map<uint64_t, std::vector<const TraceResult*>> direct_by_circuit;
    for (const auto& t : traces_) {
        component_endpoints[graph_.find(t.circuit)].insert(t.traced_endpoint);
        direct_by_circuit[t.circuit].push_back(&t);
    }

    // circuits and streams the adversary actually observed
    std::map<uint64_t, std::vector<const ExitObservation*>> streams_by_circuit;
    for (const auto& obs : observations_) streams_by_circuit[obs.circuit].push_back(&obs);

    std::set<uint64_t> conflicted_roots;
    for (const auto& [root, endpoints] : component_endpoints)
        if (endpoints.size() > 1) conflicted_roots.insert(root);
    result.conflicted_components = conflicted_roots.size();

    // breadth-first labeling from directly traced circuits, in circuit
    // order for determinism; the provenance of the first edge reaching a
    // circuit decides its method label
    std::map<uint64_t, TraceMethod> circuit_label;
    std::queue<uint64_t> frontier;
    for (const auto& [circuit, _] : direct_by_circuit) {
        circuit_label[circuit] = TraceMethod::LinkSameCircuit;
        frontier.push(circuit);
    }
    while (!frontier.empty()) {
        uint64_t c = frontier.front();
        frontier.pop();
        auto it = adj.find(c);
        if (it == adj.end()) continue;
        for (const auto& [next, provenance] : it->second) {
            if (circuit_label.count(next)) continue;
            circuit_label[next] = provenance == LinkProvenance::PeerIdMatch ? TraceMethod::LinkPeerId
                                                                            : TraceMethod::LinkFreshEndpoint;
            frontier.push(next);
        }
    }

    for (const auto& [circuit, obs_list] : streams_by_circuit) {
        uint64_t root = graph_.find(circuit);
        auto eps = component_endpoints.find(root);
        if (eps == component_endpoints.end()) continue; // nothing traced in this component
        if (conflicted_roots.count(root)) {
            result.conflicted_circuits.insert(circuit);
            continue;
        }
        Endpoint endpoint = *eps->second.begin();
        result.traced_circuits.insert(circuit);
        auto direct = direct_by_circuit.find(circuit);
        for (const ExitObservation* obs : obs_list) {
            TraceMethod method = circuit_label.at(circuit);
            if (direct != direct_by_circuit.end()) {
                method = TraceMethod::LinkSameCircuit;
                for (const TraceResult* t : direct->second)
                    if (t->stream == obs->stream) method = t->method;
            }
            result.traced.push_back({obs->stream, circuit, endpoint, method});
        }
    }
    std::sort(result.traced.begin(), result.traced.end(),
              [](const TracedStream& a, const TracedStream& b) { return a.stream < b.stream; });
    return result;
}

} // namespace torbtsim::adversary
