#pragma once

#include "torbtsim/endpoint.hpp"
#include "torbtsim/sim.hpp"
#include "torbtsim/tor.hpp"
#include "torbtsim/wire.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace torbtsim::adversary {

enum class TraceMethod { Hijack, DhtPortMatch, LinkSameCircuit, LinkPeerId, LinkFreshEndpoint };
const char* to_string(TraceMethod m);

enum class LinkProvenance { PeerIdMatch, FreshEndpointFollow };
const char* to_string(LinkProvenance p);

// One TCP-stream observation at an instrumented exit. Never carries the
// circuit owner; identifiers are present only when classification
// recovered them.
struct ExitObservation {
    sim::HostId exit_host = sim::kNoHost;
    uint64_t circuit = 0;
    uint64_t stream = 0;
    Endpoint destination;
    wire::StreamClass cls = wire::StreamClass::Other;
    bool encrypted = false;
    std::optional<InfoHash> info_hash;
    std::optional<PeerId> peer_id;
    std::optional<uint16_t> listening_port;
    std::vector<Endpoint> announce_peers; // from the tracker response, when seen
    sim::SimTime at = 0;
};

struct TraceResult {
    uint64_t circuit = 0;
    uint64_t stream = 0; // the observation that triggered the trace
    Endpoint traced_endpoint;
    TraceMethod method = TraceMethod::Hijack;
    sim::SimTime at = 0;
};

struct LinkEdge {
    uint64_t a = 0;
    uint64_t b = 0;
    LinkProvenance provenance = LinkProvenance::PeerIdMatch;
    sim::SimTime at = 0;
};

// Union-find over circuit ids, created lazily as circuits are observed.
class LinkageGraph {
  public:
    uint64_t find(uint64_t circuit);
    bool unite(uint64_t a, uint64_t b); // false if already joined
    bool same(uint64_t a, uint64_t b) { return find(a) == find(b); }

  private:
    std::map<uint64_t, uint64_t> parent_;
    std::map<uint64_t, uint32_t> rank_;
};

struct TracedStream {
    uint64_t stream = 0;
    uint64_t circuit = 0;
    Endpoint endpoint;
    TraceMethod method = TraceMethod::Hijack;
};

struct PropagationResult {
    std::vector<TracedStream> traced;          // sorted by stream id
    std::set<uint64_t> traced_circuits;
    std::set<uint64_t> conflicted_circuits;    // tracing refused
    size_t conflicted_components = 0;
};

enum class AcceptOutcome { Traced, ViaTorNoTrace, NoCandidate, AmbiguousCorrelation, DuplicateTrace };

struct TraceLogRecord {
    enum class Kind { Trace, Union } kind = Kind::Trace;
    sim::SimTime at = 0;
    // trace
    TraceResult trace;
    // union
    LinkEdge edge;
};

// The instrumented exits plus the malicious, publicly connectable
// BitTorrent peer. Consumes exit-tap events, runs the tracker-response
// rewrite and the DHT port-matching procedure, and maintains the
// cross-circuit linkage graph.
class Adversary {
  public:
    struct Config {
        std::set<uint32_t> exit_ips;           // public exit directory
        std::set<sim::HostId> hijack_exits;    // exits where responses are rewritten
        Endpoint malicious_endpoint;
        sim::SimTime correlation_window = sim::seconds(120); // hijack-to-connection window
        sim::SimTime freshness_window = sim::seconds(120);   // fresh-endpoint index lifetime
        bool hijack_enabled = true;
        bool dht_match_enabled = true;
        bool linkage_enabled = true;
    };

    using DhtLookup = std::function<std::vector<Endpoint>(const InfoHash&)>;

    Adversary(Config config, DhtLookup dht_lookup) : config_(std::move(config)), dht_lookup_(std::move(dht_lookup)) {}

    // Exit tap entry points.
    void on_stream(const tor::TapStream& tap);
    std::string on_response(const tor::TapStream& tap, std::string bytes);

    // Incoming TCP connection at the malicious peer.
    AcceptOutcome malicious_peer_accept(Endpoint source, const wire::BtHandshake& handshake, sim::SimTime at);

    // Closure over the linkage graph: every stream of every circuit in a
    // component holding at least one direct trace is marked traced;
    // components with conflicting endpoints are refused.
    PropagationResult propagate_traces() const;

    const std::vector<ExitObservation>& observations() const { return observations_; }
    const std::vector<TraceResult>& trace_results() const { return traces_; }
    const std::vector<LinkEdge>& link_edges() const { return edges_; }
    const std::vector<TraceLogRecord>& trace_log() const { return trace_log_; }
    size_t ambiguous_correlations() const { return ambiguous_; }
    size_t hijacked_responses() const { return hijacked_responses_; }
    const Config& config() const { return config_; }

  private:
    void link_streams(const ExitObservation& obs);
    void try_dht_port_match(const ExitObservation& obs);
    void record_trace(TraceResult trace);
    void record_union(uint64_t a, uint64_t b, LinkProvenance provenance, sim::SimTime at);
    void prune_fresh_index(sim::SimTime now);

    Config config_;
    DhtLookup dht_lookup_;

    std::vector<ExitObservation> observations_;
    std::map<uint64_t, size_t> obs_by_stream_;
    std::vector<TraceResult> traces_;
    std::set<std::pair<uint64_t, std::pair<Endpoint, TraceMethod>>> trace_keys_;
    std::vector<LinkEdge> edges_;
    std::set<std::tuple<uint64_t, uint64_t, LinkProvenance>> edge_keys_;
    std::vector<TraceLogRecord> trace_log_;
    mutable LinkageGraph graph_;

    // peer_id -> most recent circuit it was seen on
    std::map<PeerId, uint64_t> peer_id_index_;
    // endpoint -> (source circuit, returned_at); only endpoints from
    // tracker responses enter
    std::map<Endpoint, std::pair<uint64_t, sim::SimTime>> fresh_index_;
    // info_hash -> hijacked announce circuits awaiting a connect-back
    struct HijackExpectation {
        uint64_t circuit = 0;
        uint64_t stream = 0;
        sim::SimTime at = 0;
    };
    std::map<InfoHash, std::vector<HijackExpectation>> hijack_expectations_;
    // one DHT lookup per (circuit, info_hash)
    std::set<std::pair<uint64_t, InfoHash>> dht_lookups_done_;

    size_t ambiguous_ = 0;
    size_t hijacked_responses_ = 0;
};

} // namespace torbtsim::adversary
