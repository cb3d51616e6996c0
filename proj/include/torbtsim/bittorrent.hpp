#pragma once

#include "torbtsim/endpoint.hpp"
#include "torbtsim/errors.hpp"
#include "torbtsim/rng.hpp"
#include "torbtsim/sim.hpp"
#include "torbtsim/tor.hpp"
#include "torbtsim/wire.hpp"

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace torbtsim::bt {

enum class Ecosystem { Public, Private, Underground };
const char* to_string(Ecosystem e);

struct ContentItem {
    InfoHash info_hash{};
    Ecosystem ecosystem = Ecosystem::Public;
    std::vector<std::string> tags;
    double popularity = 1.0;
};

struct CatalogConfig {
    size_t n_items = 200;
    double share_public = 0.90;
    double share_private = 0.07;
    double share_underground = 0.03;
    std::vector<std::string> tag_vocabulary = {"movie", "music", "game", "book", "anime", "porn", "software"};
    std::string popularity = "uniform"; // uniform | zipf
    double zipf_exponent = 1.0;
};

class Catalog {
  public:
    static Catalog generate(const CatalogConfig& config, Rng& rng);

    const std::vector<ContentItem>& items() const { return items_; }
    const ContentItem* find(const InfoHash& hash) const;
    bool contains(const InfoHash& hash) const { return find(hash) != nullptr; }

    // n info_hashes drawn by popularity weight (with replacement).
    std::vector<InfoHash> sample(size_t n, Rng& rng) const;

    // Membership lists as an observer sees them: underground content is
    // on neither list.
    std::set<InfoHash> public_list() const;
    std::set<InfoHash> private_list() const;

  private:
    std::vector<ContentItem> items_;
    std::map<InfoHash, size_t> index_;
};

enum class Behavior { NoTor, TrackerOnlyViaTor, AllViaTor };
const char* to_string(Behavior b);

enum class SubscriptionVia { Direct, TorExit };

struct Subscription {
    Endpoint endpoint;
    sim::SimTime subscribed_at = 0;
    SubscriptionVia via = SubscriptionVia::Direct;
};

// Per-infohash registry of subscribed peers, as held by a tracker or by
// the DHT. One live subscription per endpoint; entries expire after
// 2 x announce interval.
class SwarmState {
  public:
    void subscribe(Endpoint ep, sim::SimTime now, SubscriptionVia via);
    void unsubscribe(Endpoint ep);
    void prune(sim::SimTime now, sim::SimTime ttl);
    std::vector<Subscription> recent_first(sim::SimTime now, sim::SimTime ttl) const;
    std::vector<Endpoint> endpoints(sim::SimTime now, sim::SimTime ttl) const;
    size_t size() const { return subs_.size(); }

  private:
    std::map<Endpoint, std::pair<sim::SimTime, SubscriptionVia>> subs_;
};

struct DownloadsConfig {
    // swarm_size: each content draws a target swarm size and gets that
    //   many распinct peers (heavy-tailed default);
    // popularity: each peer picks items by popularity weight;
    // unique: item i goes to peer i (needs n_items >= n_peers).
    std::string mode = "swarm_size";
    std::string swarm_size_dist = "pareto"; // pareto | fixed | uniform
    size_t swarm_size_min = 2;
    size_t swarm_size_max = 400;
    double swarm_size_alpha = 1.0;
    size_t swarm_size_fixed = 8;
    size_t per_peer_min = 1;
    size_t per_peer_max = 3;
};

struct BtConfig {
    size_t n_peers = 300;
    double tor_user_fraction = 0.5;
    double behavior_tracker_only = 0.72; // among Tor users
    double behavior_all_via_tor = 0.28;
    uint32_t announce_interval_s = 600;
    double announce_jitter = 0.10; // +/- fraction of the interval
    double encryption_fraction = 0.25;
    uint32_t max_peers_in_response = 50;
    size_t max_connections_per_swarm = 4;
    uint32_t session_start_window_s = 600;
    uint32_t session_duration_s = 0; // 0 = stay for the whole run
    uint32_t dht_head_start_s = 2;   // DHT announce precedes the tracker announce
    uint32_t connect_retry_delay_s = 300;
    bool pex_enabled = true;
    uint32_t pex_delay_s = 30;
    bool declare_public_ip = true;
    DownloadsConfig downloads;
    CatalogConfig catalog;
};

struct PeerAgent {
    size_t index = 0;
    sim::HostId host = sim::kNoHost;
    PeerId peer_id{}; // random 20 bytes, regenerated per session
    uint16_t listening_port = 0;
    Behavior behavior = Behavior::NoTor;
    std::vector<InfoHash> downloads;
    bool listening = false;

    struct SwarmView {
        std::deque<Endpoint> pending;     // discovered, not yet contacted
        std::set<Endpoint> known;
        std::set<Endpoint> connected;
    };
    std::map<InfoHash, SwarmView> swarms;
};

// Synthetic BitTorrent ecosystem: a content catalog, centralized
// trackers, a single logical DHT tracking service, PEX, and peer agents
// whose Tor usage follows the configured behavior split.
class BitTorrentOverlay {
  public:
    BitTorrentOverlay(sim::Engine& engine, sim::HostRegistry& registry, tor::TorOverlay& tor_net,
                      BtConfig config, Rng rng);

    void set_latency(std::function<sim::SimTime(sim::HostId, sim::HostId)> fn) { latency_ = std::move(fn); }

    // World construction. Peer hosts come from sample_population; the
    // overlay allocates tracker/DHT hosts itself.
    void build_world(const std::vector<sim::HostId>& peer_hosts, size_t n_trackers);

    // Registers the adversary's publicly connectable peer; incoming
    // handshakes at that host are handed to the hook.
    void set_malicious_peer(sim::HostId host,
                            std::function<void(Endpoint source, const wire::BtHandshake&, sim::SimTime)> hook);

    // Schedules every peer's session (staggered starts, announce loops).
    void start(sim::SimTime run_end);

    // Single announce. Throws UnknownInfoHash for content absent from
    // the catalog; the subscription carries the peer's public endpoint.
    void announce_to_tracker(size_t peer_index, const InfoHash& hash, bool via_tor,
                             wire::AnnounceEvent event);

    // DHT subscription + lookup; never traverses a circuit.
    void dht_announce_and_lookup(size_t peer_index, const InfoHash& hash);

    // TCP connect + handshake exchange. via_tor routes through a
    // circuit, so the target sees an exit as the source.
    void connect_peer(size_t peer_index, Endpoint target, const InfoHash& hash, bool via_tor);

    // Mutual gossip of per-swarm connection lists.
    void pex_exchange(size_t peer_a, size_t peer_b, const InfoHash& hash);

    // Current DHT subscriber snapshot (the attacker's get_peers view).
    std::vector<Endpoint> dht_lookup_now(const InfoHash& hash);

    const Catalog& catalog() const { return catalog_; }
    const std::vector<PeerAgent>& peers() const { return peers_; }
    const PeerAgent* peer_by_endpoint(Endpoint ep) const;
    std::vector<Endpoint> tracker_endpoints() const;

    // counters
    size_t connections_delivered() const { return connections_delivered_; }
    size_t connections_refused() const { return connections_refused_; }
    size_t tor_initiated_connections() const { return tor_initiated_connections_; }
    size_t tor_initiated_from_exit() const { return tor_initiated_from_exit_; }
    size_t dht_messages() const { return dht_messages_; }
    size_t dht_circuit_violations() const { return dht_circuit_violations_; }
    size_t tracker_announces() const { return tracker_announces_; }

  private:
    struct TrackerState {
        sim::HostId host = sim::kNoHost;
        std::map<InfoHash, SwarmState> swarms;
    };

    sim::SimTime ttl() const { return sim::seconds(config_.announce_interval_s) * 2; }
    sim::SimTime latency(sim::HostId a, sim::HostId b) const { return latency_ ? latency_(a, b) : 50; }
    TrackerState& tracker_for(const InfoHash& hash);
    void assign_downloads(Rng& rng);
    void schedule_session(size_t peer_index, sim::SimTime start, sim::SimTime run_end);
    void schedule_reannounce(size_t peer_index, sim::SimTime session_end, Rng jitter_rng);
    void announce_all(size_t peer_index, wire::AnnounceEvent event);
    void handle_peer_list(size_t peer_index, const InfoHash& hash, const std::vector<Endpoint>& found);
    void drain_pending(size_t peer_index, const InfoHash& hash, size_t batch_limit, bool immediate);
    void deliver_handshake(sim::HostId target_host, Endpoint transport_source, const InfoHash& hash,
                           const wire::BtHandshake& handshake, bool initiator_is_tor_user,
                           size_t initiator_index, bool arrived_via_tor);
    wire::AnnounceResponse tracker_handle_announce(TrackerState& tracker, const wire::AnnounceRequest& request,
                                                   Endpoint transport_source, SubscriptionVia via);

    sim::Engine& engine_;
    sim::HostRegistry& registry_;
    tor::TorOverlay& tor_;
    BtConfig config_;
    Rng rng_;
    std::function<sim::SimTime(sim::HostId, sim::HostId)> latency_;

    Catalog catalog_;
    std::vector<PeerAgent> peers_;
    std::map<Endpoint, size_t> peer_by_endpoint_;
    std::vector<TrackerState> trackers_;
    sim::HostId dht_host_ = sim::kNoHost;
    std::map<InfoHash, SwarmState> dht_swarms_;
    sim::HostId malicious_host_ = sim::kNoHost;
    Endpoint malicious_endpoint_;
    std::function<void(Endpoint, const wire::BtHandshake&, sim::SimTime)> malicious_hook_;
    sim::SimTime run_end_ = 0;

    size_t connections_delivered_ = 0;
    size_t connections_refused_ = 0;
    size_t tor_initiated_connections_ = 0;
    size_t tor_initiated_from_exit_ = 0;
    size_t dht_messages_ = 0;
    size_t dht_circuit_violations_ = 0;
    size_t tracker_announces_ = 0;
};

} // namespace torbtsim::bt
