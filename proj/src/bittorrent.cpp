#include "torbtsim/bittorrent.hpp"

#include <algorithm>
#include <cmath>

namespace torbtsim::bt {

const char* to_string(Ecosystem e) {
    switch (e) {
        case Ecosystem::Public: return "public";
        case Ecosystem::Private: return "private";
        case Ecosystem::Underground: return "underground";
    }
    return "?";
}

const char* to_string(Behavior b) {
    switch (b) {
        case Behavior::NoTor: return "no_tor";
        case Behavior::TrackerOnlyViaTor: return "tracker_only_via_tor";
        case Behavior::AllViaTor: return "all_via_tor";
    }
    return "?";
}

Catalog Catalog::generate(const CatalogConfig& config, Rng& rng) {
    Catalog catalog;
    catalog.items_.reserve(config.n_items);
    std::vector<double> eco_weights{config.share_public, config.share_private, config.share_underground};
    for (size_t i = 0; i < config.n_items; ++i) {
        ContentItem item;
        do {
            for (auto& byte : item.info_hash) byte = static_cast<uint8_t>(rng.uniform_u64(0, 255));
        } while (catalog.index_.count(item.info_hash));
        item.ecosystem = static_cast<Ecosystem>(rng.weighted_index(eco_weights));
        size_t n_tags = rng.uniform_u64(1, std::min<size_t>(3, config.tag_vocabulary.size()));
        std::vector<std::string> vocab = config.tag_vocabulary;
        rng.shuffle(vocab);
        item.tags.assign(vocab.begin(), vocab.begin() + static_cast<ptrdiff_t>(n_tags));
        if (config.popularity == "zipf")
            item.popularity = 1.0 / std::pow(double(i + 1), config.zipf_exponent);
        else
            item.popularity = 1.0;
        catalog.index_.emplace(item.info_hash, catalog.items_.size());
        catalog.items_.push_back(std::move(item));
    }
    return catalog;
}

const ContentItem* Catalog::find(const InfoHash& hash) const {
    auto it = index_.find(hash);
    return it == index_.end() ? nullptr : &items_[it->second];
}

std::vector<InfoHash> Catalog::sample(size_t n, Rng& rng) const {
    std::vector<double> weights;
    weights.reserve(items_.size());
    for (const auto& item : items_) weights.push_back(item.popularity);
    std::vector<InfoHash> out;
    out.reserve(n);
    for (size_t i = 0; i < n; ++i) out.push_back(items_[rng.weighted_index(weights)].info_hash);
    return out;
}

std::set<InfoHash> Catalog::public_list() const {
    std::set<InfoHash> out;
    for (const auto& item : items_)
        if (item.ecosystem == Ecosystem::Public) out.insert(item.info_hash);
    return out;
}

std::set<InfoHash> Catalog::private_list() const {
    std::set<InfoHash> out;
    for (const auto& item : items_)
        if (item.ecosystem == Ecosystem::Private) out.insert(item.info_hash);
    return out;
}

void SwarmState::subscribe(Endpoint ep, sim::SimTime now, SubscriptionVia via) {
    subs_[ep] = {now, via}; // refresh keeps one live subscription per endpoint
}

void SwarmState::unsubscribe(Endpoint ep) { subs_.erase(ep); }

void SwarmState::prune(sim::SimTime now, sim::SimTime ttl) {
    std::erase_if(subs_, [&](const auto& entry) { return entry.second.first + ttl < now; });
}

std::vector<Subscription> SwarmState::recent_first(sim::SimTime now, sim::SimTime ttl) const {
    std::vector<Subscription> out;
    for (const auto& [ep, meta] : subs_)
        if (meta.first + ttl >= now) out.push_back({ep, meta.first, meta.second});
    std::sort(out.begin(), out.end(), [](const Subscription& a, const Subscription& b) {
        if (a.subscribed_at != b.subscribed_at) return a.subscribed_at > b.subscribed_at;
        return a.endpoint < b.endpoint;
    });
    return out;
}

std::vector<Endpoint> SwarmState::endpoints(sim::SimTime now, sim::SimTime ttl) const {
    std::vector<Endpoint> out;
    for (const auto& [ep, meta] : subs_)
        if (meta.first + ttl >= now) out.push_back(ep);
    return out;
}

BitTorrentOverlay::BitTorrentOverlay(sim::Engine& engine, sim::HostRegistry& registry,
                                     tor::TorOverlay& tor_net, BtConfig config, Rng rng)
    : engine_(engine), registry_(registry), tor_(tor_net), config_(std::move(config)), rng_(rng) {}

void BitTorrentOverlay::build_world(const std::vector<sim::HostId>& peer_hosts, size_t n_trackers) {
    Rng catalog_rng = rng_.fork(1);
    catalog_ = Catalog::generate(config_.catalog, catalog_rng);

    Rng behavior_rng = rng_.fork(2);
    peers_.clear();
    peers_.reserve(peer_hosts.size());
    for (size_t i = 0; i < peer_hosts.size(); ++i) {
        PeerAgent peer;
        peer.index = i;
        peer.host = peer_hosts[i];
        peer.listening_port = registry_.get(peer.host).endpoint.port;
        for (auto& byte : peer.peer_id) byte = static_cast<uint8_t>(behavior_rng.uniform_u64(0, 255));
        if (behavior_rng.bernoulli(config_.tor_user_fraction)) {
            double tracker_only =
                config_.behavior_tracker_only / (config_.behavior_tracker_only + config_.behavior_all_via_tor);
            peer.behavior = behavior_rng.bernoulli(tracker_only) ? Behavior::TrackerOnlyViaTor
                                                                 : Behavior::AllViaTor;
        } else {
            peer.behavior = Behavior::NoTor;
        }
        peer_by_endpoint_[registry_.get(peer.host).endpoint] = i;
        peers_.push_back(std::move(peer));
    }

    trackers_.clear();
    for (size_t t = 0; t < std::max<size_t>(n_trackers, 1); ++t) {
        Endpoint ep{registry_.next_ip(), 6969};
        TrackerState tracker;
        tracker.host = registry_.add(ep, "ZZ", 0);
        trackers_.push_back(std::move(tracker));
    }
    dht_host_ = registry_.add(Endpoint{registry_.next_ip(), 6881}, "ZZ", 0);

    Rng downloads_rng = rng_.fork(3);
    assign_downloads(downloads_rng);
}

void BitTorrentOverlay::assign_downloads(Rng& rng) {
    const auto& items = catalog_.items();
    if (peers_.empty() || items.empty()) return;
    if (config_.downloads.mode == "swarm_size") {
        std::vector<size_t> indices(peers_.size());
        for (size_t i = 0; i < indices.size(); ++i) indices[i] = i;
        for (const auto& item : items) {
            size_t target = 0;
            const auto& d = config_.downloads;
            if (d.swarm_size_dist == "fixed") {
                target = d.swarm_size_fixed;
            } else if (d.swarm_size_dist == "uniform") {
                target = rng.uniform_u64(d.swarm_size_min, d.swarm_size_max);
            } else {
                // discrete Pareto-style tail: P(size >= k) ~ (min/k)^alpha
                double u = rng.uniform01();
                target = static_cast<size_t>(double(d.swarm_size_min) / std::pow(1.0 - u, 1.0 / d.swarm_size_alpha));
                target = std::clamp(target, d.swarm_size_min, d.swarm_size_max);
            }
            target = std::min(target, peers_.size());
            // partial Fisher-Yates draw of `target` distinct peers
            for (size_t k = 0; k < target; ++k) {
                size_t j = k + rng.uniform_u64(0, indices.size() - 1 - k);
                std::swap(indices[k], indices[j]);
                peers_[indices[k]].downloads.push_back(item.info_hash);
            }
        }
    } else if (config_.downloads.mode == "popularity") {
        for (auto& peer : peers_) {
            size_t k = rng.uniform_u64(config_.downloads.per_peer_min, config_.downloads.per_peer_max);
            std::set<InfoHash> chosen;
            size_t attempts = 0;
            while (chosen.size() < std::min(k, items.size()) && attempts < 20 * k) {
                auto picks = catalog_.sample(1, rng);
                chosen.insert(picks.front());
                ++attempts;
            }
            peer.downloads.assign(chosen.begin(), chosen.end());
        }
    } else if (config_.downloads.mode == "unique") {
        if (items.size() < peers_.size())
            throw ConfigInvalid("downloads.mode=unique needs n_items >= n_peers");
        for (size_t i = 0; i < peers_.size(); ++i) peers_[i].downloads.push_back(items[i].info_hash);
    } else {
        throw ConfigInvalid("unknown downloads.mode \"" + config_.downloads.mode + "\"");
    }
}

void BitTorrentOverlay::set_malicious_peer(
    sim::HostId host, std::function<void(Endpoint, const wire::BtHandshake&, sim::SimTime)> hook) {
    malicious_host_ = host;
    malicious_endpoint_ = registry_.get(host).endpoint;
    malicious_hook_ = std::move(hook);
}

BitTorrentOverlay::TrackerState& BitTorrentOverlay::tracker_for(const InfoHash& hash) {
    return trackers_[hash[0] % trackers_.size()];
}

void BitTorrentOverlay::start(sim::SimTime run_end) {
    run_end_ = run_end;
    Rng schedule_rng = rng_.fork(4);
    for (size_t i = 0; i < peers_.size(); ++i) {
        sim::SimTime start = schedule_rng.uniform_u64(0, sim::seconds(config_.session_start_window_s));
        schedule_session(i, start, run_end);
    }
}

void BitTorrentOverlay::schedule_session(size_t peer_index, sim::SimTime start, sim::SimTime run_end) {
    engine_.schedule(start, peers_[peer_index].host, "peer_session_start", [this, peer_index, run_end]() {
        PeerAgent& peer = peers_[peer_index];
        peer.listening = true;
        announce_all(peer_index, wire::AnnounceEvent::Started);

        sim::SimTime session_end = run_end;
        if (config_.session_duration_s > 0)
            session_end = std::min(run_end, engine_.now() + sim::seconds(config_.session_duration_s));
        if (session_end < run_end) {
            engine_.schedule(session_end, peer.host, "peer_session_end", [this, peer_index]() {
                PeerAgent& p = peers_[peer_index];
                p.listening = false;
                for (const auto& hash : p.downloads) {
                    if (!catalog_.contains(hash)) continue;
                    announce_to_tracker(peer_index, hash, p.behavior != Behavior::NoTor,
                                        wire::AnnounceEvent::Stopped);
                }
            });
        }

        // periodic re-announce loop with jitter
        schedule_reannounce(peer_index, session_end, rng_.fork(1000 + peer_index));
    });
}

void BitTorrentOverlay::schedule_reannounce(size_t peer_index, sim::SimTime session_end, Rng jitter_rng) {
    double jitter = 1.0 + config_.announce_jitter * jitter_rng.uniform(-1.0, 1.0);
    sim::SimTime next = engine_.now() +
                        static_cast<sim::SimTime>(double(sim::seconds(config_.announce_interval_s)) * jitter);
    if (next >= session_end) return;
    engine_.schedule(next, peers_[peer_index].host, "peer_reannounce",
                     [this, peer_index, session_end, jitter_rng]() {
                         if (!peers_[peer_index].listening) return;
                         announce_all(peer_index, wire::AnnounceEvent::Periodic);
                         schedule_reannounce(peer_index, session_end, jitter_rng);
                     });
}

void BitTorrentOverlay::announce_all(size_t peer_index, wire::AnnounceEvent event) {
    PeerAgent& peer = peers_[peer_index];
    for (const auto& hash : peer.downloads) {
        dht_announce_and_lookup(peer_index, hash);
        sim::SimTime tracker_at = engine_.now() + sim::seconds(config_.dht_head_start_s);
        wire::AnnounceEvent ev = event;
        engine_.schedule(tracker_at, peer.host, "tracker_announce", [this, peer_index, hash, ev]() {
            if (!peers_[peer_index].listening) return;
            announce_to_tracker(peer_index, hash, peers_[peer_index].behavior != Behavior::NoTor, ev);
        });
    }
}

wire::AnnounceResponse BitTorrentOverlay::tracker_handle_announce(TrackerState& tracker,
                                                                  const wire::AnnounceRequest& request,
                                                                  Endpoint transport_source,
                                                                  SubscriptionVia via) {
    if (!catalog_.contains(request.info_hash))
        throw UnknownInfoHash(to_hex(request.info_hash));
    SwarmState& swarm = tracker.swarms[request.info_hash];
    swarm.prune(engine_.now(), ttl());
    Endpoint subscriber{request.declared_ip.value_or(transport_source.ip), request.port};
    if (request.event == wire::AnnounceEvent::Stopped) {
        swarm.unsubscribe(subscriber);
    } else {
        swarm.subscribe(subscriber, engine_.now(), via);
    }
    wire::AnnounceResponse response;
    response.interval_s = config_.announce_interval_s;
    for (const auto& sub : swarm.recent_first(engine_.now(), ttl())) {
        if (sub.endpoint == subscriber) continue;
        if (response.peers.size() >= config_.max_peers_in_response) break;
        response.peers.push_back(sub.endpoint);
    }
    return response;
}

void BitTorrentOverlay::announce_to_tracker(size_t peer_index, const InfoHash& hash, bool via_tor,
                                            wire::AnnounceEvent event) {
    PeerAgent& peer = peers_[peer_index];
    if (!catalog_.contains(hash)) throw UnknownInfoHash(to_hex(hash));
    TrackerState& tracker = tracker_for(hash);
    Endpoint tracker_ep = registry_.get(tracker.host).endpoint;
    Endpoint peer_ep = registry_.get(peer.host).endpoint;

    wire::AnnounceRequest request;
    request.info_hash = hash;
    request.peer_id = peer.peer_id;
    request.port = peer.listening_port;
    request.event = event;
    if (config_.declare_public_ip) request.declared_ip = peer_ep.ip;
    std::string bytes = wire::encode_announce_request(request);
    ++tracker_announces_;

    if (via_tor) {
        tor::Stream& stream = tor_.open_stream(peer.host, tracker_ep, "bittorrent", false);
        uint64_t stream_id = stream.id;
        tor_.send(stream_id, bytes,
                  [this, stream_id, peer_index, &tracker](sim::HostId exit_host, Endpoint exit_source,
                                                          std::string payload) {
                      sim::SimTime at = engine_.now() + latency(exit_host, tracker.host);
                      engine_.schedule(at, tracker.host, "tracker_handle_announce",
                                       [this, stream_id, peer_index, &tracker, exit_source, payload]() {
                                           auto request = wire::decode_announce_request(payload);
                                           auto response = tracker_handle_announce(tracker, request, exit_source,
                                                                                   SubscriptionVia::TorExit);
                                           InfoHash hash = request.info_hash;
                                           tor_.reply(stream_id, tracker.host,
                                                      wire::encode_announce_response(response),
                                                      [this, peer_index, hash](std::string reply_bytes) {
                                                          auto resp = wire::decode_announce_response(reply_bytes);
                                                          handle_peer_list(peer_index, hash, resp.peers);
                                                      });
                                       });
                  });
    } else {
        sim::SimTime at = engine_.now() + latency(peer.host, tracker.host);
        engine_.schedule(at, tracker.host, "tracker_handle_announce",
                         [this, peer_index, &tracker, peer_ep, bytes]() {
                             auto request = wire::decode_announce_request(bytes);
                             auto response =
                                 tracker_handle_announce(tracker, request, peer_ep, SubscriptionVia::Direct);
                             InfoHash hash = request.info_hash;
                             sim::SimTime back = engine_.now() + latency(tracker.host, peers_[peer_index].host);
                             engine_.schedule(back, peers_[peer_index].host, "tracker_response",
                                              [this, peer_index, hash, response]() {
                                                  handle_peer_list(peer_index, hash, response.peers);
                                              });
                         });
    }
}

void BitTorrentOverlay::dht_announce_and_lookup(size_t peer_index, const InfoHash& hash) {
    PeerAgent& peer = peers_[peer_index];
    Endpoint peer_ep = registry_.get(peer.host).endpoint;

    // DHT tracking runs over UDP, which the circuit layer does not
    // carry: both messages go out the public interface
    wire::KrpcMessage announce;
    announce.txn_id = "aa";
    announce.kind = wire::KrpcKind::AnnouncePeerQuery;
    announce.info_hash = hash;
    announce.port = peer.listening_port;
    std::string announce_bytes = wire::encode_krpc(announce);

    sim::SimTime at = engine_.now() + latency(peer.host, dht_host_);
    engine_.schedule(at, dht_host_, "dht_announce_peer", [this, peer_index, peer_ep, announce_bytes]() {
        auto msg = wire::decode_krpc(announce_bytes);
        ++dht_messages_;
        SwarmState& swarm = dht_swarms_[msg.info_hash];
        swarm.prune(engine_.now(), ttl());
        swarm.subscribe(Endpoint{peer_ep.ip, msg.port}, engine_.now(), SubscriptionVia::Direct);

        wire::KrpcMessage query;
        query.txn_id = "gp";
        query.kind = wire::KrpcKind::GetPeersQuery;
        query.info_hash = msg.info_hash;
        std::string query_bytes = wire::encode_krpc(query);
        ++dht_messages_;
        auto lookup = wire::decode_krpc(query_bytes);
        wire::KrpcMessage reply;
        reply.txn_id = lookup.txn_id;
        reply.kind = wire::KrpcKind::GetPeersResponse;
        reply.peers = dht_swarms_[lookup.info_hash].endpoints(engine_.now(), ttl());
        std::string reply_bytes = wire::encode_krpc(reply);
        InfoHash hash_copy = lookup.info_hash;
        sim::SimTime back = engine_.now() + latency(dht_host_, peers_[peer_index].host);
        engine_.schedule(back, peers_[peer_index].host, "dht_get_peers_response",
                         [this, peer_index, hash_copy, reply_bytes]() {
                             auto resp = wire::decode_krpc(reply_bytes);
                             handle_peer_list(peer_index, hash_copy, resp.peers);
                         });
    });
}

std::vector<Endpoint> BitTorrentOverlay::dht_lookup_now(const InfoHash& hash) {
    ++dht_messages_;
    auto it = dht_swarms_.find(hash);
    if (it == dht_swarms_.end()) return {};
    return it->second.endpoints(engine_.now(), ttl());
}

void BitTorrentOverlay::handle_peer_list(size_t peer_index, const InfoHash& hash,
                                         const std::vector<Endpoint>& found) {
    PeerAgent& peer = peers_[peer_index];
    if (!peer.listening) return;
    Endpoint self = registry_.get(peer.host).endpoint;
    auto& view = peer.swarms[hash];
    for (const auto& ep : found) {
        if (ep == self) continue;
        if (!view.known.insert(ep).second) continue;
        view.pending.push_back(ep);
    }
    drain_pending(peer_index, hash, config_.max_connections_per_swarm, true);
}

void BitTorrentOverlay::drain_pending(size_t peer_index, const InfoHash& hash, size_t batch_limit,
                                      bool immediate) {
    PeerAgent& peer = peers_[peer_index];
    if (!peer.listening) return;
    auto& view = peer.swarms[hash];
    size_t started = 0;
    while (!view.pending.empty() && view.connected.size() + started < batch_limit) {
        Endpoint target = view.pending.front();
        view.pending.pop_front();
        if (view.connected.count(target)) continue;
        connect_peer(peer_index, target, hash, peer.behavior == Behavior::AllViaTor);
        ++started;
    }
    if (immediate && !view.pending.empty() && config_.connect_retry_delay_s > 0) {
        sim::SimTime retry = engine_.now() + sim::seconds(config_.connect_retry_delay_s);
        if (retry < run_end_)
            engine_.schedule(retry, peer.host, "peer_connect_retry", [this, peer_index, hash]() {
                drain_pending(peer_index, hash, config_.max_connections_per_swarm, false);
            });
    }
}

void BitTorrentOverlay::connect_peer(size_t peer_index, Endpoint target, const InfoHash& hash,
                                     bool via_tor) {
    PeerAgent& peer = peers_[peer_index];
    Rng conn_rng = rng_.fork(2000 + peer_index * 31 + engine_.now());
    bool encrypted = conn_rng.bernoulli(config_.encryption_fraction);

    wire::BtHandshake handshake;
    handshake.info_hash = hash;
    handshake.peer_id = peer.peer_id;
    handshake.extended = wire::ExtendedHandshake{peer.listening_port};
    std::string bytes = wire::encode_handshake(handshake);

    sim::HostId target_host = sim::kNoHost;
    if (target == malicious_endpoint_ && malicious_host_ != sim::kNoHost) {
        target_host = malicious_host_;
    } else if (auto it = peer_by_endpoint_.find(target); it != peer_by_endpoint_.end()) {
        target_host = peers_[it->second].host;
    }
    if (target_host == sim::kNoHost) {
        ++connections_refused_;
        return;
    }

    bool initiator_is_tor_user = peer.behavior != Behavior::NoTor;
    if (via_tor) {
        tor::Stream& stream = tor_.open_stream(peer.host, target, "bittorrent", encrypted);
        tor_.send(stream.id, bytes,
                  [this, peer_index, target_host, hash, handshake, initiator_is_tor_user](
                      sim::HostId exit_host, Endpoint exit_source, std::string) {
                      if (target_host == dht_host_) ++dht_circuit_violations_;
                      sim::SimTime at = engine_.now() + latency(exit_host, target_host);
                      engine_.schedule(at, target_host, "p2p_handshake",
                                       [this, peer_index, target_host, hash, handshake, exit_source,
                                        initiator_is_tor_user]() {
                                           deliver_handshake(target_host, exit_source, hash, handshake,
                                                             initiator_is_tor_user, peer_index, true);
                                       });
                  });
    } else {
        Endpoint source = registry_.get(peer.host).endpoint;
        sim::SimTime at = engine_.now() + latency(peer.host, target_host);
        engine_.schedule(at, target_host, "p2p_handshake",
                         [this, peer_index, target_host, hash, handshake, source, initiator_is_tor_user]() {
                             deliver_handshake(target_host, source, hash, handshake, initiator_is_tor_user,
                                               peer_index, false);
                         });
    }
}

void BitTorrentOverlay::deliver_handshake(sim::HostId target_host, Endpoint transport_source,
                                          const InfoHash& hash, const wire::BtHandshake& handshake,
                                          bool initiator_is_tor_user, size_t initiator_index,
                                          bool arrived_via_tor) {
    if (initiator_is_tor_user) {
        ++tor_initiated_connections_;
        if (arrived_via_tor) ++tor_initiated_from_exit_;
    }
    if (target_host == malicious_host_) {
        ++connections_delivered_;
        if (malicious_hook_) malicious_hook_(transport_source, handshake, engine_.now());
        return;
    }
    auto target_it = peer_by_endpoint_.find(registry_.get(target_host).endpoint);
    if (target_it == peer_by_endpoint_.end()) return;
    PeerAgent& target = peers_[target_it->second];
    if (!target.listening) {
        ++connections_refused_;
        return;
    }
    ++connections_delivered_;
    PeerAgent& initiator = peers_[initiator_index];
    Endpoint target_ep = registry_.get(target.host).endpoint;

    // the connection is established; both sides track it per swarm. The
    // target learns the transport source; the initiator knows whom it
    // dialed.
    target.swarms[hash].known.insert(transport_source);
    target.swarms[hash].connected.insert(transport_source);
    initiator.swarms[hash].known.insert(target_ep);
    initiator.swarms[hash].connected.insert(target_ep);

    if (config_.pex_enabled && !arrived_via_tor) {
        // PEX gossip over the established direct connection; the
        // initiator's endpoint is only meaningful when the connection is
        // direct
        size_t a = initiator_index, b = target_it->second;
        sim::SimTime at = engine_.now() + sim::seconds(config_.pex_delay_s);
        if (at < run_end_)
            engine_.schedule(at, target.host, "pex_exchange",
                             [this, a, b, hash]() { pex_exchange(a, b, hash); });
    }
}

void BitTorrentOverlay::pex_exchange(size_t peer_a, size_t peer_b, const InfoHash& hash) {
    PeerAgent& a = peers_[peer_a];
    PeerAgent& b = peers_[peer_b];
    if (!a.listening || !b.listening) return;
    auto lists_a = a.swarms[hash].connected;
    auto lists_b = b.swarms[hash].connected;
    std::vector<Endpoint> to_b(lists_a.begin(), lists_a.end());
    std::vector<Endpoint> to_a(lists_b.begin(), lists_b.end());
    to_b.push_back(registry_.get(a.host).endpoint);
    to_a.push_back(registry_.get(b.host).endpoint);
    handle_peer_list(peer_a, hash, to_a);
    handle_peer_list(peer_b, hash, to_b);
}

const PeerAgent* BitTorrentOverlay::peer_by_endpoint(Endpoint ep) const {
    auto it = peer_by_endpoint_.find(ep);
    return it == peer_by_endpoint_.end() ? nullptr : &peers_[it->second];
}

std::vector<Endpoint> BitTorrentOverlay::tracker_endpoints() const {
    std::vector<Endpoint> out;
    for (const auto& t : trackers_) out.push_back(registry_.get(t.host).endpoint);
    return out;
}

} // namespace torbtsim::bt
