#include "torbtsim/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace torbtsim::simulation {

using scenario::ScenarioConfig;

RunOutput run_scenario(const ScenarioConfig& config) {
    sim::Engine engine;
    engine.set_logging(config.emit_event_log);
    sim::HostRegistry registry;
    Rng master(config.seed);
    sim::SimTime run_end = sim::seconds(config.virtual_duration_s);

    uint64_t latency_seed = master.fork(7).next_u64();
    uint32_t lat_min = config.latency_min_ms, lat_max = config.latency_max_ms;
    // constant per host pair, order-independent, no state
    auto latency = [latency_seed, lat_min, lat_max](sim::HostId a, sim::HostId b) -> sim::SimTime {
        uint64_t lo = static_cast<uint64_t>(std::min(a, b));
        uint64_t hi = static_cast<uint64_t>(std::max(a, b));
        uint64_t h = splitmix64(splitmix64(latency_seed ^ lo) ^ (hi + 0x51ed2701));
        return lat_min + h % (lat_max - lat_min + 1);
    };

    // relays
    tor::TorOverlay tor_net(engine, registry, master.fork(5));
    std::vector<sim::HostId> exit_hosts;
    for (size_t i = 0; i < config.n_entry; ++i)
        tor_net.add_relay(registry.add({registry.next_ip(), 9001}, "ZZ", 0),
                          static_cast<uint8_t>(tor::RelayRole::Entry));
    for (size_t i = 0; i < config.n_middle; ++i)
        tor_net.add_relay(registry.add({registry.next_ip(), 9001}, "ZZ", 0),
                          static_cast<uint8_t>(tor::RelayRole::Middle));
    for (size_t i = 0; i < config.n_exit; ++i) {
        sim::HostId h = registry.add({registry.next_ip(), 9001}, "ZZ", 0);
        tor_net.add_relay(h, static_cast<uint8_t>(tor::RelayRole::Exit));
        exit_hosts.push_back(h);
    }
    tor_net.set_n_hops(config.n_hops);
    tor_net.set_circuit_lifetime(sim::seconds(config.circuit_lifetime_s));
    tor_net.set_policy(tor::CircuitPolicy(config.policy, config.port_groups));
    tor_net.set_latency(latency);
    std::set<sim::HostId> instrumented;
    for (size_t idx : config.instrumented_exits) instrumented.insert(exit_hosts.at(idx));
    tor_net.set_instrumented_exits(instrumented);

    // populations
    Rng pop_rng = master.fork(1);
    std::vector<sim::HostId> peer_hosts =
        sim::sample_population(config.population, config.bt.n_peers, registry, pop_rng);
    std::vector<sim::HostId> web_user_hosts =
        sim::sample_population(config.population, config.n_web_only_users, registry, pop_rng);

    // bittorrent world + the attacker's connectable peer
    bt::BitTorrentOverlay bt_net(engine, registry, tor_net, config.bt, master.fork(6));
    bt_net.set_latency(latency);
    bt_net.build_world(peer_hosts, config.n_trackers);
    sim::HostId malicious_host = registry.add({registry.next_ip(), 51413}, "ZZ", 0);

    adversary::Adversary::Config adv_config;
    adv_config.exit_ips = tor_net.public_exit_ips();
    adv_config.hijack_exits = {exit_hosts.at(config.hijack_exit.value_or(config.instrumented_exits.front()))};
    adv_config.malicious_endpoint = registry.get(malicious_host).endpoint;
    adv_config.correlation_window = sim::seconds(config.correlation_window_s);
    adv_config.freshness_window = sim::seconds(config.freshness_window_s);
    adv_config.hijack_enabled = config.hijack_enabled;
    adv_config.dht_match_enabled = config.dht_match_enabled;
    adv_config.linkage_enabled = config.linkage_enabled;
    adversary::Adversary adv(adv_config, [&bt_net](const InfoHash& hash) { return bt_net.dht_lookup_now(hash); });

    tor::ExitTap tap;
    tap.on_stream = [&adv](const tor::TapStream& t) { adv.on_stream(t); };
    tap.on_response = [&adv](const tor::TapStream& t, std::string bytes) {
        return adv.on_response(t, std::move(bytes));
    };
    tor_net.set_tap(std::move(tap));
    bt_net.set_malicious_peer(malicious_host,
                              [&adv](Endpoint src, const wire::BtHandshake& hs, sim::SimTime at) {
                                  adv.malicious_peer_accept(src, hs, at);
                              });

    // web destinations: at least one server per configured port
    Rng traffic_rng = master.fork(8);
    std::vector<uint16_t> web_ports;
    std::vector<double> web_port_weights;
    std::map<uint16_t, std::vector<Endpoint>> servers_by_port;
    for (const auto& [port, weight] : config.web_port_weights) {
        web_ports.push_back(port);
        web_port_weights.push_back(weight);
        size_t count = std::max<size_t>(1, static_cast<size_t>(std::llround(weight * double(config.n_web_servers))));
        for (size_t i = 0; i < count; ++i) {
            sim::HostId h = registry.add({registry.next_ip(), port}, "ZZ", 0);
            servers_by_port[port].push_back(registry.get(h).endpoint);
        }
    }

    // browsing load from every Tor client (BitTorrent peers using Tor
    // and web-only users)
    std::vector<sim::HostId> web_clients = web_user_hosts;
    for (const auto& peer : bt_net.peers())
        if (peer.behavior != bt::Behavior::NoTor) web_clients.push_back(peer.host);

    size_t request_counter = 0;
    std::vector<std::shared_ptr<std::function<void()>>> browse_loops; // outlive the event queue
    if (config.web_requests_per_hour > 0 && !web_ports.empty()) {
        sim::SimTime mean_gap =
            static_cast<sim::SimTime>(std::llround(3600000.0 / config.web_requests_per_hour));
        for (size_t u = 0; u < web_clients.size(); ++u) {
            sim::HostId user = web_clients[u];
            Rng user_rng = traffic_rng.fork(u);
            sim::SimTime first = 1 + user_rng.uniform_u64(0, std::max<sim::SimTime>(mean_gap, 1));
            if (first >= run_end) continue;
            auto loop = std::make_shared<std::function<void()>>();
            std::function<void()>* self = loop.get();
            *loop = [&engine, &tor_net, &web_ports, &web_port_weights, &servers_by_port, &request_counter,
                     run_end, mean_gap, user, user_rng, self]() mutable {
                uint16_t port = web_ports[user_rng.weighted_index(web_port_weights)];
                const auto& pool = servers_by_port.at(port);
                Endpoint server = pool[user_rng.uniform_u64(0, pool.size() - 1)];
                bool encrypted = port != 80; // TLS-wrapped unless plain HTTP
                tor::Stream& stream = tor_net.open_stream(user, server, "web", encrypted);
                std::string payload =
                    "GET /page/" + std::to_string(request_counter++) + " HTTP/1.1\r\nHost: site\r\n\r\n";
                tor_net.send(stream.id, payload, [](sim::HostId, Endpoint, std::string) {});
                sim::SimTime gap = static_cast<sim::SimTime>(double(mean_gap) * user_rng.uniform(0.5, 1.5));
                sim::SimTime next = engine.now() + std::max<sim::SimTime>(gap, 1000);
                if (next >= run_end) return;
                engine.schedule(next, user, "web_request", [self]() { (*self)(); });
            };
            browse_loops.push_back(loop);
            engine.schedule(first, user, "web_request", [self]() { (*self)(); });
        }
    }

    // cumulative distinct traced endpoints per country, sampled at each
    // snapshot boundary
    std::vector<std::map<std::string, uint64_t>> snapshots;
    auto take_snapshot = [&]() {
        std::set<Endpoint> endpoints;
        for (const auto& t : adv.trace_results()) endpoints.insert(t.traced_endpoint);
        std::map<std::string, uint64_t> counts;
        for (const auto& ep : endpoints)
            for (const auto& host : registry.all())
                if (host.endpoint == ep) {
                    ++counts[host.country];
                    break;
                }
        snapshots.push_back(std::move(counts));
    };
    for (sim::SimTime at = sim::seconds(config.snapshot_interval_s); at < run_end;
         at += sim::seconds(config.snapshot_interval_s))
        engine.schedule(at, sim::kNoHost, "snapshot", take_snapshot);

    bt_net.start(run_end);
    engine.run_until(run_end);
    take_snapshot();

    // assemble outputs
    RunOutput out;
    out.catalog = bt_net.catalog();
    out.observations = adv.observations();
    out.propagation = adv.propagate_traces();
    out.direct_traces = adv.trace_results();
    out.edges = adv.link_edges();
    out.trace_log = adv.trace_log();
    out.event_log = engine.event_log();
    out.daily_country_counts = std::move(snapshots);
    out.hijacked_responses = adv.hijacked_responses();
    out.ambiguous_correlations = adv.ambiguous_correlations();
    out.connections_delivered = bt_net.connections_delivered();
    out.connections_refused = bt_net.connections_refused();
    out.tor_initiated_connections = bt_net.tor_initiated_connections();
    out.tor_initiated_from_exit = bt_net.tor_initiated_from_exit();
    out.dht_messages = bt_net.dht_messages();
    out.dht_circuit_violations = bt_net.dht_circuit_violations();
    out.tracker_announces = bt_net.tracker_announces();

    for (const auto& [id, circuit] : tor_net.circuits()) {
        out.truth.circuit_owner[id] = registry.get(circuit.owner).endpoint;
        out.circuit_streams[id] = circuit.streams;
        out.circuit_created_at[id] = circuit.created_at;
    }
    for (const auto& [id, stream] : tor_net.streams()) {
        out.stream_owner[id] = registry.get(tor_net.circuit(stream.circuit).owner).endpoint;
        out.stream_dst_port[id] = stream.destination.port;
        out.stream_app_tag[id] = stream.app_tag;
        out.stream_opened_at[id] = stream.opened_at;
    }
    for (const auto& host : registry.all()) {
        out.truth.endpoint_country[host.endpoint] = host.country;
        out.truth.endpoint_asn[host.endpoint] = host.asn;
    }
    for (const auto& peer : bt_net.peers()) {
        if (peer.behavior == bt::Behavior::NoTor) continue;
        Endpoint ep = registry.get(peer.host).endpoint;
        out.truth.tor_bt_peers.insert(ep);
        ++out.n_tor_bt_peers;
        if (peer.behavior == bt::Behavior::TrackerOnlyViaTor) out.tracker_only_endpoints.insert(ep);
        if (peer.behavior == bt::Behavior::AllViaTor) out.all_via_tor_endpoints.insert(ep);
    }

    out.score = analysis::score_run(out.observations, out.propagation, out.direct_traces,
                                    out.ambiguous_correlations, out.truth);
    return out;
}

} // namespace torbtsim::simulation
