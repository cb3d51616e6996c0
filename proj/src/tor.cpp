#include "torbtsim/tor.hpp"

#include <algorithm>

namespace torbtsim::tor {

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::MultiplexAll: return "multiplex_all";
        case PolicyKind::OneStreamPerCircuit: return "one_stream_per_circuit";
        case PolicyKind::PortGroupIsolation: return "port_group_isolation";
        case PolicyKind::PerApplicationIsolation: return "per_application_isolation";
    }
    return "?";
}

std::optional<PolicyKind> parse_policy(const std::string& name) {
    if (name == "multiplex_all") return PolicyKind::MultiplexAll;
    if (name == "one_stream_per_circuit") return PolicyKind::OneStreamPerCircuit;
    if (name == "port_group_isolation") return PolicyKind::PortGroupIsolation;
    if (name == "per_application_isolation") return PolicyKind::PerApplicationIsolation;
    return std::nullopt;
}

CircuitPolicy::CircuitPolicy(PolicyKind kind, std::vector<std::vector<uint16_t>> port_groups)
    : kind_(kind), n_groups_(port_groups.size()) {
    for (size_t g = 0; g < port_groups.size(); ++g) {
        for (uint16_t port : port_groups[g]) {
            auto [it, inserted] = port_to_group_.emplace(port, static_cast<int>(g));
            if (!inserted && it->second != static_cast<int>(g))
                throw ConfigInvalid("port " + std::to_string(port) + " listed in two port groups");
        }
    }
}

int CircuitPolicy::group_of(uint16_t port) const {
    auto it = port_to_group_.find(port);
    return it == port_to_group_.end() ? residual_group() : it->second;
}

TorOverlay::TorOverlay(sim::Engine& engine, sim::HostRegistry& registry, Rng rng)
    : engine_(engine), registry_(registry), rng_(rng) {}

void TorOverlay::add_relay(sim::HostId host, uint8_t roles) { relays_.push_back(Relay{host, roles}); }

std::set<uint32_t> TorOverlay::public_exit_ips() const {
    std::set<uint32_t> ips;
    for (const auto& r : relays_)
        if (r.has(RelayRole::Exit)) ips.insert(registry_.get(r.host).endpoint.ip);
    return ips;
}

sim::SimTime TorOverlay::link_latency(sim::HostId a, sim::HostId b) const {
    if (latency_) return latency_(a, b);
    return 50;
}

sim::SimTime TorOverlay::path_latency(const Circuit& c, sim::HostId client) const {
    sim::SimTime total = link_latency(client, c.hops.front());
    for (size_t i = 0; i + 1 < c.hops.size(); ++i) total += link_latency(c.hops[i], c.hops[i + 1]);
    return total;
}

Circuit& TorOverlay::build_circuit(sim::HostId client) {
    std::vector<sim::HostId> exits, entries, middles;
    for (const auto& r : relays_) {
        if (r.has(RelayRole::Exit)) exits.push_back(r.host);
        if (r.has(RelayRole::Entry)) entries.push_back(r.host);
        if (r.has(RelayRole::Middle)) middles.push_back(r.host);
    }
    if (exits.empty()) throw InsufficientRelays("no exit relays");
    sim::HostId exit = exits[rng_.uniform_u64(0, exits.size() - 1)];

    std::erase(entries, exit);
    if (entries.empty()) throw InsufficientRelays("no entry relay distinct from exit");
    sim::HostId entry = entries[rng_.uniform_u64(0, entries.size() - 1)];

    std::vector<sim::HostId> hops{entry};
    std::erase(middles, exit);
    std::erase(middles, entry);
    for (size_t i = 0; i + 2 < n_hops_; ++i) {
        if (middles.empty())
            throw InsufficientRelays("need " + std::to_string(n_hops_) + " distinct relays");
        size_t pick = rng_.uniform_u64(0, middles.size() - 1);
        hops.push_back(middles[pick]);
        middles.erase(middles.begin() + static_cast<ptrdiff_t>(pick));
    }
    hops.push_back(exit);

    uint64_t id = next_circuit_id_++;
    Circuit c;
    c.id = id;
    c.hops = std::move(hops);
    c.owner = client;
    c.created_at = engine_.now();
    auto [it, _] = circuits_.emplace(id, std::move(c));
    client_circuits_[client].push_back(id);
    return it->second;
}

Circuit* TorOverlay::reusable_circuit(sim::HostId client, int port_group, const std::string& app_tag) {
    auto it = client_circuits_.find(client);
    if (it == client_circuits_.end()) return nullptr;
    // newest first
    for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
        Circuit& c = circuits_.at(*rit);
        if (engine_.now() >= c.created_at + circuit_lifetime_) continue;
        switch (policy_.kind()) {
            case PolicyKind::MultiplexAll: return &c;
            case PolicyKind::OneStreamPerCircuit: return nullptr;
            case PolicyKind::PortGroupIsolation:
                if (c.port_group == port_group) return &c;
                break;
            case PolicyKind::PerApplicationIsolation:
                if (c.app_tag == app_tag) return &c;
                break;
        }
    }
    return nullptr;
}

Stream& TorOverlay::open_stream(sim::HostId client, Endpoint destination, const std::string& app_tag,
                                bool encrypted) {
    int group = policy_.group_of(destination.port);
    Circuit* circuit = reusable_circuit(client, group, app_tag);
    if (circuit == nullptr) {
        circuit = &build_circuit(client);
        circuit->port_group = group;
        circuit->app_tag = app_tag;
    }
    uint64_t id = next_stream_id_++;
    Stream s;
    s.id = id;
    s.circuit = circuit->id;
    s.destination = destination;
    s.opened_at = engine_.now();
    s.encrypted = encrypted;
    s.app_tag = app_tag;
    auto [it, _] = streams_.emplace(id, std::move(s));
    circuit->streams.push_back(id);
    return it->second;
}

void TorOverlay::send(uint64_t stream_id, std::string payload,
                      std::function<void(sim::HostId, Endpoint, std::string)> deliver) {
    Stream& s = streams_.at(stream_id);
    const Circuit& c = circuits_.at(s.circuit);
    sim::HostId exit = c.exit();
    sim::SimTime at_exit = engine_.now() + path_latency(c, c.owner);
    // classification result is recorded on the stream when its payload
    // first surfaces at the exit
    engine_.schedule(at_exit, exit, "exit_relay", [this, stream_id, exit, payload, deliver]() {
        Stream& s = streams_.at(stream_id);
        if (s.cls == wire::StreamClass::Other && !s.encrypted)
            s.cls = wire::classify_stream(payload, s.destination.port);
        if (instrumented_.count(exit) && tap_.on_stream) {
            TapStream tap;
            tap.exit_host = exit;
            tap.circuit = s.circuit;
            tap.stream = stream_id;
            tap.destination = s.destination;
            tap.payload_prefix = payload.substr(0, wire::kClassifyPrefixLimit);
            tap.encrypted = s.encrypted;
            tap.at = engine_.now();
            tap_.on_stream(tap);
        }
        deliver(exit, registry_.get(exit).endpoint, payload);
    });
}

void TorOverlay::reply(uint64_t stream_id, sim::HostId from_host, std::string payload,
                       std::function<void(std::string)> deliver) {
    const Stream& s = streams_.at(stream_id);
    const Circuit& c = circuits_.at(s.circuit);
    sim::HostId exit = c.exit();
    sim::SimTime at_exit = engine_.now() + link_latency(from_host, exit);
    engine_.schedule(at_exit, exit, "exit_relay_reply", [this, stream_id, exit, payload, deliver]() {
        const Stream& s = streams_.at(stream_id);
        const Circuit& c = circuits_.at(s.circuit);
        std::string bytes = payload;
        if (instrumented_.count(exit) && tap_.on_response) {
            TapStream tap;
            tap.exit_host = exit;
            tap.circuit = s.circuit;
            tap.stream = stream_id;
            tap.destination = s.destination;
            tap.encrypted = s.encrypted;
            tap.at = engine_.now();
            bytes = tap_.on_response(tap, std::move(bytes));
        }
        sim::SimTime at_client = engine_.now() + path_latency(c, c.owner);
        engine_.schedule(at_client, c.owner, "circuit_reply",
                         [bytes, deliver]() { deliver(bytes); });
    });
}

} // namespace torbtsim::tor
