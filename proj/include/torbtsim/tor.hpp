#pragma once

#include "torbtsim/endpoint.hpp"
#include "torbtsim/errors.hpp"
#include "torbtsim/rng.hpp"
#include "torbtsim/sim.hpp"
#include "torbtsim/wire.hpp"

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace torbtsim::tor {

enum class RelayRole : uint8_t { Entry = 1, Middle = 2, Exit = 4 };

struct Relay {
    sim::HostId host = sim::kNoHost;
    uint8_t roles = 0;

    bool has(RelayRole r) const { return (roles & static_cast<uint8_t>(r)) != 0; }
};

enum class PolicyKind { MultiplexAll, OneStreamPerCircuit, PortGroupIsolation, PerApplicationIsolation };

const char* to_string(PolicyKind k);
std::optional<PolicyKind> parse_policy(const std::string& name);

// Stream-to-circuit assignment policy. For PortGroupIsolation every
// destination port maps to exactly one group: listed ports to their
// group index, all others to the residual group.
class CircuitPolicy {
  public:
    CircuitPolicy() : kind_(PolicyKind::MultiplexAll) {}
    explicit CircuitPolicy(PolicyKind kind, std::vector<std::vector<uint16_t>> port_groups = {});

    PolicyKind kind() const { return kind_; }
    int group_of(uint16_t port) const;
    int residual_group() const { return static_cast<int>(n_groups_); }

  private:
    PolicyKind kind_;
    std::map<uint16_t, int> port_to_group_;
    size_t n_groups_ = 0;
};

struct Stream {
    uint64_t id = 0;
    uint64_t circuit = 0;
    Endpoint destination;
    sim::SimTime opened_at = 0;
    wire::StreamClass cls = wire::StreamClass::Other; // filled at exit
    bool encrypted = false;
    std::string app_tag;
};

struct Circuit {
    uint64_t id = 0;
    std::vector<sim::HostId> hops; // entry .. exit
    sim::HostId owner = sim::kNoHost; // ground truth, never exposed to the tap
    sim::SimTime created_at = 0;
    std::vector<uint64_t> streams;
    int port_group = 0;
    std::string app_tag;

    sim::HostId exit() const { return hops.back(); }
};

// What an instrumented exit hands to the adversary. Deliberately has no
// owner field; the payload prefix is capped at the classifier limit.
struct TapStream {
    sim::HostId exit_host = sim::kNoHost;
    uint64_t circuit = 0;
    uint64_t stream = 0;
    Endpoint destination;
    std::string payload_prefix;
    bool encrypted = false;
    sim::SimTime at = 0;
};

struct ExitTap {
    std::function<void(const TapStream&)> on_stream;
    // Return value replaces the response bytes in flight.
    std::function<std::string(const TapStream&, std::string)> on_response;
};

class TorOverlay {
  public:
    TorOverlay(sim::Engine& engine, sim::HostRegistry& registry, Rng rng);

    void add_relay(sim::HostId host, uint8_t roles);
    void set_policy(CircuitPolicy policy) { policy_ = policy; }
    void set_n_hops(size_t n) { n_hops_ = n; }
    void set_circuit_lifetime(sim::SimTime l) { circuit_lifetime_ = l; }
    void set_instrumented_exits(std::set<sim::HostId> exits) { instrumented_ = std::move(exits); }
    void set_tap(ExitTap tap) { tap_ = std::move(tap); }
    void set_latency(std::function<sim::SimTime(sim::HostId, sim::HostId)> fn) { latency_ = std::move(fn); }

    // Public directory of exit addresses (what the attacker scrapes).
    std::set<uint32_t> public_exit_ips() const;
    const std::vector<Relay>& directory() const { return relays_; }

    // Samples hops without replacement, role-respecting; exit first so
    // exit selection is uniform over exit-capable relays.
    Circuit& build_circuit(sim::HostId client);

    // Applies the active policy, reusing or building a circuit, and
    // returns the new stream.
    Stream& open_stream(sim::HostId client, Endpoint destination, const std::string& app_tag,
                        bool encrypted = false);

    // Client-side send: the payload surfaces at the exit (tap fires when
    // instrumented); deliver runs at exit time with the exit's endpoint
    // as transport source, and the caller schedules the last leg.
    void send(uint64_t stream_id, std::string payload,
              std::function<void(sim::HostId exit_host, Endpoint exit_source, std::string payload)> deliver);

    // Destination-side reply travelling back through the circuit; an
    // instrumented exit may observe and rewrite it. deliver runs at the
    // client once the reply has crossed the circuit.
    void reply(uint64_t stream_id, sim::HostId from_host, std::string payload,
               std::function<void(std::string payload)> deliver);

    const Circuit& circuit(uint64_t id) const { return circuits_.at(id); }
    const Stream& stream(uint64_t id) const { return streams_.at(id); }
    const std::map<uint64_t, Circuit>& circuits() const { return circuits_; }
    const std::map<uint64_t, Stream>& streams() const { return streams_; }
    sim::HostId stream_owner(uint64_t stream_id) const { return circuits_.at(streams_.at(stream_id).circuit).owner; }

  private:
    sim::SimTime link_latency(sim::HostId a, sim::HostId b) const;
    sim::SimTime path_latency(const Circuit& c, sim::HostId client) const;
    Circuit* reusable_circuit(sim::HostId client, int port_group, const std::string& app_tag);

    sim::Engine& engine_;
    sim::HostRegistry& registry_;
    Rng rng_;
    std::vector<Relay> relays_;
    CircuitPolicy policy_;
    size_t n_hops_ = 3;
    sim::SimTime circuit_lifetime_ = sim::seconds(600);
    std::set<sim::HostId> instrumented_;
    ExitTap tap_;
    std::function<sim::SimTime(sim::HostId, sim::HostId)> latency_;

    std::map<uint64_t, Circuit> circuits_;
    std::map<uint64_t, Stream> streams_;
    std::map<sim::HostId, std::vector<uint64_t>> client_circuits_;
    uint64_t next_circuit_id_ = 1;
    uint64_t next_stream_id_ = 1;
};

} // namespace torbtsim::tor
